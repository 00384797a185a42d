use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::vocab::SubwordVocab;
use crate::error::{Error, Result};
use crate::tensor::{axpy, Matrix};

/// Subword embedding rows, one per vocabulary entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticTable {
    pub weights: Matrix,
}

impl SemanticTable {
    /// Seeded uniform initialisation in `[-1/sqrt(d), 1/sqrt(d)]`.
    pub fn random(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 1.0 / (dim as f64).sqrt();
        SemanticTable {
            weights: Matrix::uniform(vocab_size, dim, bound, &mut rng),
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn len(&self) -> usize {
        self.weights.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.rows() == 0
    }

    /// Mean of the given rows.
    pub fn mean_rows(&self, ids: &[usize]) -> Result<Vec<f64>> {
        if ids.is_empty() {
            return Err(Error::EmptySurface);
        }
        let mut out = vec![0.0; self.dim()];
        for &id in ids {
            axpy(&mut out, 1.0, self.weights.row(id));
        }
        let inv = 1.0 / ids.len() as f64;
        out.iter_mut().for_each(|x| *x *= inv);
        Ok(out)
    }
}

/// Average of the subword embeddings of `surface`.
pub fn semantic_embedding(
    surface: &str,
    table: &SemanticTable,
    vocab: &SubwordVocab,
) -> Result<Vec<f64>> {
    if table.len() != vocab.len() {
        return Err(Error::DimensionMismatch {
            expected: vocab.len(),
            got: table.len(),
        });
    }
    table.mean_rows(&vocab.ids(surface)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantic::{build_vocab, TokenizerMode};

    fn setup() -> (SubwordVocab, SemanticTable) {
        let vocab = build_vocab(["ab"], TokenizerMode::UnicodeChar).unwrap();
        let table = SemanticTable {
            weights: Matrix::from_vec(3, 2, vec![9., 9., 1., 0., 0., 1.]),
        };
        (vocab, table)
    }

    #[test]
    fn single_subword_is_its_row() {
        let (v, t) = setup();
        assert_eq!(semantic_embedding("a", &t, &v).unwrap(), vec![1., 0.]);
    }

    #[test]
    fn two_subwords_average() {
        let (v, t) = setup();
        assert_eq!(semantic_embedding("ab", &t, &v).unwrap(), vec![0.5, 0.5]);
        assert_eq!(semantic_embedding("ba", &t, &v).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn unseen_subwords_give_the_bucket_row() {
        let (v, t) = setup();
        assert_eq!(semantic_embedding("xyz", &t, &v).unwrap(), vec![9., 9.]);
    }

    #[test]
    fn empty_surface() {
        let (v, t) = setup();
        assert!(matches!(
            semantic_embedding(" ", &t, &v),
            Err(Error::EmptySurface)
        ));
    }
}
