//! Skip-gram with negative sampling over subword sequences, used to
//! initialise the subword table from an unlabelled domain corpus.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::table::SemanticTable;
use super::vocab::{SubwordVocab, OOV_INDEX};
use crate::error::{Error, Result};
use crate::tensor::{axpy, dot, sigmoid, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SkipGramConfig {
    pub window: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            window: 3,
            negatives: 5,
            learning_rate: 0.025,
            epochs: 5,
        }
    }
}

/// Turns corpus lines into subword id sequences; lines that do not
/// tokenize are skipped.
pub fn encode_corpus<I, S>(lines: I, vocab: &SubwordVocab) -> Vec<Vec<usize>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    lines
        .into_iter()
        .filter_map(|l| vocab.ids(l.as_ref()).ok())
        .filter(|ids| !ids.is_empty())
        .collect()
}

/// Trains subword embeddings with skip-gram and negative sampling.
///
/// The input table starts from [`SemanticTable::random`] with the same
/// `seed`, so zero epochs returns that initialisation. OOV tokens are
/// neither centers nor contexts. Negatives are drawn from the unigram
/// distribution raised to 0.75.
pub fn pretrain_subword_embeddings(
    corpus: &[Vec<usize>],
    vocab_size: usize,
    dim: usize,
    cfg: &SkipGramConfig,
    seed: u64,
) -> Result<SemanticTable> {
    if corpus.iter().all(|s| s.iter().all(|&t| t == OOV_INDEX)) {
        return Err(Error::EmptyCorpus);
    }
    let mut table = SemanticTable::random(vocab_size, dim, seed);
    if cfg.epochs == 0 {
        return Ok(table);
    }
    let mut counts = vec![0.0f64; vocab_size];
    for &t in corpus.iter().flatten() {
        if t != OOV_INDEX {
            counts[t] += 1.0;
        }
    }
    let weights: Vec<f64> = counts.iter().map(|c| c.powf(0.75)).collect();
    let noise = WeightedIndex::new(&weights).map_err(|_| Error::EmptyCorpus)?;

    let mut output = Matrix::zeros(vocab_size, dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x736b_6970));
    let mut grad_in = vec![0.0; dim];

    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate * (1.0 - epoch as f64 / cfg.epochs as f64).max(1e-4);
        for seq in corpus {
            for (pos, &center) in seq.iter().enumerate() {
                if center == OOV_INDEX {
                    continue;
                }
                let span = if cfg.window > 1 {
                    rng.gen_range(1..=cfg.window)
                } else {
                    1
                };
                let lo = pos.saturating_sub(span);
                let hi = (pos + span + 1).min(seq.len());
                for (cpos, &context) in seq.iter().enumerate().take(hi).skip(lo) {
                    if cpos == pos || context == OOV_INDEX {
                        continue;
                    }
                    grad_in.iter_mut().for_each(|g| *g = 0.0);
                    for n in 0..=cfg.negatives {
                        let (target, label) = if n == 0 {
                            (context, 1.0)
                        } else {
                            let t = noise.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0)
                        };
                        let score = sigmoid(dot(table.weights.row(center), output.row(target)));
                        let g = lr * (label - score);
                        axpy(&mut grad_in, g, output.row(target));
                        let center_row = table.weights.row(center).to_vec();
                        axpy(output.row_mut(target), g, &center_row);
                    }
                    axpy(table.weights.row_mut(center), 1.0, &grad_in);
                }
            }
        }
        if !table.weights.is_finite() {
            return Err(Error::NonFiniteLoss(format!("skip-gram epoch {epoch}")));
        }
    }
    Ok(table)
}
