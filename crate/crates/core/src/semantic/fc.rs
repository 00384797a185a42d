use rand::Rng;

use crate::error::{check_dim, Result};
use crate::tensor::{axpy, Matrix};

/// `tanh(W2 * tanh(W1 * x + b1) + b2)`.
///
/// The same shape serves as the shared semantic projection (input `d`) and
/// the knowledge projection (input `n`); it also doubles as the gradient
/// accumulator for itself.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLayerFc {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
}

/// Projection shared by mentions and entities.
pub type SharedFc = TwoLayerFc;

/// Activations kept from a forward pass for the backward pass.
#[derive(Debug, Clone)]
pub struct FcTrace {
    pub input: Vec<f64>,
    pub hidden: Vec<f64>,
    pub hidden_dropped: Vec<f64>,
    pub mask: Option<Vec<f64>>,
    pub output: Vec<f64>,
}

impl TwoLayerFc {
    pub fn zeros(input: usize, k: usize) -> Self {
        TwoLayerFc {
            w1: Matrix::zeros(k, input),
            b1: vec![0.0; k],
            w2: Matrix::zeros(k, k),
            b2: vec![0.0; k],
        }
    }

    pub fn glorot<R: Rng>(input: usize, k: usize, rng: &mut R) -> Self {
        TwoLayerFc {
            w1: Matrix::glorot(k, input, rng),
            b1: vec![0.0; k],
            w2: Matrix::glorot(k, k, rng),
            b2: vec![0.0; k],
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.w2.rows()
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.input_dim(), x.len())?;
        Ok(self.forward_traced(x, None).output)
    }

    /// Forward pass with an optional inverted-dropout mask on the hidden
    /// layer. `mask` entries are either 0 or `1 / (1 - rate)`.
    pub fn forward_traced(&self, x: &[f64], mask: Option<&[f64]>) -> FcTrace {
        let mut hidden = self.w1.matvec(x);
        for (h, b) in hidden.iter_mut().zip(&self.b1) {
            *h = (*h + b).tanh();
        }
        let hidden_dropped: Vec<f64> = match mask {
            Some(m) => hidden.iter().zip(m).map(|(h, m)| h * m).collect(),
            None => hidden.clone(),
        };
        let mut output = self.w2.matvec(&hidden_dropped);
        for (o, b) in output.iter_mut().zip(&self.b2) {
            *o = (*o + b).tanh();
        }
        FcTrace {
            input: x.to_vec(),
            hidden,
            hidden_dropped,
            mask: mask.map(<[f64]>::to_vec),
            output,
        }
    }

    /// Accumulates parameter gradients into `grads` and returns the gradient
    /// with respect to the input.
    pub fn backward(&self, trace: &FcTrace, d_output: &[f64], grads: &mut TwoLayerFc) -> Vec<f64> {
        let dz2: Vec<f64> = d_output
            .iter()
            .zip(&trace.output)
            .map(|(g, o)| g * (1.0 - o * o))
            .collect();
        grads.w2.add_outer(1.0, &dz2, &trace.hidden_dropped);
        axpy(&mut grads.b2, 1.0, &dz2);
        let mut dh = self.w2.matvec_t(&dz2);
        if let Some(m) = &trace.mask {
            dh.iter_mut().zip(m).for_each(|(g, m)| *g *= m);
        }
        let dz1: Vec<f64> = dh
            .iter()
            .zip(&trace.hidden)
            .map(|(g, h)| g * (1.0 - h * h))
            .collect();
        grads.w1.add_outer(1.0, &dz1, &trace.input);
        axpy(&mut grads.b1, 1.0, &dz1);
        self.w1.matvec_t(&dz1)
    }

    /// Parameter tensors in a fixed order: W1, b1, W2, b2.
    pub fn tensors(&self) -> [&[f64]; 4] {
        [self.w1.as_slice(), &self.b1, self.w2.as_slice(), &self.b2]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 4] {
        [
            self.w1.as_mut_slice(),
            &mut self.b1,
            self.w2.as_mut_slice(),
            &mut self.b2,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|x| x.is_finite()))
    }
}

/// Projects an averaged subword embedding into the shared `k`-dim space.
pub fn semantic_encode(embedding: &[f64], fc: &SharedFc) -> Result<Vec<f64>> {
    fc.forward(embedding)
}

/// Draws an inverted-dropout mask of length `len`.
pub fn dropout_mask<R: Rng>(len: usize, rate: f64, rng: &mut R) -> Vec<f64> {
    let keep = 1.0 - rate;
    (0..len)
        .map(|_| {
            if rng.gen::<f64>() < keep {
                1.0 / keep
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_weights_give_zero_output() {
        let fc = TwoLayerFc::zeros(3, 2);
        assert_eq!(semantic_encode(&[1., -2., 3.], &fc).unwrap(), vec![0., 0.]);
    }

    #[test]
    fn identity_weights_fix_the_origin() {
        let fc = TwoLayerFc {
            w1: Matrix::identity(3),
            b1: vec![0.; 3],
            w2: Matrix::identity(3),
            b2: vec![0.; 3],
        };
        assert_eq!(
            semantic_encode(&[0., 0., 0.], &fc).unwrap(),
            vec![0., 0., 0.]
        );
    }

    #[test]
    fn scalar_composition() {
        let fc = TwoLayerFc {
            w1: Matrix::from_vec(1, 1, vec![1.]),
            b1: vec![0.],
            w2: Matrix::from_vec(1, 1, vec![1.]),
            b2: vec![0.],
        };
        let out = semantic_encode(&[1.0], &fc).unwrap();
        assert!((out[0] - 1f64.tanh().tanh()).abs() < 1e-15);
        assert!((out[0] - 0.642015).abs() < 1e-6);
    }

    #[test]
    fn wrong_input_dimension() {
        let fc = TwoLayerFc::zeros(3, 2);
        assert!(semantic_encode(&[1.], &fc).is_err());
    }

    #[test]
    fn dropout_mask_values() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let m = dropout_mask(1000, 0.5, &mut rng);
        assert!(m.iter().all(|&x| x == 0.0 || x == 2.0));
        let kept = m.iter().filter(|&&x| x > 0.0).count();
        assert!((400..600).contains(&kept));
    }
}
