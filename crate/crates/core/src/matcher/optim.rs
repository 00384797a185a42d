/// Adam with bias-corrected first and second moments over a fixed list of
/// flat tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(learning_rate: f64, shapes: &[usize]) -> Self {
        Adam {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step: 0,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update. `frozen[i]` skips tensor `i` entirely, moments
    /// included.
    pub fn step(&mut self, params: &mut [&mut [f64]], grads: &[&[f64]], frozen: &[bool]) {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.step += 1;
        let t = self.step as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for (i, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            if frozen.get(i).copied().unwrap_or(false) {
                continue;
            }
            let (m, v) = (&mut self.m[i], &mut self.v[i]);
            for j in 0..p.len() {
                let gj = g[j];
                m[j] = self.beta1 * m[j] + (1.0 - self.beta1) * gj;
                v[j] = self.beta2 * v[j] + (1.0 - self.beta2) * gj * gj;
                let m_hat = m[j] / c1;
                let v_hat = v[j] / c2;
                p[j] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut opt = Adam::new(0.1, &[2]);
        let mut p = vec![1.0, -1.0];
        opt.step(&mut [&mut p], &[&[3.0, -0.5]], &[]);
        // With bias correction the first step is lr * g / (|g| + eps).
        assert!((p[0] - 0.9).abs() < 1e-8);
        assert!((p[1] + 0.9).abs() < 1e-8);
    }

    #[test]
    fn minimises_a_quadratic() {
        let mut opt = Adam::new(0.05, &[1]);
        let mut x = vec![5.0];
        for _ in 0..2000 {
            let g = vec![2.0 * (x[0] - 1.5)];
            opt.step(&mut [&mut x], &[&g], &[]);
        }
        assert!((x[0] - 1.5).abs() < 1e-3);
    }

    #[test]
    fn frozen_tensor_is_untouched() {
        let mut opt = Adam::new(0.1, &[1, 1]);
        let (mut a, mut b) = (vec![1.0], vec![1.0]);
        opt.step(&mut [&mut a, &mut b], &[&[1.0], &[1.0]], &[true, false]);
        assert_eq!(a[0], 1.0);
        assert!(b[0] < 1.0);
    }
}
