/// `-log(exp(pos) / (exp(pos) + sum_j exp(neg_j)))`, evaluated with a
/// max shift. Exactly zero when there are no negatives.
pub fn nce_loss(pos: f64, negs: &[f64]) -> f64 {
    let max = negs.iter().copied().fold(pos, f64::max);
    let total: f64 = (pos - max).exp() + negs.iter().map(|&s| (s - max).exp()).sum::<f64>();
    (max - pos) + total.ln()
}

/// Loss plus its derivatives with respect to the positive and each negative
/// score.
pub fn nce_grad(pos: f64, negs: &[f64]) -> (f64, f64, Vec<f64>) {
    let max = negs.iter().copied().fold(pos, f64::max);
    let e_pos = (pos - max).exp();
    let e_negs: Vec<f64> = negs.iter().map(|&s| (s - max).exp()).collect();
    let total = e_pos + e_negs.iter().sum::<f64>();
    let loss = (max - pos) + total.ln();
    let d_pos = e_pos / total - 1.0;
    let d_negs = e_negs.into_iter().map(|e| e / total).collect();
    (loss, d_pos, d_negs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_negatives_is_zero() {
        assert_eq!(nce_loss(3.7, &[]), 0.0);
        assert_eq!(nce_loss(-1e300, &[]), 0.0);
    }

    #[test]
    fn symmetric_case_is_ln2() {
        for s in [-50.0, 0.0, 1.0, 1e6] {
            assert!((nce_loss(s, &[s]) - std::f64::consts::LN_2).abs() <= 1e-12);
        }
    }

    #[test]
    fn one_against_zero() {
        let expected = (1.0 + (-1f64).exp()).ln();
        assert!((nce_loss(1.0, &[0.0]) - expected).abs() < 1e-15);
        assert!((nce_loss(1.0, &[0.0]) - 0.313262).abs() < 1e-6);
    }

    #[test]
    fn large_scores_do_not_overflow() {
        let l = nce_loss(1000.0, &[999.0, 998.0]);
        assert!(l.is_finite() && l > 0.0);
    }

    #[test]
    fn grad_matches_loss() {
        let (l, dp, dn) = nce_grad(0.3, &[0.1, -0.4]);
        assert_eq!(l, nce_loss(0.3, &[0.1, -0.4]));
        assert!((dp + dn.iter().sum::<f64>()).abs() < 1e-15);
    }
}
