//! Per-triple scoring functions of the joint hierarchy/translation model and
//! their analytic gradients.
//!
//! Translation losses use the squared L2 residual `|h + r - t|^2`. Sphere
//! losses use the plain L2 distance. At a zero distance the norm has no
//! gradient; the subgradient 0 is used there.

use crate::error::{check_dim, Result};
use crate::tensor::{norm, sub};

/// `|h + r - t|^2`
pub fn translation_loss(head: &[f64], relation: &[f64], tail: &[f64]) -> Result<f64> {
    check_dim(head.len(), relation.len())?;
    check_dim(head.len(), tail.len())?;
    Ok(head
        .iter()
        .zip(relation)
        .zip(tail)
        .map(|((h, r), t)| {
            let d = h + r - t;
            d * d
        })
        .sum())
}

/// Loss of an instance-instance triple.
pub fn loss_instance_instance(vi: &[f64], vr: &[f64], vj: &[f64]) -> Result<f64> {
    translation_loss(vi, vr, vj)
}

/// Loss of an NHH instance-concept triple, against the concept node vector.
pub fn loss_nhh_instance_concept(vi: &[f64], vr: &[f64], vc: &[f64]) -> Result<f64> {
    translation_loss(vi, vr, vc)
}

/// Loss of an NHH concept-concept triple, between concept node vectors.
pub fn loss_nhh_concept_concept(vci: &[f64], vr: &[f64], vcj: &[f64]) -> Result<f64> {
    translation_loss(vci, vr, vcj)
}

/// `|v_i - p_c| - m_c`; negative when the instance sits inside the sphere.
pub fn loss_instance_of(vi: &[f64], center: &[f64], radius: f64) -> Result<f64> {
    check_dim(vi.len(), center.len())?;
    Ok(norm(&sub(vi, center)) - radius)
}

/// True when sphere `j` lies inside sphere `i`: `|p_i - p_j| + m_j <= m_i`.
pub fn sphere_contains(pi: &[f64], mi: f64, pj: &[f64], mj: f64) -> bool {
    norm(&sub(pi, pj)) + mj <= mi
}

/// Loss of a subClassOf triple `(i, subClassOf, j)`.
///
/// `m_i - m_j` when sphere `j` is inside sphere `i`, otherwise
/// `|p_i - p_j| + m_i - m_j`.
pub fn loss_subclass_of(pi: &[f64], mi: f64, pj: &[f64], mj: f64) -> Result<f64> {
    check_dim(pi.len(), pj.len())?;
    let d = norm(&sub(pi, pj));
    Ok(if d + mj <= mi { mi - mj } else { d + mi - mj })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationGrad {
    pub head: Vec<f64>,
    pub relation: Vec<f64>,
    pub tail: Vec<f64>,
}

pub fn translation_grad(
    head: &[f64],
    relation: &[f64],
    tail: &[f64],
) -> Result<(f64, TranslationGrad)> {
    check_dim(head.len(), relation.len())?;
    check_dim(head.len(), tail.len())?;
    let residual: Vec<f64> = head
        .iter()
        .zip(relation)
        .zip(tail)
        .map(|((h, r), t)| h + r - t)
        .collect();
    let value = residual.iter().map(|d| d * d).sum();
    let g: Vec<f64> = residual.iter().map(|d| 2.0 * d).collect();
    Ok((
        value,
        TranslationGrad {
            head: g.clone(),
            relation: g.clone(),
            tail: g.into_iter().map(|x| -x).collect(),
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOfGrad {
    pub instance: Vec<f64>,
    pub center: Vec<f64>,
    pub radius: f64,
}

pub fn instance_of_grad(vi: &[f64], center: &[f64], radius: f64) -> Result<(f64, InstanceOfGrad)> {
    check_dim(vi.len(), center.len())?;
    let diff = sub(vi, center);
    let d = norm(&diff);
    let unit: Vec<f64> = if d > 0.0 {
        diff.iter().map(|x| x / d).collect()
    } else {
        vec![0.0; diff.len()]
    };
    Ok((
        d - radius,
        InstanceOfGrad {
            center: unit.iter().map(|x| -x).collect(),
            instance: unit,
            radius: -1.0,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubclassGrad {
    pub head_center: Vec<f64>,
    pub head_radius: f64,
    pub tail_center: Vec<f64>,
    pub tail_radius: f64,
}

pub fn subclass_grad(pi: &[f64], mi: f64, pj: &[f64], mj: f64) -> Result<(f64, SubclassGrad)> {
    check_dim(pi.len(), pj.len())?;
    let diff = sub(pi, pj);
    let d = norm(&diff);
    if d + mj <= mi {
        return Ok((
            mi - mj,
            SubclassGrad {
                head_center: vec![0.0; pi.len()],
                head_radius: 1.0,
                tail_center: vec![0.0; pj.len()],
                tail_radius: -1.0,
            },
        ));
    }
    let unit: Vec<f64> = if d > 0.0 {
        diff.iter().map(|x| x / d).collect()
    } else {
        vec![0.0; diff.len()]
    };
    Ok((
        d + mi - mj,
        SubclassGrad {
            tail_center: unit.iter().map(|x| -x).collect(),
            head_center: unit,
            head_radius: 1.0,
            tail_radius: -1.0,
        },
    ))
}

/// Margin ranking term `[margin + pos - neg]_+`.
pub fn hinge(margin: f64, pos: f64, neg: f64) -> f64 {
    (margin + pos - neg).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn instance_instance_examples() {
        assert_eq!(
            loss_instance_instance(&[1., 0.], &[0., 1.], &[1., 1.]).unwrap(),
            0.0
        );
        assert_eq!(
            loss_instance_instance(&[0., 0.], &[0., 0.], &[3., 4.]).unwrap(),
            25.0
        );
        assert_eq!(
            loss_instance_instance(&[1., 2.], &[3., 4.], &[4., 7.]).unwrap(),
            1.0
        );
    }

    #[test]
    fn instance_of_examples() {
        assert_eq!(loss_instance_of(&[0., 0.], &[0., 0.], 0.5).unwrap(), -0.5);
        assert_eq!(loss_instance_of(&[3., 4.], &[0., 0.], 1.0).unwrap(), 4.0);
        assert_eq!(loss_instance_of(&[0., 1.], &[0., 0.], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn subclass_of_examples() {
        assert!((loss_subclass_of(&[0., 0.], 1.0, &[0., 0.], 0.3).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(
            loss_subclass_of(&[0., 0.], 1.0, &[3., 4.], 0.5).unwrap(),
            5.5
        );
        assert_eq!(
            loss_subclass_of(&[0., 0.], 0.5, &[0., 0.], 0.5).unwrap(),
            0.0
        );
    }

    #[test]
    fn nhh_examples() {
        assert_eq!(
            loss_nhh_instance_concept(&[1., 1.], &[0., 0.], &[1., 1.]).unwrap(),
            0.0
        );
        assert_eq!(
            loss_nhh_instance_concept(&[1., 0.], &[1., 0.], &[0., 0.]).unwrap(),
            4.0
        );
        assert_eq!(
            loss_nhh_instance_concept(&[0., 0.], &[1., 1.], &[1., 1.]).unwrap(),
            0.0
        );
        assert_eq!(
            loss_nhh_concept_concept(&[2., 0.], &[0., 0.], &[2., 0.]).unwrap(),
            0.0
        );
        assert_eq!(
            loss_nhh_concept_concept(&[0., 0.], &[0., 3.], &[4., 0.]).unwrap(),
            25.0
        );
        assert_eq!(
            loss_nhh_concept_concept(&[1., 1.], &[1., 1.], &[2., 2.]).unwrap(),
            0.0
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(
            loss_instance_instance(&[1.], &[1., 2.], &[0.]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(loss_instance_of(&[1.], &[1., 2.], 0.1).is_err());
        assert!(loss_subclass_of(&[1.], 0.1, &[1., 2.], 0.1).is_err());
    }

    #[test]
    fn gradients_report_the_same_value() {
        let (v, _) = translation_grad(&[1., 2.], &[3., 4.], &[4., 7.]).unwrap();
        assert_eq!(v, 1.0);
        let (v, _) = instance_of_grad(&[3., 4.], &[0., 0.], 1.0).unwrap();
        assert_eq!(v, 4.0);
        let (v, g) = subclass_grad(&[0., 0.], 1.0, &[3., 4.], 0.5).unwrap();
        assert_eq!(v, 5.5);
        assert_eq!(g.head_center, vec![-0.6, -0.8]);
    }

    #[test]
    fn hinge_clips_at_zero() {
        assert_eq!(hinge(1.0, 0.0, 5.0), 0.0);
        assert_eq!(hinge(1.0, 2.0, 1.0), 2.0);
    }
}
