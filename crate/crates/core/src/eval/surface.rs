use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::Pair;
use crate::semantic::{tokenize, TokenizerMode};

/// Whether a test pair shares at least one subword between mention and
/// entity surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    Regular,
    Difficult,
}

pub fn subword_set(surface: &str, mode: TokenizerMode) -> Result<BTreeSet<String>> {
    Ok(tokenize(surface, mode)?.into_iter().collect())
}

pub fn classify_case(mention: &str, entity_surface: &str, mode: TokenizerMode) -> Result<Case> {
    let q = subword_set(mention, mode)?;
    let t = subword_set(entity_surface, mode)?;
    Ok(if q.intersection(&t).next().is_some() {
        Case::Regular
    } else {
        Case::Difficult
    })
}

/// Partitions pairs into Regular and Difficult cases. `surfaces` is indexed
/// by entity id.
pub fn split_cases(
    pairs: &[Pair],
    surfaces: &[String],
    mode: TokenizerMode,
) -> Result<(Vec<Pair>, Vec<Pair>)> {
    let mut regular = Vec::new();
    let mut difficult = Vec::new();
    for p in pairs {
        let surface = surfaces
            .get(p.entity.index())
            .ok_or_else(|| Error::UnknownEntity(format!("id {}", p.entity.0)))?;
        match classify_case(&p.mention, surface, mode)? {
            Case::Regular => regular.push(p.clone()),
            Case::Difficult => difficult.push(p.clone()),
        }
    }
    Ok((regular, difficult))
}

/// `|A ∩ B| / |A ∪ B|` over subword sets.
pub fn jaccard_similarity(q: &str, t: &str, mode: TokenizerMode) -> Result<f64> {
    let a = subword_set(q, mode)?;
    let b = subword_set(t, mode)?;
    Ok(jaccard_sets(&a, &b))
}

pub fn jaccard_sets(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::Split;
    use crate::kg::EntityId;

    #[test]
    fn shared_word_is_regular() {
        assert_eq!(
            classify_case(
                "lung calcification",
                "lung mineralization",
                TokenizerMode::LetterTrigram
            )
            .unwrap(),
            Case::Regular
        );
        assert_eq!(
            classify_case(
                "lung calcification",
                "lung mineralization",
                TokenizerMode::Auto
            )
            .unwrap(),
            Case::Regular
        );
    }

    #[test]
    fn no_shared_character_is_difficult() {
        assert_eq!(
            classify_case("歪嘴风", "面瘫", TokenizerMode::UnicodeChar).unwrap(),
            Case::Difficult
        );
        assert_eq!(
            classify_case("歪嘴风", "面瘫", TokenizerMode::Auto).unwrap(),
            Case::Difficult
        );
    }

    #[test]
    fn identical_surfaces_are_regular() {
        assert_eq!(
            classify_case("面瘫", "面瘫", TokenizerMode::Auto).unwrap(),
            Case::Regular
        );
    }

    #[test]
    fn split_is_a_partition() {
        let surfaces = vec!["面瘫".to_string(), "肚子痛".to_string()];
        let pairs = vec![
            Pair::new("歪嘴风", EntityId(0), Split::Test),
            Pair::new("肚子疼", EntityId(1), Split::Test),
            Pair::new("面瘫", EntityId(0), Split::Test),
        ];
        let (r, d) = split_cases(&pairs, &surfaces, TokenizerMode::UnicodeChar).unwrap();
        assert_eq!(r.len() + d.len(), pairs.len());
        assert_eq!(d.len(), 1);
        assert!(split_cases(
            &[Pair::new("x", EntityId(5), Split::Test)],
            &surfaces,
            TokenizerMode::Auto
        )
        .is_err());
    }

    #[test]
    fn jaccard_examples() {
        let m = TokenizerMode::UnicodeChar;
        assert!((jaccard_similarity("ab", "bc", m).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(jaccard_similarity("abc", "abc", m).unwrap(), 1.0);
        assert_eq!(jaccard_similarity("ab", "cd", m).unwrap(), 0.0);
        assert!(jaccard_similarity("", "cd", m).is_err());
    }
}
