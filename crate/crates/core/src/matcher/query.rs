use crate::error::{Error, Result};
use crate::kg::EntityId;
use crate::tensor::{dot, Matrix};

use super::model::MatcherModel;

/// Read-only cache of every entity encoding of a frozen model.
#[derive(Debug, Clone, PartialEq)]
pub struct MatcherIndex {
    encodings: Matrix,
}

impl MatcherIndex {
    pub fn build(model: &MatcherModel) -> Result<Self> {
        Ok(MatcherIndex {
            encodings: model.encode_all_entities()?,
        })
    }

    pub fn encodings(&self) -> &Matrix {
        &self.encodings
    }

    pub fn num_entities(&self) -> usize {
        self.encodings.rows()
    }

    /// Score of the mention against every entity, indexed by entity id.
    pub fn score_all(&self, model: &MatcherModel, mention: &str) -> Result<Vec<f64>> {
        let q = model.encode_mention(mention)?;
        Ok((0..self.encodings.rows())
            .map(|r| dot(&q, self.encodings.row(r)))
            .collect())
    }

    pub fn top_k(
        &self,
        model: &MatcherModel,
        mention: &str,
        k: usize,
        candidates: &[EntityId],
    ) -> Result<Vec<(EntityId, f64)>> {
        if candidates.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        if k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        let q = model.encode_mention(mention)?;
        let mut scored = candidates
            .iter()
            .map(|&id| {
                if id.index() >= self.encodings.rows() {
                    return Err(Error::UnknownEntity(format!("id {}", id.0)));
                }
                Ok((id, dot(&q, self.encodings.row(id.index()))))
            })
            .collect::<Result<Vec<_>>>()?;
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }
}

/// Ranks `candidates` for a mention in evaluation mode: score descending,
/// ties by ascending id, first `k` kept.
pub fn query_top_k(
    mention: &str,
    k: usize,
    model: &MatcherModel,
    candidates: &[EntityId],
) -> Result<Vec<(EntityId, f64)>> {
    MatcherIndex::build(model)?.top_k(model, mention, k, candidates)
}
