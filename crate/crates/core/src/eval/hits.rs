use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::kg::EntityId;

/// 1-based position of `gold` after removing `filter` members from the
/// ranking.
pub fn filtered_rank(
    ranking: &[EntityId],
    gold: EntityId,
    filter: &BTreeSet<EntityId>,
) -> Result<usize> {
    let mut rank = 0;
    for &e in ranking {
        if e == gold {
            return Ok(rank + 1);
        }
        if !filter.contains(&e) {
            rank += 1;
        }
    }
    Err(Error::GoldMissing)
}

/// Whether `gold` lands in the top `k` once the filter set is removed.
pub fn filtered_hits_at_k(
    ranking: &[EntityId],
    gold: EntityId,
    filter: &BTreeSet<EntityId>,
    k: usize,
) -> Result<bool> {
    Ok(filtered_rank(ranking, gold, filter)? <= k)
}

/// Orders entity ids by descending score, ties by ascending id.
pub fn rank_by_score(ids: &[EntityId], scores: &[f64]) -> Vec<EntityId> {
    debug_assert_eq!(ids.len(), scores.len());
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(ids[a].cmp(&ids[b])));
    order.into_iter().map(|i| ids[i]).collect()
}

/// Ranking used for evaluation: like [`rank_by_score`], except that `gold`
/// is placed after every entity with the same score. A scorer that cannot
/// separate the gold from its competitors gets no credit for the tie.
pub fn rank_for_gold(ids: &[EntityId], scores: &[f64], gold: EntityId) -> Vec<EntityId> {
    debug_assert_eq!(ids.len(), scores.len());
    let mut order: Vec<usize> = (0..ids.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then((ids[a] == gold).cmp(&(ids[b] == gold)))
            .then(ids[a].cmp(&ids[b]))
    });
    order.into_iter().map(|i| ids[i]).collect()
}
