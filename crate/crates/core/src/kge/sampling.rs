use rand::Rng;

use crate::error::{Error, Result};
use crate::kg::{EntityId, KnowledgeGraph, Triple};

/// Resampling budget per side before giving up.
pub const MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Head,
    Tail,
}

/// Corrupts `t` by replacing its head or tail (chosen uniformly) with a
/// uniformly drawn entity of the same kind, resampling until the result is
/// not a true triple of the same subset.
///
/// When the chosen side has no alternative entity of that kind, or its
/// budget runs out, the other side is tried before reporting
/// [`Error::ExhaustedCandidates`].
pub fn sample_negative_triple<R: Rng>(
    t: &Triple,
    kg: &KnowledgeGraph,
    rng: &mut R,
) -> Result<Triple> {
    let first = if rng.gen_bool(0.5) {
        Side::Head
    } else {
        Side::Tail
    };
    let second = match first {
        Side::Head => Side::Tail,
        Side::Tail => Side::Head,
    };
    for side in [first, second] {
        if let Some(neg) = corrupt_side(t, kg, side, rng) {
            return Ok(neg);
        }
    }
    Err(Error::ExhaustedCandidates(2 * MAX_RESAMPLES))
}

fn corrupt_side<R: Rng>(
    t: &Triple,
    kg: &KnowledgeGraph,
    side: Side,
    rng: &mut R,
) -> Option<Triple> {
    let (head_kind, tail_kind) = t.subset.endpoint_kinds();
    let pool = match side {
        Side::Head => kg.of_kind(head_kind),
        Side::Tail => kg.of_kind(tail_kind),
    };
    if pool.len() < 2 {
        return None;
    }
    for _ in 0..MAX_RESAMPLES {
        let pick: EntityId = pool[rng.gen_range(0..pool.len())];
        let neg = match side {
            Side::Head => Triple { head: pick, ..*t },
            Side::Tail => Triple { tail: pick, ..*t },
        };
        if !kg.contains(t.subset, neg.head, neg.relation, neg.tail) {
            return Some(neg);
        }
    }
    None
}
