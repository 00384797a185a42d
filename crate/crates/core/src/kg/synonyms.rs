use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::io::PairDataset;

use super::graph::{EntityId, KnowledgeGraph};

/// Gold synonym sets used to filter rankings during evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymIndex {
    by_mention: BTreeMap<String, BTreeSet<EntityId>>,
    co_synonyms: BTreeMap<EntityId, BTreeSet<EntityId>>,
}

static EMPTY: BTreeSet<EntityId> = BTreeSet::new();

/// Collects every gold entity of each mention across all splits, and the
/// entities that share at least one mention with each entity.
pub fn build_synonym_index(pairs: &PairDataset, kg: &KnowledgeGraph) -> Result<SynonymIndex> {
    let mut by_mention: BTreeMap<String, BTreeSet<EntityId>> = BTreeMap::new();
    for p in pairs.pairs() {
        if kg.entity(p.entity).is_none() {
            return Err(Error::UnknownEntity(format!("id {}", p.entity.0)));
        }
        by_mention
            .entry(p.mention.clone())
            .or_default()
            .insert(p.entity);
    }
    let mut co_synonyms: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
    for golds in by_mention.values() {
        for &e in golds {
            let entry = co_synonyms.entry(e).or_default();
            entry.extend(golds.iter().copied().filter(|&o| o != e));
        }
    }
    Ok(SynonymIndex {
        by_mention,
        co_synonyms,
    })
}

impl SynonymIndex {
    pub fn golds(&self, mention: &str) -> &BTreeSet<EntityId> {
        self.by_mention.get(mention).unwrap_or(&EMPTY)
    }

    pub fn co_synonyms(&self, entity: EntityId) -> &BTreeSet<EntityId> {
        self.co_synonyms.get(&entity).unwrap_or(&EMPTY)
    }

    /// Entities to drop from a ranking when scoring `gold` for `mention`:
    /// the mention's other gold entities.
    pub fn filter_for(&self, mention: &str, gold: EntityId) -> BTreeSet<EntityId> {
        self.golds(mention)
            .iter()
            .copied()
            .filter(|&e| e != gold)
            .collect()
    }

    pub fn num_mentions(&self) -> usize {
        self.by_mention.len()
    }
}
