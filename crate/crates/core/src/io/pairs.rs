use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kg::EntityId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "train" => Some(Split::Train),
            "dev" => Some(Split::Dev),
            "test" => Some(Split::Test),
            _ => None,
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One annotated mention-entity synonym pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pair {
    pub mention: String,
    pub entity: EntityId,
    pub split: Split,
}

impl Pair {
    pub fn new(mention: impl Into<String>, entity: EntityId, split: Split) -> Self {
        Pair {
            mention: mention.into(),
            entity,
            split,
        }
    }
}

/// Annotated pairs with their train/dev/test tags. Rows are unique per
/// `(mention, entity, split)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairDataset {
    pairs: Vec<Pair>,
}

impl PairDataset {
    pub fn new(pairs: Vec<Pair>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for p in &pairs {
            if !seen.insert((p.mention.as_str(), p.entity, p.split)) {
                return Err(Error::Parse {
                    path: "<pairs>".into(),
                    line: 0,
                    msg: format!(
                        "duplicate pair ({}, {}, {})",
                        p.mention, p.entity.0, p.split
                    ),
                });
            }
        }
        Ok(PairDataset { pairs })
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &Pair> + '_ {
        self.pairs.iter().filter(move |p| p.split == split)
    }

    pub fn split_vec(&self, split: Split) -> Vec<Pair> {
        self.split(split).cloned().collect()
    }

    pub fn count(&self, split: Split) -> usize {
        self.split(split).count()
    }
}
