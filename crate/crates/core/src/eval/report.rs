use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::hits::{filtered_rank, rank_for_gold};
use super::surface::{classify_case, jaccard_sets, subword_set, Case};
use crate::error::{check_dim, Result};
use crate::io::Pair;
use crate::kg::{EntityId, SynonymIndex};
use crate::matcher::{MatcherIndex, MatcherModel};
use crate::semantic::TokenizerMode;

pub const DEFAULT_KS: [usize; 3] = [3, 5, 10];

/// Anything that scores a mention against the whole entity universe.
pub trait Scorer: Sync {
    fn name(&self) -> &str;
    /// One score per entity, indexed by entity id.
    fn score_all(&self, mention: &str) -> Result<Vec<f64>>;
}

/// Subword-set Jaccard overlap between mention and entity surface.
#[derive(Debug, Clone)]
pub struct JaccardScorer {
    mode: TokenizerMode,
    entity_sets: Vec<BTreeSet<String>>,
}

impl JaccardScorer {
    pub fn new(surfaces: &[String], mode: TokenizerMode) -> Result<Self> {
        let entity_sets = surfaces
            .iter()
            .map(|s| subword_set(s, mode))
            .collect::<Result<_>>()?;
        Ok(JaccardScorer { mode, entity_sets })
    }
}

impl Scorer for JaccardScorer {
    fn name(&self) -> &str {
        "JACCARD"
    }

    fn score_all(&self, mention: &str) -> Result<Vec<f64>> {
        let q = subword_set(mention, self.mode)?;
        Ok(self
            .entity_sets
            .iter()
            .map(|t| jaccard_sets(&q, t))
            .collect())
    }
}

/// A trained matcher with its entity encodings cached.
pub struct MatcherScorer<'a> {
    name: String,
    model: &'a MatcherModel,
    index: MatcherIndex,
}

impl<'a> MatcherScorer<'a> {
    pub fn new(name: impl Into<String>, model: &'a MatcherModel) -> Result<Self> {
        Ok(MatcherScorer {
            name: name.into(),
            model,
            index: MatcherIndex::build(model)?,
        })
    }
}

impl Scorer for MatcherScorer<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn score_all(&self, mention: &str) -> Result<Vec<f64>> {
        self.index.score_all(self.model, mention)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    All,
    Regular,
    Difficult,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::All, Group::Regular, Group::Difficult];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::All => "all",
            Group::Regular => "regular",
            Group::Difficult => "difficult",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub group: Group,
    pub count: usize,
    /// Hit ratio per entry of [`EvalReport::ks`]; zero for an empty group.
    pub hits: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: String,
    pub ks: Vec<usize>,
    pub groups: Vec<GroupReport>,
    pub fingerprint: String,
}

impl EvalReport {
    pub fn group(&self, g: Group) -> &GroupReport {
        self.groups
            .iter()
            .find(|r| r.group == g)
            .expect("every group is reported")
    }

    pub fn hits(&self, g: Group, k: usize) -> Option<f64> {
        let pos = self.ks.iter().position(|&x| x == k)?;
        Some(self.group(g).hits[pos])
    }

    pub fn with_fingerprint(mut self, fingerprint: impl Into<String>) -> Self {
        self.fingerprint = fingerprint.into();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Column header shared by every row of [`reports_to_tsv`]: one column per
/// `(k, group)` followed by the group counts.
pub fn tsv_header(ks: &[usize]) -> String {
    let mut s = String::from("method");
    for k in ks {
        for g in Group::ALL {
            let _ = write!(s, "\thits@{k}/{}", g.as_str());
        }
    }
    for g in Group::ALL {
        let _ = write!(s, "\tn/{}", g.as_str());
    }
    s
}

pub fn tsv_row(r: &EvalReport) -> String {
    let mut s = r.method.clone();
    for i in 0..r.ks.len() {
        for g in Group::ALL {
            let _ = write!(s, "\t{:.4}", r.group(g).hits[i]);
        }
    }
    for g in Group::ALL {
        let _ = write!(s, "\t{}", r.group(g).count);
    }
    s
}

/// Header plus one row per report. All reports must share `ks`.
pub fn reports_to_tsv(reports: &[EvalReport]) -> String {
    let ks = reports
        .first()
        .map(|r| r.ks.clone())
        .unwrap_or_else(|| DEFAULT_KS.to_vec());
    let mut out = tsv_header(&ks);
    out.push('\n');
    for r in reports {
        out.push_str(&tsv_row(r));
        out.push('\n');
    }
    out
}

struct Outcome {
    case: Case,
    rank: usize,
}

fn score_pair(
    scorer: &dyn Scorer,
    pair: &Pair,
    ids: &[EntityId],
    surfaces: &[String],
    syn: &SynonymIndex,
    mode: TokenizerMode,
) -> Result<Outcome> {
    let surface = surfaces
        .get(pair.entity.index())
        .ok_or_else(|| crate::Error::UnknownEntity(format!("id {}", pair.entity.0)))?;
    let case = classify_case(&pair.mention, surface, mode)?;
    let scores = scorer.score_all(&pair.mention)?;
    check_dim(ids.len(), scores.len())?;
    let ranking = rank_for_gold(ids, &scores, pair.entity);
    let rank = filtered_rank(
        &ranking,
        pair.entity,
        &syn.filter_for(&pair.mention, pair.entity),
    )?;
    Ok(Outcome { case, rank })
}

/// Ranks the full entity universe for every pair, filters the mention's
/// other golds and aggregates hits@k by All, Regular and Difficult. Pairs
/// are scored on worker threads; the reduction runs in input order.
pub fn evaluate(
    scorer: &dyn Scorer,
    pairs: &[Pair],
    syn: &SynonymIndex,
    ks: &[usize],
    surfaces: &[String],
    mode: TokenizerMode,
) -> Result<EvalReport> {
    let ids: Vec<EntityId> = (0..surfaces.len() as u32).map(EntityId).collect();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(8);
    let chunk = pairs.len().div_ceil(workers).max(1);
    let outcomes: Vec<Result<Vec<Outcome>>> = std::thread::scope(|s| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .map(|part| {
                let ids = &ids;
                s.spawn(move || {
                    part.iter()
                        .map(|p| score_pair(scorer, p, ids, surfaces, syn, mode))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("evaluation worker panicked"))
            .collect()
    });

    let mut counts = [0usize; 3];
    let mut hit_counts = vec![[0usize; 3]; ks.len()];
    for part in outcomes {
        for o in part? {
            let gi = match o.case {
                Case::Regular => 1,
                Case::Difficult => 2,
            };
            counts[0] += 1;
            counts[gi] += 1;
            for (ki, &k) in ks.iter().enumerate() {
                if o.rank <= k {
                    hit_counts[ki][0] += 1;
                    hit_counts[ki][gi] += 1;
                }
            }
        }
    }
    let groups = Group::ALL
        .iter()
        .enumerate()
        .map(|(gi, &group)| GroupReport {
            group,
            count: counts[gi],
            hits: (0..ks.len())
                .map(|ki| {
                    if counts[gi] == 0 {
                        0.0
                    } else {
                        hit_counts[ki][gi] as f64 / counts[gi] as f64
                    }
                })
                .collect(),
        })
        .collect();
    Ok(EvalReport {
        method: scorer.name().to_string(),
        ks: ks.to_vec(),
        groups,
        fingerprint: String::new(),
    })
}
