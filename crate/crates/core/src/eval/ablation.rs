use log::info;
use serde::{Deserialize, Serialize};

use super::report::{evaluate, EvalReport, JaccardScorer, MatcherScorer};
use crate::error::Result;
use crate::io::{DataBundle, Split};
use crate::kg::build_synonym_index;
use crate::kge::{train_kge, EmbeddingStore, KgeConfig};
use crate::matcher::{train_matcher, FusionMode, MatcherConfig};

/// Model variants compared in an ablation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Full,
    /// Knowledge path removed: entities are encoded from their surface only.
    NoKnowledge,
    /// Knowledge embeddings trained with the translation losses only.
    NoHierarchy,
    DirectAddition,
    FcFusion,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Full,
        Variant::NoKnowledge,
        Variant::NoHierarchy,
        Variant::DirectAddition,
        Variant::FcFusion,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoKnowledge => "-KE",
            Variant::NoHierarchy => "-TransC",
            Variant::DirectAddition => "->DA",
            Variant::FcFusion => "->EF",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.label().eq_ignore_ascii_case(s) || v.key() == s)
    }

    fn key(self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::NoKnowledge => "no_knowledge",
            Variant::NoHierarchy => "no_hierarchy",
            Variant::DirectAddition => "direct_addition",
            Variant::FcFusion => "fc_fusion",
        }
    }

    fn apply(self, kge: &KgeConfig, matcher: &MatcherConfig) -> (KgeConfig, MatcherConfig) {
        let mut k = kge.clone();
        let mut m = matcher.clone();
        match self {
            Variant::Full => {}
            Variant::NoKnowledge => m.fusion_mode = FusionMode::NoKnowledge,
            Variant::NoHierarchy => k.hierarchy_losses = false,
            Variant::DirectAddition => m.fusion_mode = FusionMode::DirectAddition,
            Variant::FcFusion => m.fusion_mode = FusionMode::FcFusion,
        }
        (k, m)
    }
}

/// Trains every variant on the same bundle with the same seeds and
/// evaluates each on the test split. Knowledge embeddings are shared
/// between variants whose graph settings coincide.
pub fn run_ablation(
    bundle: &DataBundle,
    kge: &KgeConfig,
    matcher: &MatcherConfig,
    variants: &[Variant],
    ks: &[usize],
) -> Result<Vec<EvalReport>> {
    let syn = build_synonym_index(&bundle.pairs, &bundle.kg)?;
    let test = bundle.pairs.split_vec(Split::Test);
    let surfaces = bundle.surfaces();
    let mut stores: Vec<(KgeConfig, EmbeddingStore)> = Vec::new();
    let mut reports = Vec::with_capacity(variants.len());
    for &v in variants {
        let (kcfg, mcfg) = v.apply(kge, matcher);
        let store = match stores.iter().find(|(c, _)| *c == kcfg) {
            Some((_, s)) => s.clone(),
            None => {
                info!("training knowledge embeddings for {}", v.label());
                let s = train_kge(&bundle.kg, &kcfg)?;
                stores.push((kcfg.clone(), s.clone()));
                s
            }
        };
        info!("training matcher variant {}", v.label());
        let model = train_matcher(&bundle.kg, &store, &bundle.pairs, &bundle.corpus, &mcfg)?;
        let scorer = MatcherScorer::new(v.label(), &model)?;
        reports.push(evaluate(
            &scorer,
            &test,
            &syn,
            ks,
            &surfaces,
            mcfg.semantic.tokenizer,
        )?);
    }
    Ok(reports)
}

/// The surface-overlap baseline on the test split of a bundle.
pub fn jaccard_report(
    bundle: &DataBundle,
    ks: &[usize],
    mode: crate::semantic::TokenizerMode,
) -> Result<EvalReport> {
    let syn = build_synonym_index(&bundle.pairs, &bundle.kg)?;
    let surfaces = bundle.surfaces();
    let scorer = JaccardScorer::new(&surfaces, mode)?;
    evaluate(
        &scorer,
        &bundle.pairs.split_vec(Split::Test),
        &syn,
        ks,
        &surfaces,
        mode,
    )
}
