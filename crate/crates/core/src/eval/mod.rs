//! Filtered hits@k, Regular/Difficult case split, the surface-overlap
//! baseline and ablation runs.

mod ablation;
mod hits;
mod report;
mod surface;

pub use ablation::{jaccard_report, run_ablation, Variant};
pub use hits::{filtered_hits_at_k, filtered_rank, rank_by_score, rank_for_gold};
pub use report::{
    evaluate, reports_to_tsv, tsv_header, tsv_row, EvalReport, Group, GroupReport, JaccardScorer,
    MatcherScorer, Scorer, DEFAULT_KS,
};
pub use surface::{
    classify_case, jaccard_sets, jaccard_similarity, split_cases, subword_set, Case,
};
