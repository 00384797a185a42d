//! Knowledge transform, gated fusion, NCE training and ranking.

mod fusion;
mod model;
mod nce;
mod optim;
mod query;
mod train;

pub use fusion::{
    fuse, fuse_backward, fuse_forward, gate_backward, gate_features, gate_forward, transform_gate,
    transform_gate_with, FuseTrace, FusionGrads, FusionMode, FusionParams, GateActivation,
    GateParams, GateTrace,
};
pub use model::{
    encode_entity, example_loss_and_grad, parameter_tensors_mut, score, EntityCatalog, Example,
    ExampleMasks, KnowledgeFc, MatcherGrads, MatcherModel,
};
pub use nce::{nce_grad, nce_loss};
pub use optim::Adam;
pub use query::{query_top_k, MatcherIndex};
pub use train::{
    build_matcher, knowledge_transform, sample_negative_entities, train_matcher,
    train_matcher_traced, MatcherConfig, MatcherTrace, NegativeDraw, SemanticConfig,
};
