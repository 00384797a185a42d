use std::collections::BTreeSet;

use log::{debug, info, warn};
use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fusion::{FusionMode, FusionParams, GateActivation};
use super::model::{
    example_loss_and_grad, parameter_tensors_mut, EntityCatalog, Example, ExampleMasks,
    KnowledgeFc, MatcherGrads, MatcherModel,
};
use super::optim::Adam;
use super::query::MatcherIndex;
use crate::error::{Error, Result};
use crate::eval::{filtered_hits_at_k, rank_for_gold};
use crate::io::{Pair, PairDataset, Split};
use crate::kg::{build_synonym_index, EntityId, KnowledgeGraph, SynonymIndex};
use crate::kge::EmbeddingStore;
use crate::semantic::{
    build_vocab, dropout_mask, encode_corpus, pretrain_subword_embeddings, SemanticTable,
    SkipGramConfig, TokenizerMode, TwoLayerFc,
};

const INIT_STREAM: u64 = 0x6d61_7463_6869_6e69;
const TRAIN_STREAM: u64 = 0x6d61_7463_6874_726e;
const PRETRAIN_STREAM: u64 = 0x7072_6574_7261_696e;

/// Surface-encoder settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemanticConfig {
    /// Subword embedding dimension `d`.
    pub dim: usize,
    /// Shared space dimension `k`.
    pub k: usize,
    pub tokenizer: TokenizerMode,
    /// Initialise the subword table with skip-gram on the corpus when one
    /// is available.
    pub pretrain: bool,
    pub skipgram: SkipGramConfig,
    /// Keep the subword table fixed during matcher training.
    pub freeze_table: bool,
}

impl Default for SemanticConfig {
    fn default() -> Self {
        SemanticConfig {
            dim: 500,
            k: 300,
            tokenizer: TokenizerMode::Auto,
            pretrain: true,
            skipgram: SkipGramConfig::default(),
            freeze_table: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatcherConfig {
    /// Negative entities per training pair (`N_i`).
    pub negatives: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    /// Epochs without a dev hits@k improvement before stopping.
    pub patience: usize,
    pub max_epochs: usize,
    /// Cut-off used for the early-stopping metric.
    pub dev_k: usize,
    pub seed: u64,
    pub fusion_mode: FusionMode,
    pub gate_activation: GateActivation,
    pub semantic: SemanticConfig,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig {
            negatives: 200,
            batch_size: 32,
            learning_rate: 0.001,
            dropout: 0.5,
            patience: 10,
            max_epochs: 50,
            dev_k: 3,
            seed: 0,
            fusion_mode: FusionMode::Gate,
            gate_activation: GateActivation::Softmax,
            semantic: SemanticConfig::default(),
        }
    }
}

impl MatcherConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!(
                "dropout {} outside [0, 1)",
                self.dropout
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.semantic.dim == 0 || self.semantic.k == 0 {
            return Err(Error::Config("semantic dimensions must be positive".into()));
        }
        if self.dev_k == 0 {
            return Err(Error::Config("dev_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// `tanh(W4 tanh(W3 e + b3) + b4)`.
pub fn knowledge_transform(e_t: &[f64], fc: &KnowledgeFc) -> Result<Vec<f64>> {
    fc.forward(e_t)
}

/// Negative entities for one mention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeDraw {
    pub ids: Vec<EntityId>,
    /// Set when fewer than the requested number of distinct non-gold
    /// entities exist, so draws were made with replacement.
    pub with_replacement: bool,
}

/// Draws `n` entities uniformly from `universe` minus every gold synonym of
/// `mention`. Draws are distinct whenever enough candidates exist.
pub fn sample_negative_entities<R: Rng>(
    mention: &str,
    universe: &[EntityId],
    syn: &SynonymIndex,
    n: usize,
    rng: &mut R,
) -> NegativeDraw {
    sample_excluding(syn.golds(mention), universe, n, rng)
}

fn sample_excluding<R: Rng>(
    golds: &BTreeSet<EntityId>,
    universe: &[EntityId],
    n: usize,
    rng: &mut R,
) -> NegativeDraw {
    if n == 0 {
        return NegativeDraw {
            ids: Vec::new(),
            with_replacement: false,
        };
    }
    let pool: Vec<EntityId> = universe
        .iter()
        .copied()
        .filter(|e| !golds.contains(e))
        .collect();
    if pool.len() >= n {
        let ids = index::sample(rng, pool.len(), n)
            .into_iter()
            .map(|i| pool[i])
            .collect();
        return NegativeDraw {
            ids,
            with_replacement: false,
        };
    }
    let ids = if pool.is_empty() {
        Vec::new()
    } else {
        (0..n).map(|_| pool[rng.gen_range(0..pool.len())]).collect()
    };
    NegativeDraw {
        ids,
        with_replacement: true,
    }
}

/// Builds an untrained model: vocabulary over entity surfaces, training
/// mentions and the corpus, a subword table (skip-gram initialised when
/// configured and a corpus exists) and freshly initialised FC, gate and
/// fusion weights. Knowledge embeddings are copied from `store`.
pub fn build_matcher(
    kg: &KnowledgeGraph,
    store: &EmbeddingStore,
    dataset: &PairDataset,
    corpus: &[String],
    cfg: &MatcherConfig,
) -> Result<MatcherModel> {
    cfg.validate()?;
    store.check_covers(kg)?;
    let sc = &cfg.semantic;
    let surfaces: Vec<String> = kg.entities().iter().map(|e| e.surface.clone()).collect();
    let vocab = build_vocab(
        surfaces
            .iter()
            .map(String::as_str)
            .chain(dataset.split(Split::Train).map(|p| p.mention.as_str()))
            .chain(corpus.iter().map(String::as_str)),
        sc.tokenizer,
    )?;
    let table_seed = cfg.seed ^ PRETRAIN_STREAM;
    let table = if sc.pretrain && !corpus.is_empty() {
        let encoded = encode_corpus(corpus, &vocab);
        match pretrain_subword_embeddings(&encoded, vocab.len(), sc.dim, &sc.skipgram, table_seed) {
            Ok(t) => t,
            Err(Error::EmptyCorpus) => {
                warn!("corpus has no usable subwords; using random subword table");
                SemanticTable::random(vocab.len(), sc.dim, table_seed)
            }
            Err(e) => return Err(e),
        }
    } else {
        SemanticTable::random(vocab.len(), sc.dim, table_seed)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ INIT_STREAM);
    let semantic_fc = TwoLayerFc::glorot(sc.dim, sc.k, &mut rng);
    let knowledge_fc = TwoLayerFc::glorot(store.dim(), sc.k, &mut rng);
    let fusion = FusionParams::glorot(sc.k, cfg.gate_activation, &mut rng);
    let knowledge = store.entity_matrix(kg)?;
    let entities = EntityCatalog {
        surfaces,
        kinds: kg.entities().iter().map(|e| e.kind).collect(),
    };
    MatcherModel::new(
        vocab,
        table,
        semantic_fc,
        knowledge_fc,
        fusion,
        cfg.fusion_mode,
        knowledge,
        entities,
    )
}

/// Per-epoch record of a matcher run. Index 0 of `dev_hits` is the
/// untrained model.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MatcherTrace {
    pub epoch_losses: Vec<f64>,
    pub dev_hits: Vec<f64>,
    pub best_epoch: usize,
    pub flagged_draws: usize,
}

/// Filtered hits@k of the model over `pairs`, or `None` when there are no
/// pairs.
pub(crate) fn model_hits_at_k(
    model: &MatcherModel,
    pairs: &[Pair],
    syn: &SynonymIndex,
    k: usize,
) -> Result<Option<f64>> {
    if pairs.is_empty() {
        return Ok(None);
    }
    let index = MatcherIndex::build(model)?;
    let ids = model.entities.ids();
    let mut hits = 0usize;
    for p in pairs {
        let scores = index.score_all(model, &p.mention)?;
        let ranking = rank_for_gold(&ids, &scores, p.entity);
        if filtered_hits_at_k(&ranking, p.entity, &syn.filter_for(&p.mention, p.entity), k)? {
            hits += 1;
        }
    }
    Ok(Some(hits as f64 / pairs.len() as f64))
}

pub fn train_matcher(
    kg: &KnowledgeGraph,
    store: &EmbeddingStore,
    dataset: &PairDataset,
    corpus: &[String],
    cfg: &MatcherConfig,
) -> Result<MatcherModel> {
    train_matcher_traced(kg, store, dataset, corpus, cfg).map(|(m, _)| m)
}

/// Trains the matcher with NCE over sampled negatives and Adam on
/// mini-batch averaged gradients. Returns the snapshot with the best dev
/// hits@k (the untrained model counts as epoch 0). Without a dev split the
/// final epoch is returned.
pub fn train_matcher_traced(
    kg: &KnowledgeGraph,
    store: &EmbeddingStore,
    dataset: &PairDataset,
    corpus: &[String],
    cfg: &MatcherConfig,
) -> Result<(MatcherModel, MatcherTrace)> {
    let train = dataset.split_vec(Split::Train);
    if train.is_empty() {
        return Err(Error::EmptySplit("train".into()));
    }
    let dev = dataset.split_vec(Split::Dev);
    if dev.is_empty() {
        warn!("no dev pairs; early stopping disabled");
    }
    let mut model = build_matcher(kg, store, dataset, corpus, cfg)?;
    let full_index = build_synonym_index(dataset, kg)?;
    let train_index = build_synonym_index(&PairDataset::new(train.clone())?, kg)?;

    let mention_ids: Vec<Vec<usize>> = train
        .iter()
        .map(|p| model.vocab.ids(&p.mention))
        .collect::<Result<_>>()?;
    let universe = model.entities.ids();
    let k = model.k();

    let mut grads = MatcherGrads::zeros_like(&model);
    let shapes: Vec<usize> = grads.tensors().iter().map(|t| t.len()).collect();
    let mut frozen = vec![false; shapes.len()];
    frozen[0] = cfg.semantic.freeze_table;
    if !cfg.fusion_mode.uses_knowledge() {
        // Knowledge FC, gate and fusion weights receive no gradient.
        for f in frozen.iter_mut().skip(5) {
            *f = true;
        }
    }
    let mut adam = Adam::new(cfg.learning_rate, &shapes);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ TRAIN_STREAM);

    let mut trace = MatcherTrace::default();
    let mut best = model.clone();
    let mut best_dev = model_hits_at_k(&model, &dev, &full_index, cfg.dev_k)?;
    if let Some(h) = best_dev {
        trace.dev_hits.push(h);
        info!("epoch 0 dev hits@{} = {:.4}", cfg.dev_k, h);
    }
    let mut stale = 0usize;
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            for &i in batch {
                let pair = &train[i];
                let draw = sample_excluding(
                    train_index.golds(&pair.mention),
                    &universe,
                    cfg.negatives,
                    &mut rng,
                );
                if draw.with_replacement {
                    trace.flagged_draws += 1;
                }
                let masks = if cfg.dropout > 0.0 {
                    ExampleMasks {
                        semantic: Some(dropout_mask(k, cfg.dropout, &mut rng)),
                        knowledge: Some(dropout_mask(k, cfg.dropout, &mut rng)),
                    }
                } else {
                    ExampleMasks::default()
                };
                let ex = Example {
                    mention: &mention_ids[i],
                    positive: pair.entity,
                    negatives: &draw.ids,
                };
                let loss = example_loss_and_grad(&model, &ex, &masks, &mut grads)?;
                if !loss.is_finite() {
                    return Err(Error::NonFiniteLoss(format!(
                        "matcher epoch {epoch}, mention {:?}",
                        pair.mention
                    )));
                }
                epoch_loss += loss;
            }
            grads.scale(1.0 / batch.len() as f64);
            let g = grads.tensors();
            adam.step(&mut parameter_tensors_mut(&mut model), &g, &frozen);
        }
        if !model.is_finite() {
            return Err(Error::NonFiniteLoss(format!(
                "matcher parameters after epoch {epoch}"
            )));
        }
        let mean_loss = epoch_loss / train.len() as f64;
        trace.epoch_losses.push(mean_loss);
        debug!("epoch {epoch} mean NCE loss {mean_loss:.6}");

        match (
            model_hits_at_k(&model, &dev, &full_index, cfg.dev_k)?,
            best_dev,
        ) {
            (Some(h), Some(b)) => {
                trace.dev_hits.push(h);
                info!(
                    "epoch {epoch} dev hits@{} = {:.4} (loss {:.4})",
                    cfg.dev_k, h, mean_loss
                );
                if h > b {
                    best_dev = Some(h);
                    best = model.clone();
                    trace.best_epoch = epoch;
                    stale = 0;
                } else {
                    stale += 1;
                    if stale >= cfg.patience {
                        info!(
                            "early stop after epoch {epoch}; best epoch {}",
                            trace.best_epoch
                        );
                        break;
                    }
                }
            }
            _ => {
                best = model.clone();
                trace.best_epoch = epoch;
            }
        }
    }
    if trace.flagged_draws > 0 {
        warn!("{} negative draws used replacement", trace.flagged_draws);
    }
    Ok((best, trace))
}
