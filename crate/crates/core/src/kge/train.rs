use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{
    hinge, instance_of_grad, loss_instance_of, loss_subclass_of, subclass_grad, translation_grad,
    translation_loss,
};
use super::sampling::sample_negative_triple;
use super::store::{EmbeddingStore, Param};
use crate::error::{Error, Result};
use crate::kg::{KnowledgeGraph, Subset, Triple};

/// Per-family ranking margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Margins {
    pub instance_of: f64,
    pub subclass_of: f64,
    pub instance_instance: f64,
    pub nhh_instance_concept: f64,
    pub nhh_concept_concept: f64,
}

impl Default for Margins {
    fn default() -> Self {
        Margins {
            instance_of: 1.0,
            subclass_of: 1.0,
            instance_instance: 1.0,
            nhh_instance_concept: 1.0,
            nhh_concept_concept: 1.0,
        }
    }
}

impl Margins {
    pub fn get(&self, subset: Subset) -> f64 {
        match subset {
            Subset::InstanceOf => self.instance_of,
            Subset::SubClassOf => self.subclass_of,
            Subset::InstanceInstance => self.instance_instance,
            Subset::NhhInstanceConcept => self.nhh_instance_concept,
            Subset::NhhConceptConcept => self.nhh_concept_concept,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KgeConfig {
    /// Embedding dimension `n`.
    pub dim: usize,
    pub margins: Margins,
    pub learning_rate: f64,
    pub epochs: usize,
    pub negatives_per_triple: usize,
    pub seed: u64,
    /// Train the sphere losses (instanceOf, subClassOf). Switching this off
    /// leaves only the translation families.
    pub hierarchy_losses: bool,
}

impl Default for KgeConfig {
    fn default() -> Self {
        KgeConfig {
            dim: 200,
            margins: Margins::default(),
            learning_rate: 0.01,
            epochs: 100,
            negatives_per_triple: 1,
            seed: 0,
            hierarchy_losses: true,
        }
    }
}

impl KgeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("kge.dim must be at least 1".into()));
        }
        for s in Subset::ALL {
            let m = self.margins.get(s);
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::Config(format!(
                    "margin for {} must be non-negative",
                    s.name()
                )));
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("kge.learning_rate must be positive".into()));
        }
        Ok(())
    }

    pub fn is_active(&self, subset: Subset) -> bool {
        self.hierarchy_losses || !matches!(subset, Subset::InstanceOf | Subset::SubClassOf)
    }
}

/// Loss of one triple under the current embeddings.
pub fn triple_loss(kg: &KnowledgeGraph, store: &EmbeddingStore, t: &Triple) -> Result<f64> {
    let (h, tl) = (kg.slot(t.head), kg.slot(t.tail));
    match t.subset {
        Subset::InstanceOf => loss_instance_of(
            store.instance_vecs.row(h),
            store.concept_centers.row(tl),
            store.concept_radii[tl],
        ),
        Subset::SubClassOf => loss_subclass_of(
            store.concept_centers.row(h),
            store.concept_radii[h],
            store.concept_centers.row(tl),
            store.concept_radii[tl],
        ),
        Subset::InstanceInstance => translation_loss(
            store.instance_vecs.row(h),
            store.relation_vecs.row(t.relation.index()),
            store.instance_vecs.row(tl),
        ),
        Subset::NhhInstanceConcept => translation_loss(
            store.instance_vecs.row(h),
            store.relation_vecs.row(t.relation.index()),
            store.concept_node_vecs.row(tl),
        ),
        Subset::NhhConceptConcept => translation_loss(
            store.concept_node_vecs.row(h),
            store.relation_vecs.row(t.relation.index()),
            store.concept_node_vecs.row(tl),
        ),
    }
}

/// Sparse gradient: `(parameter block, gradient)` entries, additive.
pub type ParamGrads = Vec<(Param, Vec<f64>)>;

/// Loss of one triple together with its gradient, as a list of
/// `(parameter block, gradient)` entries. A block may appear twice when the
/// head and tail coincide; entries are additive.
pub fn triple_grad(
    kg: &KnowledgeGraph,
    store: &EmbeddingStore,
    t: &Triple,
) -> Result<(f64, ParamGrads)> {
    let (h, tl) = (kg.slot(t.head), kg.slot(t.tail));
    let r = t.relation.index();
    let translation = |head: Param, tail: Param| -> Result<(f64, ParamGrads)> {
        let (v, g) = translation_grad(
            store.param(head),
            store.relation_vecs.row(r),
            store.param(tail),
        )?;
        Ok((
            v,
            vec![
                (head, g.head),
                (Param::Relation(r), g.relation),
                (tail, g.tail),
            ],
        ))
    };
    match t.subset {
        Subset::InstanceOf => {
            let (v, g) = instance_of_grad(
                store.instance_vecs.row(h),
                store.concept_centers.row(tl),
                store.concept_radii[tl],
            )?;
            Ok((
                v,
                vec![
                    (Param::Instance(h), g.instance),
                    (Param::Center(tl), g.center),
                    (Param::Radius(tl), vec![g.radius]),
                ],
            ))
        }
        Subset::SubClassOf => {
            let (v, g) = subclass_grad(
                store.concept_centers.row(h),
                store.concept_radii[h],
                store.concept_centers.row(tl),
                store.concept_radii[tl],
            )?;
            Ok((
                v,
                vec![
                    (Param::Center(h), g.head_center),
                    (Param::Radius(h), vec![g.head_radius]),
                    (Param::Center(tl), g.tail_center),
                    (Param::Radius(tl), vec![g.tail_radius]),
                ],
            ))
        }
        Subset::InstanceInstance => translation(Param::Instance(h), Param::Instance(tl)),
        Subset::NhhInstanceConcept => translation(Param::Instance(h), Param::Node(tl)),
        Subset::NhhConceptConcept => translation(Param::Node(h), Param::Node(tl)),
    }
}

/// Value and gradient of the ranking term `[margin + f(pos) - f(neg)]_+`.
pub fn hinge_grad(
    kg: &KnowledgeGraph,
    store: &EmbeddingStore,
    pos: &Triple,
    neg: &Triple,
    margin: f64,
) -> Result<(f64, ParamGrads)> {
    let (fp, gp) = triple_grad(kg, store, pos)?;
    let (fn_, gn) = triple_grad(kg, store, neg)?;
    let value = hinge(margin, fp, fn_);
    if value <= 0.0 {
        return Ok((0.0, Vec::new()));
    }
    let mut grads = gp;
    grads.extend(
        gn.into_iter()
            .map(|(p, g)| (p, g.into_iter().map(|x| -x).collect())),
    );
    Ok((value, grads))
}

/// The joint objective: the sum over the five families of their per-triple
/// loss sums, each accumulated in storage order.
pub fn joint_objective(kg: &KnowledgeGraph, store: &EmbeddingStore) -> Result<f64> {
    store.check_covers(kg)?;
    let mut total = 0.0;
    for subset in Subset::ALL {
        let mut sum = 0.0;
        for t in kg.subset(subset) {
            sum += triple_loss(kg, store, t)?;
        }
        total += sum;
    }
    Ok(total)
}

/// Mean hinge loss of each epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KgeTrace {
    pub epoch_losses: Vec<f64>,
}

/// Trains knowledge embeddings from a seeded initialisation.
pub fn train_kge(kg: &KnowledgeGraph, cfg: &KgeConfig) -> Result<EmbeddingStore> {
    train_kge_traced(kg, cfg).map(|(store, _)| store)
}

pub fn train_kge_traced(
    kg: &KnowledgeGraph,
    cfg: &KgeConfig,
) -> Result<(EmbeddingStore, KgeTrace)> {
    cfg.validate()?;
    let mut store = EmbeddingStore::for_graph(kg, cfg.dim, cfg.seed);
    let trace = train_kge_in_place(kg, cfg, &mut store)?;
    Ok((store, trace))
}

/// Runs `cfg.epochs` epochs of margin-ranking SGD on `store`.
///
/// Each epoch visits every positive triple of the active families in a
/// freshly shuffled order and draws `negatives_per_triple` corruptions for
/// it. Gradients of one positive/negative pair are computed before any of
/// them is applied.
pub fn train_kge_in_place(
    kg: &KnowledgeGraph,
    cfg: &KgeConfig,
    store: &mut EmbeddingStore,
) -> Result<KgeTrace> {
    cfg.validate()?;
    store.check_covers(kg)?;
    // separate stream from the initialiser so that 0 epochs leaves the store untouched
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_6b67_6574_7261);
    let mut positives: Vec<Triple> = Subset::ALL
        .into_iter()
        .filter(|&s| cfg.is_active(s))
        .flat_map(|s| kg.subset(s).iter().copied())
        .collect();
    let mut trace = KgeTrace::default();

    for epoch in 0..cfg.epochs {
        positives.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut terms = 0usize;
        for pos in &positives {
            let margin = cfg.margins.get(pos.subset);
            for _ in 0..cfg.negatives_per_triple {
                let neg = sample_negative_triple(pos, kg, &mut rng)?;
                let (value, grads) = hinge_grad(kg, store, pos, &neg, margin)?;
                epoch_loss += value;
                terms += 1;
                if grads.is_empty() {
                    continue;
                }
                for (p, g) in &grads {
                    for (w, d) in store.param_mut(*p).iter_mut().zip(g) {
                        *w -= cfg.learning_rate * d;
                    }
                }
                for (p, _) in &grads {
                    store.constrain(*p);
                }
            }
        }
        if !epoch_loss.is_finite() || !store.is_finite() {
            return Err(Error::NonFiniteLoss(format!(
                "knowledge embedding epoch {epoch} (loss {epoch_loss})"
            )));
        }
        let mean = if terms > 0 {
            epoch_loss / terms as f64
        } else {
            0.0
        };
        log::debug!("kge epoch {epoch}: mean hinge {mean:.6}");
        trace.epoch_losses.push(mean);
    }
    Ok(trace)
}
