use crate::error::{check_dim, Error, Result};
use crate::kg::{EntityId, EntityKind};
use crate::semantic::{SemanticTable, SharedFc, SubwordVocab, TwoLayerFc};
use crate::tensor::{axpy, dot, Matrix};

use super::fusion::{fuse_backward, fuse_forward, FusionGrads, FusionMode, FusionParams};
use super::nce::nce_grad;

/// Knowledge projection into the shared space: `W3 (k x n)`, `W4 (k x k)`.
pub type KnowledgeFc = TwoLayerFc;

/// Entity catalogue carried by a model so that it can score and name
/// entities without the original graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityCatalog {
    pub surfaces: Vec<String>,
    pub kinds: Vec<EntityKind>,
}

impl EntityCatalog {
    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    pub fn ids(&self) -> Vec<EntityId> {
        (0..self.surfaces.len() as u32).map(EntityId).collect()
    }
}

/// Full scoring model: subword table, shared semantic FC, knowledge FC,
/// fusion parameters and the frozen knowledge embedding of every entity.
#[derive(Debug, Clone, PartialEq)]
pub struct MatcherModel {
    pub vocab: SubwordVocab,
    pub table: SemanticTable,
    pub semantic_fc: SharedFc,
    pub knowledge_fc: KnowledgeFc,
    pub fusion: FusionParams,
    pub mode: FusionMode,
    /// One row per entity id (`|E| x n`).
    pub knowledge: Matrix,
    pub entities: EntityCatalog,
    entity_subwords: Vec<Vec<usize>>,
}

impl MatcherModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        vocab: SubwordVocab,
        table: SemanticTable,
        semantic_fc: SharedFc,
        knowledge_fc: KnowledgeFc,
        fusion: FusionParams,
        mode: FusionMode,
        knowledge: Matrix,
        entities: EntityCatalog,
    ) -> Result<Self> {
        check_dim(vocab.len(), table.len())?;
        check_dim(table.dim(), semantic_fc.input_dim())?;
        check_dim(knowledge.cols(), knowledge_fc.input_dim())?;
        let k = semantic_fc.output_dim();
        check_dim(k, knowledge_fc.output_dim())?;
        check_dim(k, fusion.gate.dim())?;
        check_dim(entities.len(), knowledge.rows())?;
        check_dim(entities.len(), entities.kinds.len())?;
        let entity_subwords = entities
            .surfaces
            .iter()
            .map(|s| vocab.ids(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatcherModel {
            vocab,
            table,
            semantic_fc,
            knowledge_fc,
            fusion,
            mode,
            knowledge,
            entities,
            entity_subwords,
        })
    }

    pub fn k(&self) -> usize {
        self.semantic_fc.output_dim()
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn entity_subwords(&self, id: EntityId) -> &[usize] {
        &self.entity_subwords[id.index()]
    }

    fn check_entity(&self, id: EntityId) -> Result<()> {
        if id.index() < self.num_entities() {
            Ok(())
        } else {
            Err(Error::UnknownEntity(format!("id {}", id.0)))
        }
    }

    /// `e_s(q)` for a mention, evaluation mode.
    pub fn encode_mention(&self, mention: &str) -> Result<Vec<f64>> {
        let e = self.table.mean_rows(&self.vocab.ids(mention)?)?;
        self.semantic_fc.forward(&e)
    }

    /// Semantic features of an entity surface, evaluation mode.
    pub fn entity_semantic(&self, id: EntityId) -> Result<Vec<f64>> {
        self.check_entity(id)?;
        let e = self.table.mean_rows(self.entity_subwords(id))?;
        self.semantic_fc.forward(&e)
    }

    /// Transformed knowledge features of an entity, evaluation mode.
    pub fn entity_knowledge(&self, id: EntityId) -> Result<Vec<f64>> {
        self.check_entity(id)?;
        self.knowledge_fc.forward(self.knowledge.row(id.index()))
    }

    /// Final entity representation under the active fusion mode.
    pub fn encode_entity(&self, id: EntityId) -> Result<Vec<f64>> {
        let es = self.entity_semantic(id)?;
        if self.mode == FusionMode::NoKnowledge {
            return Ok(es);
        }
        let el = self.entity_knowledge(id)?;
        Ok(fuse_forward(&es, &el, &self.fusion, self.mode).output)
    }

    /// Encodings of every entity, one row per id.
    pub fn encode_all_entities(&self) -> Result<Matrix> {
        let mut m = Matrix::zeros(self.num_entities(), self.k());
        for id in self.entities.ids() {
            let row = self.encode_entity(id)?;
            m.row_mut(id.index()).copy_from_slice(&row);
        }
        Ok(m)
    }

    pub fn is_finite(&self) -> bool {
        self.table.weights.is_finite()
            && self.semantic_fc.is_finite()
            && self.knowledge_fc.is_finite()
            && self.fusion.gate.wg.is_finite()
            && self.fusion.wf.is_finite()
    }
}

/// Encodes entity `t` with the model's fusion mode.
pub fn encode_entity(t: EntityId, model: &MatcherModel) -> Result<Vec<f64>> {
    model.encode_entity(t)
}

/// Dot-product matching score.
pub fn score(query: &[f64], entity: &[f64]) -> Result<f64> {
    check_dim(query.len(), entity.len())?;
    Ok(dot(query, entity))
}

/// Gradient accumulators with the same layout as the trainable parts of a
/// [`MatcherModel`].
#[derive(Debug, Clone, PartialEq)]
pub struct MatcherGrads {
    pub table: Matrix,
    pub semantic_fc: TwoLayerFc,
    pub knowledge_fc: TwoLayerFc,
    pub fusion: FusionGrads,
}

impl MatcherGrads {
    pub fn zeros_like(model: &MatcherModel) -> Self {
        MatcherGrads {
            table: Matrix::zeros(model.table.len(), model.table.dim()),
            semantic_fc: TwoLayerFc::zeros(model.semantic_fc.input_dim(), model.k()),
            knowledge_fc: TwoLayerFc::zeros(model.knowledge_fc.input_dim(), model.k()),
            fusion: FusionGrads::zeros(model.k()),
        }
    }

    pub fn clear(&mut self) {
        self.table.fill(0.0);
        for t in self.semantic_fc.tensors_mut() {
            t.iter_mut().for_each(|x| *x = 0.0);
        }
        for t in self.knowledge_fc.tensors_mut() {
            t.iter_mut().for_each(|x| *x = 0.0);
        }
        self.fusion.wg.fill(0.0);
        self.fusion.wf.fill(0.0);
    }

    /// Gradient tensors in parameter order: table, W1, b1, W2, b2, W3, b3,
    /// W4, b4, Wg, Wf.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut v = vec![self.table.as_slice()];
        v.extend(self.semantic_fc.tensors());
        v.extend(self.knowledge_fc.tensors());
        v.push(self.fusion.wg.as_slice());
        v.push(self.fusion.wf.as_slice());
        v
    }

    pub fn scale(&mut self, factor: f64) {
        self.table
            .as_mut_slice()
            .iter_mut()
            .for_each(|x| *x *= factor);
        for t in self.semantic_fc.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= factor);
        }
        for t in self.knowledge_fc.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= factor);
        }
        self.fusion
            .wg
            .as_mut_slice()
            .iter_mut()
            .for_each(|x| *x *= factor);
        self.fusion
            .wf
            .as_mut_slice()
            .iter_mut()
            .for_each(|x| *x *= factor);
    }
}

/// Parameter tensors of a model in the order of [`MatcherGrads::tensors`].
pub fn parameter_tensors_mut(model: &mut MatcherModel) -> Vec<&mut [f64]> {
    let mut v = vec![model.table.weights.as_mut_slice()];
    v.extend(model.semantic_fc.tensors_mut());
    v.extend(model.knowledge_fc.tensors_mut());
    v.push(model.fusion.gate.wg.as_mut_slice());
    v.push(model.fusion.wf.as_mut_slice());
    v
}

/// Dropout masks for one training example. The same realisation is used
/// for the mention and every candidate entity of the example.
#[derive(Debug, Clone, Default)]
pub struct ExampleMasks {
    pub semantic: Option<Vec<f64>>,
    pub knowledge: Option<Vec<f64>>,
}

/// One NCE term: mention subwords, the gold entity and sampled negatives.
#[derive(Debug, Clone)]
pub struct Example<'a> {
    pub mention: &'a [usize],
    pub positive: EntityId,
    pub negatives: &'a [EntityId],
}

fn scatter_mean(table_grad: &mut Matrix, ids: &[usize], d_mean: &[f64]) {
    let inv = 1.0 / ids.len() as f64;
    for &id in ids {
        axpy(table_grad.row_mut(id), inv, d_mean);
    }
}

/// Loss of one NCE term and, by hand-written backpropagation, its gradient
/// with respect to every trainable tensor (accumulated into `grads`).
pub fn example_loss_and_grad(
    model: &MatcherModel,
    ex: &Example<'_>,
    masks: &ExampleMasks,
    grads: &mut MatcherGrads,
) -> Result<f64> {
    model.check_entity(ex.positive)?;
    for &n in ex.negatives {
        model.check_entity(n)?;
    }
    let sm = masks.semantic.as_deref();
    let km = masks.knowledge.as_deref();

    let q_emb = model.table.mean_rows(ex.mention)?;
    let q_trace = model.semantic_fc.forward_traced(&q_emb, sm);
    let q = &q_trace.output;

    struct Candidate {
        id: EntityId,
        s_trace: crate::semantic::FcTrace,
        k_trace: Option<crate::semantic::FcTrace>,
        fuse_trace: super::fusion::FuseTrace,
    }

    let candidates: Vec<Candidate> = std::iter::once(ex.positive)
        .chain(ex.negatives.iter().copied())
        .map(|id| {
            let e = model.table.mean_rows(model.entity_subwords(id))?;
            let s_trace = model.semantic_fc.forward_traced(&e, sm);
            let (k_trace, fuse_trace) = if model.mode.uses_knowledge() {
                let kt = model
                    .knowledge_fc
                    .forward_traced(model.knowledge.row(id.index()), km);
                let ft = fuse_forward(&s_trace.output, &kt.output, &model.fusion, model.mode);
                (Some(kt), ft)
            } else {
                let ft = fuse_forward(&s_trace.output, &s_trace.output, &model.fusion, model.mode);
                (None, ft)
            };
            Ok(Candidate {
                id,
                s_trace,
                k_trace,
                fuse_trace,
            })
        })
        .collect::<Result<_>>()?;

    let scores: Vec<f64> = candidates
        .iter()
        .map(|c| dot(q, &c.fuse_trace.output))
        .collect();
    let (loss, d_pos, d_negs) = nce_grad(scores[0], &scores[1..]);

    let mut d_q = vec![0.0; q.len()];
    for (c, ds) in candidates.iter().zip(std::iter::once(d_pos).chain(d_negs)) {
        if ds == 0.0 {
            continue;
        }
        axpy(&mut d_q, ds, &c.fuse_trace.output);
        let d_fused: Vec<f64> = q.iter().map(|x| ds * x).collect();
        let es = &c.s_trace.output;
        let el = c
            .k_trace
            .as_ref()
            .map(|t| t.output.as_slice())
            .unwrap_or(es);
        let (d_es, d_el) = fuse_backward(
            es,
            el,
            &model.fusion,
            model.mode,
            &c.fuse_trace,
            &d_fused,
            &mut grads.fusion,
        );
        let d_emb = model
            .semantic_fc
            .backward(&c.s_trace, &d_es, &mut grads.semantic_fc);
        scatter_mean(&mut grads.table, model.entity_subwords(c.id), &d_emb);
        if let Some(kt) = &c.k_trace {
            model
                .knowledge_fc
                .backward(kt, &d_el, &mut grads.knowledge_fc);
        }
    }
    let d_q_emb = model
        .semantic_fc
        .backward(&q_trace, &d_q, &mut grads.semantic_fc);
    scatter_mean(&mut grads.table, ex.mention, &d_q_emb);
    Ok(loss)
}
