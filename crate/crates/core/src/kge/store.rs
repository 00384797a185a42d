use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kg::{EntityId, EntityKind, KnowledgeGraph};
use crate::tensor::{project_unit_ball, Matrix};

/// Lower bound applied to every sphere radius after each update.
pub const RADIUS_FLOOR: f64 = 1e-3;
/// Radius every sphere starts with.
pub const INITIAL_RADIUS: f64 = 0.5;

/// Learned knowledge embeddings: instance vectors, concept spheres, concept
/// node vectors and relation vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    pub instance_vecs: Matrix,
    pub concept_centers: Matrix,
    pub concept_radii: Vec<f64>,
    pub concept_node_vecs: Matrix,
    pub relation_vecs: Matrix,
}

/// Addresses one parameter block of the store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Instance(usize),
    Center(usize),
    Radius(usize),
    Node(usize),
    Relation(usize),
}

impl EmbeddingStore {
    /// Uniform initialisation in `[-6/sqrt(n), 6/sqrt(n)]`, radii at
    /// [`INITIAL_RADIUS`]. Instance, node and relation vectors start on or
    /// inside the unit ball.
    pub fn init(
        num_instances: usize,
        num_concepts: usize,
        num_relations: usize,
        dim: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bound = 6.0 / (dim as f64).sqrt();
        let mut store = EmbeddingStore {
            instance_vecs: Matrix::uniform(num_instances, dim, bound, &mut rng),
            concept_centers: Matrix::uniform(num_concepts, dim, bound, &mut rng),
            concept_radii: vec![INITIAL_RADIUS; num_concepts],
            concept_node_vecs: Matrix::uniform(num_concepts, dim, bound, &mut rng),
            relation_vecs: Matrix::uniform(num_relations, dim, bound, &mut rng),
        };
        for r in 0..num_instances {
            project_unit_ball(store.instance_vecs.row_mut(r));
        }
        for r in 0..num_concepts {
            project_unit_ball(store.concept_node_vecs.row_mut(r));
        }
        for r in 0..num_relations {
            project_unit_ball(store.relation_vecs.row_mut(r));
        }
        store
    }

    pub fn for_graph(kg: &KnowledgeGraph, dim: usize, seed: u64) -> Self {
        Self::init(
            kg.instances().len(),
            kg.concepts().len(),
            kg.num_relations(),
            dim,
            seed,
        )
    }

    pub fn dim(&self) -> usize {
        self.instance_vecs.cols()
    }

    pub fn num_instances(&self) -> usize {
        self.instance_vecs.rows()
    }

    pub fn num_concepts(&self) -> usize {
        self.concept_centers.rows()
    }

    pub fn num_relations(&self) -> usize {
        self.relation_vecs.rows()
    }

    /// Errors unless the store has a row for every entity and relation of `kg`.
    pub fn check_covers(&self, kg: &KnowledgeGraph) -> Result<()> {
        if self.num_instances() < kg.instances().len() {
            return Err(Error::MissingEmbedding(format!(
                "{} instances in graph, {} in store",
                kg.instances().len(),
                self.num_instances()
            )));
        }
        if self.num_concepts() < kg.concepts().len()
            || self.concept_radii.len() < kg.concepts().len()
        {
            return Err(Error::MissingEmbedding(format!(
                "{} concepts in graph, {} in store",
                kg.concepts().len(),
                self.num_concepts()
            )));
        }
        if self.num_relations() < kg.num_relations() {
            return Err(Error::MissingEmbedding(format!(
                "{} relations in graph, {} in store",
                kg.num_relations(),
                self.num_relations()
            )));
        }
        Ok(())
    }

    pub fn param(&self, p: Param) -> &[f64] {
        match p {
            Param::Instance(s) => self.instance_vecs.row(s),
            Param::Center(s) => self.concept_centers.row(s),
            Param::Radius(s) => std::slice::from_ref(&self.concept_radii[s]),
            Param::Node(s) => self.concept_node_vecs.row(s),
            Param::Relation(s) => self.relation_vecs.row(s),
        }
    }

    pub fn param_mut(&mut self, p: Param) -> &mut [f64] {
        match p {
            Param::Instance(s) => self.instance_vecs.row_mut(s),
            Param::Center(s) => self.concept_centers.row_mut(s),
            Param::Radius(s) => std::slice::from_mut(&mut self.concept_radii[s]),
            Param::Node(s) => self.concept_node_vecs.row_mut(s),
            Param::Relation(s) => self.relation_vecs.row_mut(s),
        }
    }

    /// Re-establishes the store invariants for one parameter block.
    pub fn constrain(&mut self, p: Param) {
        match p {
            Param::Radius(s) => {
                let m = &mut self.concept_radii[s];
                if *m < RADIUS_FLOOR {
                    *m = RADIUS_FLOOR;
                }
            }
            Param::Instance(_) | Param::Node(_) => project_unit_ball(self.param_mut(p)),
            Param::Center(_) | Param::Relation(_) => {}
        }
    }

    pub fn is_finite(&self) -> bool {
        self.instance_vecs.is_finite()
            && self.concept_centers.is_finite()
            && self.concept_radii.iter().all(|x| x.is_finite())
            && self.concept_node_vecs.is_finite()
            && self.relation_vecs.is_finite()
    }

    /// Knowledge embedding of one entity: the instance vector, or the mean
    /// of a concept's sphere center and node vector.
    pub fn entity_embedding(&self, kg: &KnowledgeGraph, id: EntityId) -> Result<Vec<f64>> {
        let e = kg
            .entity(id)
            .ok_or_else(|| Error::UnknownEntity(format!("id {}", id.0)))?;
        match e.kind {
            EntityKind::Instance => {
                if e.slot >= self.num_instances() {
                    return Err(Error::MissingEmbedding(e.surface.clone()));
                }
                Ok(self.instance_vecs.row(e.slot).to_vec())
            }
            EntityKind::Concept => {
                if e.slot >= self.num_concepts() {
                    return Err(Error::MissingEmbedding(e.surface.clone()));
                }
                Ok(self
                    .concept_centers
                    .row(e.slot)
                    .iter()
                    .zip(self.concept_node_vecs.row(e.slot))
                    .map(|(p, v)| (p + v) / 2.0)
                    .collect())
            }
        }
    }

    /// Knowledge embeddings of all entities, one row per entity id.
    pub fn entity_matrix(&self, kg: &KnowledgeGraph) -> Result<Matrix> {
        let mut m = Matrix::zeros(kg.num_entities(), self.dim());
        for id in kg.entity_ids() {
            let row = self.entity_embedding(kg, id)?;
            m.row_mut(id.index()).copy_from_slice(&row);
        }
        Ok(m)
    }
}

/// Knowledge embedding of entity `t`.
pub fn entity_knowledge_embedding(
    store: &EmbeddingStore,
    kg: &KnowledgeGraph,
    t: EntityId,
) -> Result<Vec<f64>> {
    store.entity_embedding(kg, t)
}
