use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reserved relation name for instance-to-concept membership.
pub const INSTANCE_OF: &str = "instanceOf";
/// Reserved relation name for concept-to-concept subsumption.
pub const SUBCLASS_OF: &str = "subClassOf";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelationId {
    pub const INSTANCE_OF: RelationId = RelationId(0);
    pub const SUBCLASS_OF: RelationId = RelationId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Instance,
    Concept,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Instance => "instance",
            EntityKind::Concept => "concept",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "instance" => Some(EntityKind::Instance),
            "concept" => Some(EntityKind::Concept),
            _ => None,
        }
    }
}

impl fmt::Display for EntityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The five disjoint triple families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subset {
    InstanceOf,
    SubClassOf,
    InstanceInstance,
    NhhInstanceConcept,
    NhhConceptConcept,
}

impl Subset {
    pub const ALL: [Subset; 5] = [
        Subset::InstanceOf,
        Subset::SubClassOf,
        Subset::InstanceInstance,
        Subset::NhhInstanceConcept,
        Subset::NhhConceptConcept,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Head and tail kinds every triple of this subset must have.
    pub fn endpoint_kinds(self) -> (EntityKind, EntityKind) {
        use EntityKind::*;
        match self {
            Subset::InstanceOf | Subset::NhhInstanceConcept => (Instance, Concept),
            Subset::SubClassOf | Subset::NhhConceptConcept => (Concept, Concept),
            Subset::InstanceInstance => (Instance, Instance),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Subset::InstanceOf => "instanceOf",
            Subset::SubClassOf => "subClassOf",
            Subset::InstanceInstance => "instance-instance",
            Subset::NhhInstanceConcept => "nhh-instance-concept",
            Subset::NhhConceptConcept => "nhh-concept-concept",
        }
    }

    /// Classify a triple from its relation and endpoint kinds.
    ///
    /// Concept-to-instance triples under a non-reserved relation have no
    /// family and are rejected.
    pub fn classify(relation: &str, head: EntityKind, tail: EntityKind) -> Result<Subset, String> {
        use EntityKind::*;
        match relation {
            INSTANCE_OF => match (head, tail) {
                (Instance, Concept) => Ok(Subset::InstanceOf),
                _ => Err(format!(
                    "`{INSTANCE_OF}` needs instance -> concept, got {head} -> {tail}"
                )),
            },
            SUBCLASS_OF => match (head, tail) {
                (Concept, Concept) => Ok(Subset::SubClassOf),
                _ => Err(format!(
                    "`{SUBCLASS_OF}` needs concept -> concept, got {head} -> {tail}"
                )),
            },
            _ => match (head, tail) {
                (Instance, Instance) => Ok(Subset::InstanceInstance),
                (Instance, Concept) => Ok(Subset::NhhInstanceConcept),
                (Concept, Concept) => Ok(Subset::NhhConceptConcept),
                (Concept, Instance) => Err(format!(
                    "relation `{relation}` runs concept -> instance, which no triple family admits"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
    pub subset: Subset,
}

impl Triple {
    pub fn key(&self) -> (EntityId, RelationId, EntityId) {
        (self.head, self.relation, self.tail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entity {
    pub surface: String,
    pub kind: EntityKind,
    /// Position among entities of the same kind; rows of the embedding
    /// matrices are addressed by this.
    pub slot: usize,
}

/// A textual triple as read from a TSV file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTriple {
    pub head: String,
    pub relation: String,
    pub tail: String,
}

impl RawTriple {
    pub fn new(
        head: impl Into<String>,
        relation: impl Into<String>,
        tail: impl Into<String>,
    ) -> Self {
        RawTriple {
            head: head.into(),
            relation: relation.into(),
            tail: tail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    /// Reject duplicate triples with an error.
    #[default]
    Strict,
    /// Drop duplicates with a warning.
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripleRef {
    pub subset: Subset,
    pub index: usize,
}

#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    entities: Vec<Entity>,
    by_surface: HashMap<String, EntityId>,
    instances: Vec<EntityId>,
    concepts: Vec<EntityId>,
    relations: Vec<String>,
    relation_by_name: HashMap<String, RelationId>,
    subsets: [Vec<Triple>; 5],
    members: [HashSet<(EntityId, RelationId, EntityId)>; 5],
    insertion_order: Vec<TripleRef>,
    by_head: Vec<Vec<TripleRef>>,
    by_tail: Vec<Vec<TripleRef>>,
    by_relation: Vec<Vec<TripleRef>>,
    duplicates_dropped: usize,
}

/// Builds a graph from textual triples and an entity-kind registry.
pub fn build_graph(
    raw_triples: &[RawTriple],
    entity_kinds: &[(String, EntityKind)],
    policy: DuplicatePolicy,
) -> Result<KnowledgeGraph> {
    KnowledgeGraph::build(raw_triples, entity_kinds, policy)
}

impl KnowledgeGraph {
    pub fn build(
        raw_triples: &[RawTriple],
        entity_kinds: &[(String, EntityKind)],
        policy: DuplicatePolicy,
    ) -> Result<Self> {
        let mut kg = KnowledgeGraph::with_entities(entity_kinds)?;
        for raw in raw_triples {
            let head = kg.resolve(&raw.head)?;
            let tail = kg.resolve(&raw.tail)?;
            let subset =
                Subset::classify(&raw.relation, kg.kind(head), kg.kind(tail)).map_err(|msg| {
                    Error::KindMismatch(format!(
                        "({}, {}, {}): {msg}",
                        raw.head, raw.relation, raw.tail
                    ))
                })?;
            let relation = kg.intern_relation(&raw.relation);
            let triple = Triple {
                head,
                relation,
                tail,
                subset,
            };
            if kg.members[subset.index()].contains(&triple.key()) {
                match policy {
                    DuplicatePolicy::Strict => {
                        return Err(Error::DuplicateTriple(
                            raw.head.clone(),
                            raw.relation.clone(),
                            raw.tail.clone(),
                        ))
                    }
                    DuplicatePolicy::Lenient => {
                        log::warn!(
                            "dropping duplicate triple ({}, {}, {})",
                            raw.head,
                            raw.relation,
                            raw.tail
                        );
                        kg.duplicates_dropped += 1;
                        continue;
                    }
                }
            }
            kg.push(triple);
        }
        Ok(kg)
    }

    fn with_entities(entity_kinds: &[(String, EntityKind)]) -> Result<Self> {
        let mut kg = KnowledgeGraph {
            entities: Vec::new(),
            by_surface: HashMap::new(),
            instances: Vec::new(),
            concepts: Vec::new(),
            relations: Vec::new(),
            relation_by_name: HashMap::new(),
            subsets: Default::default(),
            members: Default::default(),
            insertion_order: Vec::new(),
            by_head: Vec::new(),
            by_tail: Vec::new(),
            by_relation: Vec::new(),
            duplicates_dropped: 0,
        };
        kg.intern_relation(INSTANCE_OF);
        kg.intern_relation(SUBCLASS_OF);
        for (surface, kind) in entity_kinds {
            if surface.trim().is_empty() {
                return Err(Error::EmptySurface);
            }
            if let Some(&existing) = kg.by_surface.get(surface) {
                if kg.kind(existing) != *kind {
                    return Err(Error::ConflictingKind(surface.clone()));
                }
                continue;
            }
            let id = EntityId(kg.entities.len() as u32);
            let slot = match kind {
                EntityKind::Instance => {
                    kg.instances.push(id);
                    kg.instances.len() - 1
                }
                EntityKind::Concept => {
                    kg.concepts.push(id);
                    kg.concepts.len() - 1
                }
            };
            kg.entities.push(Entity {
                surface: surface.clone(),
                kind: *kind,
                slot,
            });
            kg.by_surface.insert(surface.clone(), id);
        }
        kg.by_head = vec![Vec::new(); kg.entities.len()];
        kg.by_tail = vec![Vec::new(); kg.entities.len()];
        Ok(kg)
    }

    fn intern_relation(&mut self, name: &str) -> RelationId {
        if let Some(&id) = self.relation_by_name.get(name) {
            return id;
        }
        let id = RelationId(self.relations.len() as u32);
        self.relations.push(name.to_string());
        self.relation_by_name.insert(name.to_string(), id);
        self.by_relation.push(Vec::new());
        id
    }

    fn push(&mut self, triple: Triple) {
        let s = triple.subset.index();
        let r = TripleRef {
            subset: triple.subset,
            index: self.subsets[s].len(),
        };
        self.members[s].insert(triple.key());
        self.subsets[s].push(triple);
        self.insertion_order.push(r);
        self.by_head[triple.head.index()].push(r);
        self.by_tail[triple.tail.index()].push(r);
        self.by_relation[triple.relation.index()].push(r);
    }

    /// Appends a triple without any checks. Used by tests that need to
    /// construct invalid graphs for the validator.
    #[cfg(test)]
    pub(crate) fn inject_unchecked(&mut self, triple: Triple) {
        let s = triple.subset.index();
        let r = TripleRef {
            subset: triple.subset,
            index: self.subsets[s].len(),
        };
        self.subsets[s].push(triple);
        self.insertion_order.push(r);
    }

    pub fn resolve(&self, surface: &str) -> Result<EntityId> {
        self.by_surface
            .get(surface)
            .copied()
            .ok_or_else(|| Error::UnknownEntity(surface.to_string()))
    }

    pub fn entity(&self, id: EntityId) -> Option<&Entity> {
        self.entities.get(id.index())
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity_ids(&self) -> impl Iterator<Item = EntityId> + '_ {
        (0..self.entities.len() as u32).map(EntityId)
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn surface(&self, id: EntityId) -> &str {
        &self.entities[id.index()].surface
    }

    pub fn kind(&self, id: EntityId) -> EntityKind {
        self.entities[id.index()].kind
    }

    pub fn slot(&self, id: EntityId) -> usize {
        self.entities[id.index()].slot
    }

    pub fn instances(&self) -> &[EntityId] {
        &self.instances
    }

    pub fn concepts(&self) -> &[EntityId] {
        &self.concepts
    }

    /// All entities of one kind, in slot order.
    pub fn of_kind(&self, kind: EntityKind) -> &[EntityId] {
        match kind {
            EntityKind::Instance => &self.instances,
            EntityKind::Concept => &self.concepts,
        }
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn relation_name(&self, id: RelationId) -> &str {
        &self.relations[id.index()]
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relation_by_name.get(name).copied()
    }

    pub fn subset(&self, subset: Subset) -> &[Triple] {
        &self.subsets[subset.index()]
    }

    pub fn subset_sizes(&self) -> [usize; 5] {
        [0, 1, 2, 3, 4].map(|i| self.subsets[i].len())
    }

    pub fn num_triples(&self) -> usize {
        self.subsets.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: TripleRef) -> &Triple {
        &self.subsets[r.subset.index()][r.index]
    }

    /// Every triple in the order it was inserted.
    pub fn triples(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.insertion_order.iter().map(move |r| self.get(*r))
    }

    pub fn contains(
        &self,
        subset: Subset,
        head: EntityId,
        relation: RelationId,
        tail: EntityId,
    ) -> bool {
        self.members[subset.index()].contains(&(head, relation, tail))
    }

    pub fn by_head(&self, id: EntityId) -> &[TripleRef] {
        &self.by_head[id.index()]
    }

    pub fn by_tail(&self, id: EntityId) -> &[TripleRef] {
        &self.by_tail[id.index()]
    }

    pub fn by_relation(&self, id: RelationId) -> &[TripleRef] {
        &self.by_relation[id.index()]
    }

    pub fn duplicates_dropped(&self) -> usize {
        self.duplicates_dropped
    }

    /// Textual triples in insertion order, suitable for writing back out.
    pub fn raw_triples(&self) -> Vec<RawTriple> {
        self.triples()
            .map(|t| {
                RawTriple::new(
                    self.surface(t.head),
                    self.relation_name(t.relation),
                    self.surface(t.tail),
                )
            })
            .collect()
    }

    /// The kind registry in id order.
    pub fn kind_registry(&self) -> Vec<(String, EntityKind)> {
        self.entities
            .iter()
            .map(|e| (e.surface.clone(), e.kind))
            .collect()
    }
}
