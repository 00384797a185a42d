use std::collections::HashMap;
use std::fmt;

use super::graph::{EntityId, KnowledgeGraph, RelationId, Subset, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    DanglingEntity {
        subset: Subset,
        index: usize,
        id: EntityId,
    },
    DanglingRelation {
        subset: Subset,
        index: usize,
        id: RelationId,
    },
    KindMismatch {
        subset: Subset,
        index: usize,
        detail: String,
    },
    ReservedRelation {
        subset: Subset,
        index: usize,
        detail: String,
    },
    Duplicate {
        subset: Subset,
        index: usize,
        first: usize,
    },
    Overlap {
        subset: Subset,
        index: usize,
        other: Subset,
    },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::DanglingEntity { subset, index, id } => {
                write!(f, "{}[{index}]: dangling entity id {}", subset.name(), id.0)
            }
            Issue::DanglingRelation { subset, index, id } => {
                write!(
                    f,
                    "{}[{index}]: dangling relation id {}",
                    subset.name(),
                    id.0
                )
            }
            Issue::KindMismatch {
                subset,
                index,
                detail,
            } => {
                write!(f, "{}[{index}]: kind mismatch: {detail}", subset.name())
            }
            Issue::ReservedRelation {
                subset,
                index,
                detail,
            } => {
                write!(f, "{}[{index}]: {detail}", subset.name())
            }
            Issue::Duplicate {
                subset,
                index,
                first,
            } => {
                write!(f, "{}[{index}]: duplicate of [{first}]", subset.name())
            }
            Issue::Overlap {
                subset,
                index,
                other,
            } => {
                write!(
                    f,
                    "{}[{index}]: also present in {}",
                    subset.name(),
                    other.name()
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks every graph invariant and reports each violation found.
pub fn validate_graph(kg: &KnowledgeGraph) -> ValidationReport {
    let mut issues = Vec::new();
    let mut seen: HashMap<(EntityId, RelationId, EntityId), (Subset, usize)> = HashMap::new();

    for subset in Subset::ALL {
        for (index, t) in kg.subset(subset).iter().enumerate() {
            check_triple(kg, subset, index, t, &mut issues);
            match seen.get(&t.key()) {
                Some(&(other, first)) if other == subset => issues.push(Issue::Duplicate {
                    subset,
                    index,
                    first,
                }),
                Some(&(other, _)) => issues.push(Issue::Overlap {
                    subset,
                    index,
                    other,
                }),
                None => {
                    seen.insert(t.key(), (subset, index));
                }
            }
        }
    }
    ValidationReport { issues }
}

fn check_triple(
    kg: &KnowledgeGraph,
    subset: Subset,
    index: usize,
    t: &Triple,
    issues: &mut Vec<Issue>,
) {
    if t.subset != subset {
        issues.push(Issue::KindMismatch {
            subset,
            index,
            detail: format!(
                "triple labelled {} stored in {}",
                t.subset.name(),
                subset.name()
            ),
        });
    }
    let mut dangling = false;
    for id in [t.head, t.tail] {
        if id.index() >= kg.num_entities() {
            issues.push(Issue::DanglingEntity { subset, index, id });
            dangling = true;
        }
    }
    if t.relation.index() >= kg.num_relations() {
        issues.push(Issue::DanglingRelation {
            subset,
            index,
            id: t.relation,
        });
        dangling = true;
    }
    if dangling {
        return;
    }

    let (want_head, want_tail) = subset.endpoint_kinds();
    let (head, tail) = (kg.kind(t.head), kg.kind(t.tail));
    if head != want_head || tail != want_tail {
        issues.push(Issue::KindMismatch {
            subset,
            index,
            detail: format!("expected {want_head} -> {want_tail}, found {head} -> {tail}"),
        });
    }

    let reserved = match subset {
        Subset::InstanceOf => Some(RelationId::INSTANCE_OF),
        Subset::SubClassOf => Some(RelationId::SUBCLASS_OF),
        _ => None,
    };
    match reserved {
        Some(r) if t.relation != r => issues.push(Issue::ReservedRelation {
            subset,
            index,
            detail: format!(
                "relation `{}` where `{}` is required",
                kg.relation_name(t.relation),
                kg.relation_name(r)
            ),
        }),
        None if t.relation == RelationId::INSTANCE_OF || t.relation == RelationId::SUBCLASS_OF => {
            issues.push(Issue::ReservedRelation {
                subset,
                index,
                detail: format!(
                    "reserved relation `{}` outside its family",
                    kg.relation_name(t.relation)
                ),
            })
        }
        _ => {}
    }
}
