//! Knowledge-graph data model: entities with a fixed kind, a relation
//! registry with the two reserved hierarchy relations, and triples split into
//! five disjoint families.

mod graph;
mod synonyms;
mod validate;

pub use graph::{
    build_graph, DuplicatePolicy, Entity, EntityId, EntityKind, KnowledgeGraph, RawTriple,
    RelationId, Subset, Triple, TripleRef, INSTANCE_OF, SUBCLASS_OF,
};
pub use synonyms::{build_synonym_index, SynonymIndex};
pub use validate::{validate_graph, Issue, ValidationReport};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::io::{Pair, PairDataset, Split};

    fn kinds(list: &[(&str, EntityKind)]) -> Vec<(String, EntityKind)> {
        list.iter().map(|(s, k)| (s.to_string(), *k)).collect()
    }

    use EntityKind::{Concept, Instance};

    fn toy() -> KnowledgeGraph {
        let k = kinds(&[
            ("burnA", Instance),
            ("burnB", Instance),
            ("Dermatosis", Concept),
            ("Disease", Concept),
            ("Medicine", Concept),
        ]);
        let raw = vec![
            RawTriple::new("burnA", INSTANCE_OF, "Dermatosis"),
            RawTriple::new("Dermatosis", SUBCLASS_OF, "Disease"),
            RawTriple::new("burnA", "worse_than", "burnB"),
            RawTriple::new("burnB", "treated_with", "Medicine"),
            RawTriple::new("Dermatosis", "cured_by", "Medicine"),
        ];
        build_graph(&raw, &k, DuplicatePolicy::Strict).unwrap()
    }

    #[test]
    fn single_instance_of_triple() {
        let k = kinds(&[("burnA", Instance), ("Dermatosis", Concept)]);
        let kg = build_graph(
            &[RawTriple::new("burnA", "instanceOf", "Dermatosis")],
            &k,
            DuplicatePolicy::Strict,
        )
        .unwrap();
        assert_eq!(kg.subset_sizes(), [1, 0, 0, 0, 0]);
    }

    #[test]
    fn concept_pair_with_plain_relation_is_nhh() {
        let k = kinds(&[("Dermatosis", Concept), ("Medicine", Concept)]);
        let kg = build_graph(
            &[RawTriple::new("Dermatosis", "cured_by", "Medicine")],
            &k,
            DuplicatePolicy::Strict,
        )
        .unwrap();
        assert_eq!(kg.subset_sizes(), [0, 0, 0, 0, 1]);
    }

    #[test]
    fn instance_of_into_instance_is_rejected() {
        let k = kinds(&[("a", Instance), ("b", Instance)]);
        let err = build_graph(
            &[RawTriple::new("a", "instanceOf", "b")],
            &k,
            DuplicatePolicy::Strict,
        )
        .unwrap_err();
        assert!(matches!(err, Error::KindMismatch(_)), "{err}");
    }

    #[test]
    fn reserved_names_are_case_sensitive() {
        let k = kinds(&[("a", Instance), ("b", Concept)]);
        let kg = build_graph(
            &[RawTriple::new("a", "InstanceOf", "b")],
            &k,
            DuplicatePolicy::Strict,
        )
        .unwrap();
        assert_eq!(kg.subset_sizes(), [0, 0, 0, 1, 0]);
    }

    #[test]
    fn unknown_and_conflicting_entities() {
        let k = kinds(&[("a", Instance)]);
        let err = build_graph(
            &[RawTriple::new("a", "r", "zz")],
            &k,
            DuplicatePolicy::Strict,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownEntity(ref s) if s == "zz"));

        let k = kinds(&[("a", Instance), ("a", Concept)]);
        assert!(matches!(
            build_graph(&[], &k, DuplicatePolicy::Strict),
            Err(Error::ConflictingKind(_))
        ));
    }

    #[test]
    fn concept_to_instance_has_no_family() {
        let k = kinds(&[("c", Concept), ("i", Instance)]);
        let err = build_graph(
            &[RawTriple::new("c", "r", "i")],
            &k,
            DuplicatePolicy::Strict,
        )
        .unwrap_err();
        assert!(matches!(err, Error::KindMismatch(_)));
    }

    #[test]
    fn duplicates_strict_and_lenient() {
        let k = kinds(&[("a", Instance), ("b", Instance)]);
        let raw = vec![RawTriple::new("a", "r", "b"), RawTriple::new("a", "r", "b")];
        assert!(matches!(
            build_graph(&raw, &k, DuplicatePolicy::Strict),
            Err(Error::DuplicateTriple(..))
        ));
        let kg = build_graph(&raw, &k, DuplicatePolicy::Lenient).unwrap();
        assert_eq!(kg.num_triples(), 1);
        assert_eq!(kg.duplicates_dropped(), 1);
    }

    #[test]
    fn adjacency_indices() {
        let kg = toy();
        let derm = kg.resolve("Dermatosis").unwrap();
        let med = kg.resolve("Medicine").unwrap();
        assert_eq!(kg.by_head(derm).len(), 2);
        assert_eq!(kg.by_tail(med).len(), 2);
        let cured = kg.relation_id("cured_by").unwrap();
        assert_eq!(kg.by_relation(cured).len(), 1);
        assert_eq!(kg.by_relation(RelationId::INSTANCE_OF).len(), 1);
        assert_eq!(kg.slot(med), 2);
    }

    #[test]
    fn valid_graph_has_empty_report() {
        assert!(validate_graph(&toy()).is_empty());
    }

    #[test]
    fn injected_duplicate_is_reported() {
        let mut kg = toy();
        let t = kg.subset(Subset::InstanceInstance)[0];
        kg.inject_unchecked(t);
        let report = validate_graph(&kg);
        assert_eq!(report.issues.len(), 1);
        assert!(matches!(
            report.issues[0],
            Issue::Duplicate {
                subset: Subset::InstanceInstance,
                index: 1,
                first: 0
            }
        ));
    }

    #[test]
    fn injected_concept_head_in_instance_instance_is_reported() {
        let mut kg = toy();
        let derm = kg.resolve("Dermatosis").unwrap();
        let b = kg.resolve("burnB").unwrap();
        let r = kg.relation_id("worse_than").unwrap();
        kg.inject_unchecked(Triple {
            head: derm,
            relation: r,
            tail: b,
            subset: Subset::InstanceInstance,
        });
        let report = validate_graph(&kg);
        assert!(report.issues.iter().any(|i| matches!(
            i,
            Issue::KindMismatch {
                subset: Subset::InstanceInstance,
                ..
            }
        )));
    }

    #[test]
    fn injected_dangling_ids_are_reported() {
        let mut kg = toy();
        kg.inject_unchecked(Triple {
            head: EntityId(99),
            relation: RelationId(42),
            tail: EntityId(0),
            subset: Subset::InstanceInstance,
        });
        let report = validate_graph(&kg);
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, Issue::DanglingEntity { .. })));
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, Issue::DanglingRelation { .. })));
    }

    fn index_of(pairs: &[(&str, u32)]) -> SynonymIndex {
        let kg = toy();
        let data = PairDataset::new(
            pairs
                .iter()
                .map(|(m, e)| Pair::new(*m, EntityId(*e), Split::Train))
                .collect(),
        )
        .unwrap();
        build_synonym_index(&data, &kg).unwrap()
    }

    #[test]
    fn synonym_index_two_golds() {
        let idx = index_of(&[("m1", 1), ("m1", 2)]);
        assert_eq!(
            idx.golds("m1").iter().copied().collect::<Vec<_>>(),
            vec![EntityId(1), EntityId(2)]
        );
        assert_eq!(
            idx.co_synonyms(EntityId(1))
                .iter()
                .copied()
                .collect::<Vec<_>>(),
            vec![EntityId(2)]
        );
    }

    #[test]
    fn synonym_index_single_gold_has_no_co_synonyms() {
        let idx = index_of(&[("m1", 1)]);
        assert!(idx.co_synonyms(EntityId(1)).is_empty());
    }

    #[test]
    fn synonym_index_union_over_shared_mentions() {
        let pairs = [("m1", 1u32), ("m2", 1), ("m2", 3)];
        let idx = index_of(&pairs);
        // brute force: e ~ o iff some mention lists both
        let brute = |e: u32| -> Vec<EntityId> {
            let mut out: Vec<u32> = pairs
                .iter()
                .filter(|(m, x)| *x == e && !m.is_empty())
                .flat_map(|(m, _)| pairs.iter().filter(move |(m2, _)| m2 == m).map(|(_, o)| *o))
                .filter(|&o| o != e)
                .collect();
            out.sort();
            out.dedup();
            out.into_iter().map(EntityId).collect()
        };
        assert_eq!(
            idx.golds("m2").iter().copied().collect::<Vec<_>>(),
            vec![EntityId(1), EntityId(3)]
        );
        for e in [1, 3] {
            assert_eq!(
                idx.co_synonyms(EntityId(e))
                    .iter()
                    .copied()
                    .collect::<Vec<_>>(),
                brute(e)
            );
        }
        assert_eq!(
            idx.co_synonyms(EntityId(1))
                .iter()
                .copied()
                .collect::<Vec<_>>(),
            vec![EntityId(3)]
        );
    }

    #[test]
    fn synonym_index_rejects_unknown_entity() {
        let kg = toy();
        let data = PairDataset::new(vec![Pair::new("m", EntityId(77), Split::Test)]).unwrap();
        assert!(matches!(
            build_synonym_index(&data, &kg),
            Err(Error::UnknownEntity(_))
        ));
    }
}
