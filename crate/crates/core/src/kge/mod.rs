//! Knowledge embeddings: concepts as spheres plus node vectors, instances
//! and relations as vectors, trained jointly with margin ranking over the
//! five triple families.

mod loss;
mod sampling;
mod store;
mod train;

pub use loss::{
    hinge, instance_of_grad, loss_instance_instance, loss_instance_of, loss_nhh_concept_concept,
    loss_nhh_instance_concept, loss_subclass_of, sphere_contains, subclass_grad, translation_grad,
    translation_loss, InstanceOfGrad, SubclassGrad, TranslationGrad,
};
pub use sampling::{sample_negative_triple, MAX_RESAMPLES};
pub use store::{entity_knowledge_embedding, EmbeddingStore, Param, INITIAL_RADIUS, RADIUS_FLOOR};
pub use train::{
    hinge_grad, joint_objective, train_kge, train_kge_in_place, train_kge_traced, triple_grad,
    triple_loss, KgeConfig, KgeTrace, Margins, ParamGrads,
};

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::kg::{
        build_graph, DuplicatePolicy, EntityId, EntityKind, KnowledgeGraph, RawTriple, Subset,
    };
    use crate::tensor::{norm, Matrix};

    fn graph(kinds: &[(&str, EntityKind)], raw: &[(&str, &str, &str)]) -> KnowledgeGraph {
        let kinds: Vec<_> = kinds.iter().map(|(s, k)| (s.to_string(), *k)).collect();
        let raw: Vec<_> = raw
            .iter()
            .map(|(h, r, t)| RawTriple::new(*h, *r, *t))
            .collect();
        build_graph(&raw, &kinds, DuplicatePolicy::Strict).unwrap()
    }

    use EntityKind::{Concept, Instance};

    #[test]
    fn empty_graph_objective_is_zero() {
        let kg = graph(&[], &[]);
        let store = EmbeddingStore::for_graph(&kg, 4, 0);
        assert_eq!(joint_objective(&kg, &store).unwrap(), 0.0);
    }

    #[test]
    fn single_instance_instance_objective() {
        let kg = graph(&[("a", Instance), ("b", Instance)], &[("a", "r", "b")]);
        let mut store = EmbeddingStore::for_graph(&kg, 2, 0);
        store.instance_vecs = Matrix::from_vec(2, 2, vec![0., 0., 3., 4.]);
        store.relation_vecs.row_mut(2).copy_from_slice(&[0., 0.]);
        assert_eq!(joint_objective(&kg, &store).unwrap(), 25.0);
    }

    #[test]
    fn objective_rejects_short_store() {
        let kg = graph(&[("a", Instance), ("b", Instance)], &[("a", "r", "b")]);
        let store = EmbeddingStore::init(1, 0, 3, 2, 0);
        assert!(matches!(
            joint_objective(&kg, &store),
            Err(crate::Error::MissingEmbedding(_))
        ));
    }

    fn three_instance_graph() -> KnowledgeGraph {
        graph(
            &[
                ("a", Instance),
                ("b", Instance),
                ("c", Instance),
                ("C", Concept),
                ("D", Concept),
            ],
            &[
                ("a", "r", "b"),
                ("a", "instanceOf", "C"),
                ("b", "instanceOf", "C"),
            ],
        )
    }

    #[test]
    fn corrupted_tail_stays_an_instance_and_is_false() {
        let kg = three_instance_graph();
        let pos = kg.subset(Subset::InstanceInstance)[0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let neg = sample_negative_triple(&pos, &kg, &mut rng).unwrap();
            assert_eq!(neg.subset, pos.subset);
            assert_eq!(neg.relation, pos.relation);
            assert_eq!(kg.kind(neg.head), Instance);
            assert_eq!(kg.kind(neg.tail), Instance);
            assert!(!kg.contains(neg.subset, neg.head, neg.relation, neg.tail));
            if neg.head == pos.head {
                assert_ne!(neg.tail, pos.tail);
            }
        }
    }

    #[test]
    fn instance_of_head_corruption_draws_instances() {
        let kg = three_instance_graph();
        let pos = kg.subset(Subset::InstanceOf)[0];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let neg = sample_negative_triple(&pos, &kg, &mut rng).unwrap();
            if neg.tail == pos.tail {
                assert_eq!(kg.kind(neg.head), Instance);
                // b is also a member of C, so only c is a valid replacement
                assert_eq!(neg.head, kg.resolve("c").unwrap());
            } else {
                assert_eq!(kg.kind(neg.tail), Concept);
            }
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let kg = three_instance_graph();
        let pos = kg.subset(Subset::InstanceInstance)[0];
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| sample_negative_triple(&pos, &kg, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
    }

    #[test]
    fn degenerate_graph_exhausts_candidates() {
        let kg = graph(
            &[("a", Instance), ("C", Concept)],
            &[("a", "instanceOf", "C")],
        );
        let pos = kg.subset(Subset::InstanceOf)[0];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_negative_triple(&pos, &kg, &mut rng),
            Err(crate::Error::ExhaustedCandidates(_))
        ));
    }

    #[test]
    fn zero_epochs_returns_the_initialisation() {
        let kg = three_instance_graph();
        let cfg = KgeConfig {
            dim: 8,
            epochs: 0,
            seed: 5,
            ..Default::default()
        };
        let store = train_kge(&kg, &cfg).unwrap();
        assert_eq!(store, EmbeddingStore::for_graph(&kg, 8, 5));
    }

    #[test]
    fn training_is_bitwise_deterministic() {
        let kg = three_instance_graph();
        let cfg = KgeConfig {
            dim: 8,
            epochs: 20,
            seed: 5,
            ..Default::default()
        };
        let a = train_kge(&kg, &cfg).unwrap();
        let b = train_kge(&kg, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn training_keeps_constraints() {
        let kg = three_instance_graph();
        let cfg = KgeConfig {
            dim: 4,
            epochs: 50,
            learning_rate: 0.5,
            seed: 1,
            ..Default::default()
        };
        let store = train_kge(&kg, &cfg).unwrap();
        assert!(store.concept_radii.iter().all(|&m| m >= RADIUS_FLOOR));
        for r in 0..store.num_instances() {
            assert!(norm(store.instance_vecs.row(r)) <= 1.0 + 1e-12);
        }
        for r in 0..store.num_concepts() {
            assert!(norm(store.concept_node_vecs.row(r)) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn toy_hierarchy_separates_members_from_non_members() {
        // one concept with three members, plus three outsiders that serve as
        // held-out head corruptions
        let kg = graph(
            &[
                ("m1", Instance),
                ("m2", Instance),
                ("m3", Instance),
                ("o1", Instance),
                ("o2", Instance),
                ("o3", Instance),
                ("C", Concept),
            ],
            &[
                ("m1", "instanceOf", "C"),
                ("m2", "instanceOf", "C"),
                ("m3", "instanceOf", "C"),
            ],
        );
        let cfg = KgeConfig {
            dim: 16,
            epochs: 200,
            seed: 7,
            ..Default::default()
        };
        let store = train_kge(&kg, &cfg).unwrap();
        let c = kg.resolve("C").unwrap();
        let f = |name: &str| {
            let i = kg.resolve(name).unwrap();
            loss_instance_of(
                store.instance_vecs.row(kg.slot(i)),
                store.concept_centers.row(kg.slot(c)),
                store.concept_radii[kg.slot(c)],
            )
            .unwrap()
        };
        let members = (f("m1") + f("m2") + f("m3")) / 3.0;
        let outsiders = (f("o1") + f("o2") + f("o3")) / 3.0;
        assert!(
            members < outsiders,
            "members {members} outsiders {outsiders}"
        );
    }

    #[test]
    fn concept_embedding_is_center_node_average() {
        let kg = graph(&[("i", Instance), ("c", Concept)], &[]);
        let mut store = EmbeddingStore::for_graph(&kg, 2, 0);
        store.instance_vecs.row_mut(0).copy_from_slice(&[1., 2.]);
        store.concept_centers.row_mut(0).copy_from_slice(&[1., 0.]);
        store
            .concept_node_vecs
            .row_mut(0)
            .copy_from_slice(&[0., 1.]);
        assert_eq!(
            entity_knowledge_embedding(&store, &kg, EntityId(0)).unwrap(),
            vec![1., 2.]
        );
        assert_eq!(
            entity_knowledge_embedding(&store, &kg, EntityId(1)).unwrap(),
            vec![0.5, 0.5]
        );
        store.concept_centers.row_mut(0).copy_from_slice(&[2., 2.]);
        store
            .concept_node_vecs
            .row_mut(0)
            .copy_from_slice(&[2., 2.]);
        assert_eq!(
            entity_knowledge_embedding(&store, &kg, EntityId(1)).unwrap(),
            vec![2., 2.]
        );
        assert!(matches!(
            entity_knowledge_embedding(&store, &kg, EntityId(9)),
            Err(crate::Error::UnknownEntity(_))
        ));
    }

    #[test]
    fn translation_only_mode_skips_sphere_families() {
        let kg = three_instance_graph();
        let cfg = KgeConfig {
            dim: 4,
            epochs: 30,
            seed: 2,
            hierarchy_losses: false,
            ..Default::default()
        };
        let store = train_kge(&kg, &cfg).unwrap();
        let init = EmbeddingStore::for_graph(&kg, 4, 2);
        assert_eq!(store.concept_centers, init.concept_centers);
        assert_eq!(store.concept_radii, init.concept_radii);
    }
}
