//! Seeded generator for a desk-scale knowledge graph with annotated
//! mention pairs and a small corpus.
//!
//! Entity surfaces are spelled from a "formal" alphabet (`a` to `m`) and
//! every colloquial form from a disjoint alphabet (`n` to `z`), so a mention
//! built only from colloquial words shares no subword with any entity
//! surface under every tokenizer mode. Each instance is the target of one
//! non-hierarchical relation to a concept, and its colloquial paraphrase is
//! spelled from hints attached to its leaf concept and to that target.
//! Telling leaf-mates apart from a paraphrase therefore needs the graph.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::pairs::{Pair, PairDataset, Split};
use super::DataBundle;
use crate::error::{Error, Result};
use crate::kg::{
    build_graph, DuplicatePolicy, EntityId, EntityKind, RawTriple, INSTANCE_OF, SUBCLASS_OF,
};

const FORMAL: &[u8] = b"abcdefghijklm";
const COLLOQUIAL: &[u8] = b"nopqrstuvwxyz";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Perturbation {
    Identity,
    CharDrop,
    CharSwap,
    /// One formal word replaced by (or joined with) its colloquial
    /// counterpart; the mention keeps a formal word.
    SynonymSubword,
    /// Only colloquial words; shares no subword with the surface.
    Paraphrase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    /// Levels below the root concept.
    pub depth: usize,
    pub branching: usize,
    pub instances_per_leaf: usize,
    /// Number of distinct non-hierarchical relation names.
    pub relation_types: usize,
    /// Random instance-instance triples per instance.
    pub instance_links: usize,
    /// Random concept-concept triples per concept.
    pub concept_links: usize,
    /// Mentions generated per entity before deduplication. Variant `v`
    /// uses `perturbations[v % len]`.
    pub variants: usize,
    pub perturbations: Vec<Perturbation>,
    /// Train, dev and test fractions.
    pub split: [f64; 3],
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            depth: 2,
            branching: 3,
            instances_per_leaf: 4,
            relation_types: 3,
            instance_links: 1,
            concept_links: 1,
            variants: 5,
            perturbations: vec![
                Perturbation::Identity,
                Perturbation::CharDrop,
                Perturbation::CharSwap,
                Perturbation::SynonymSubword,
                Perturbation::Paraphrase,
            ],
            split: [0.8, 0.1, 0.1],
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::SpecInvalid(m.to_string()));
        if self.depth == 0 || self.branching == 0 || self.instances_per_leaf == 0 {
            return bad("depth, branching and instances_per_leaf must be at least 1");
        }
        if self.relation_types == 0 || self.variants == 0 {
            return bad("relation_types and variants must be at least 1");
        }
        if self.perturbations.is_empty() {
            return bad("at least one perturbation is required");
        }
        if self.split.iter().any(|&r| !(0.0..=1.0).contains(&r))
            || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad("split ratios must lie in [0, 1] and sum to 1");
        }
        let leaves = (self.branching as f64).powi(self.depth as i32);
        if leaves * (self.instances_per_leaf as f64 + 2.0) > 2e6 {
            return bad("tree is too large");
        }
        Ok(())
    }
}

struct Words<'r> {
    rng: &'r mut ChaCha8Rng,
    used: HashSet<String>,
}

impl Words<'_> {
    fn fresh(&mut self, alphabet: &[u8]) -> String {
        loop {
            let len = self.rng.gen_range(4..=6);
            let w: String = (0..len)
                .map(|_| alphabet[self.rng.gen_range(0..alphabet.len())] as char)
                .collect();
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }
}

struct Concept {
    stem: String,
    alias: String,
    member_hint: String,
    target_hint: String,
    parent: Option<usize>,
}

struct Instance {
    own: String,
    own_alias: String,
    leaf: usize,
    target: usize,
}

fn char_drop(word: &str, rng: &mut impl Rng) -> String {
    let chars: Vec<char> = word.chars().collect();
    let i = rng.gen_range(0..chars.len());
    chars
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, c)| c)
        .collect()
}

fn char_swap(word: &str, rng: &mut impl Rng) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let i = rng.gen_range(0..chars.len() - 1);
    chars.swap(i, i + 1);
    chars.into_iter().collect()
}

/// Generates a graph, mention pairs and a corpus. Identical specs give
/// identical outputs.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<DataBundle> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Concept tree, breadth first.
    let mut concepts: Vec<Concept> = Vec::new();
    let mut leaves: Vec<usize> = Vec::new();
    {
        let mut words = Words {
            rng: &mut rng,
            used: HashSet::new(),
        };
        let mut frontier = vec![None];
        for level in 0..=spec.depth {
            let mut next = Vec::new();
            for parent in frontier {
                let count = if parent.is_none() { 1 } else { spec.branching };
                for _ in 0..count {
                    let id = concepts.len();
                    concepts.push(Concept {
                        stem: words.fresh(FORMAL),
                        alias: words.fresh(COLLOQUIAL),
                        member_hint: words.fresh(COLLOQUIAL),
                        target_hint: words.fresh(COLLOQUIAL),
                        parent,
                    });
                    if level == spec.depth {
                        leaves.push(id);
                    }
                    next.push(Some(id));
                }
            }
            frontier = next;
            if level == spec.depth {
                break;
            }
        }
    }
    let mut words = Words {
        rng: &mut rng,
        used: concepts
            .iter()
            .flat_map(|c| {
                [
                    c.stem.clone(),
                    c.alias.clone(),
                    c.member_hint.clone(),
                    c.target_hint.clone(),
                ]
            })
            .collect(),
    };
    let mut instance_words = Vec::new();
    for _ in 0..leaves.len() * spec.instances_per_leaf {
        instance_words.push((words.fresh(FORMAL), words.fresh(COLLOQUIAL)));
    }
    drop(words);

    let mut instances: Vec<Instance> = Vec::new();
    let mut iw = instance_words.into_iter();
    for &leaf in &leaves {
        let pool: Vec<usize> = (0..concepts.len()).filter(|&c| c != leaf).collect();
        let targets: Vec<usize> = if pool.len() >= spec.instances_per_leaf {
            index::sample(&mut rng, pool.len(), spec.instances_per_leaf)
                .into_iter()
                .map(|i| pool[i])
                .collect()
        } else if pool.is_empty() {
            vec![leaf; spec.instances_per_leaf]
        } else {
            (0..spec.instances_per_leaf)
                .map(|_| pool[rng.gen_range(0..pool.len())])
                .collect()
        };
        for target in targets {
            let (own, own_alias) = iw.next().expect("one word pair per instance");
            instances.push(Instance {
                own,
                own_alias,
                leaf,
                target,
            });
        }
    }

    let concept_surface = |c: usize| concepts[c].stem.clone();
    let instance_surface = |i: &Instance| format!("{} {}", i.own, concepts[i.leaf].stem);

    // Entity registry: concepts then instances.
    let nc = concepts.len();
    let mut kinds: Vec<(String, EntityKind)> = (0..nc)
        .map(|c| (concept_surface(c), EntityKind::Concept))
        .collect();
    kinds.extend(
        instances
            .iter()
            .map(|i| (instance_surface(i), EntityKind::Instance)),
    );

    let relation = |r: usize| format!("rel{r}");
    let mut triples: Vec<RawTriple> = Vec::new();
    let mut seen: HashSet<(usize, usize, usize)> = HashSet::new();
    for (c, concept) in concepts.iter().enumerate() {
        if let Some(p) = concept.parent {
            triples.push(RawTriple::new(
                concept_surface(c),
                SUBCLASS_OF,
                concept_surface(p),
            ));
        }
    }
    for inst in &instances {
        triples.push(RawTriple::new(
            instance_surface(inst),
            INSTANCE_OF,
            concept_surface(inst.leaf),
        ));
    }
    // Entity indices below: concepts 0..nc, instances nc.. .
    for (k, inst) in instances.iter().enumerate() {
        let r = rng.gen_range(0..spec.relation_types);
        if seen.insert((nc + k, r, inst.target)) {
            triples.push(RawTriple::new(
                instance_surface(inst),
                relation(r),
                concept_surface(inst.target),
            ));
        }
    }
    let ni = instances.len();
    if ni > 1 {
        for k in 0..ni {
            for _ in 0..spec.instance_links {
                let mut j = rng.gen_range(0..ni - 1);
                if j >= k {
                    j += 1;
                }
                let r = rng.gen_range(0..spec.relation_types);
                if seen.insert((nc + k, r, nc + j)) {
                    triples.push(RawTriple::new(
                        instance_surface(&instances[k]),
                        relation(r),
                        instance_surface(&instances[j]),
                    ));
                }
            }
        }
    }
    if nc > 1 {
        for c in 0..nc {
            for _ in 0..spec.concept_links {
                let mut j = rng.gen_range(0..nc - 1);
                if j >= c {
                    j += 1;
                }
                let r = rng.gen_range(0..spec.relation_types);
                if seen.insert((c, r, j)) {
                    triples.push(RawTriple::new(
                        concept_surface(c),
                        relation(r),
                        concept_surface(j),
                    ));
                }
            }
        }
    }
    let kg = build_graph(&triples, &kinds, DuplicatePolicy::Strict)?;

    // Mentions.
    let mut raw_pairs: Vec<(String, EntityId)> = Vec::new();
    let mut seen_pairs: HashSet<(String, EntityId)> = HashSet::new();
    for e in 0..nc + ni {
        let id = EntityId(e as u32);
        let surface = kinds[e].0.clone();
        for v in 0..spec.variants {
            let op = spec.perturbations[v % spec.perturbations.len()];
            let mention = if e < nc {
                let c = &concepts[e];
                match op {
                    Perturbation::Identity => surface.clone(),
                    Perturbation::CharDrop => char_drop(&c.stem, &mut rng),
                    Perturbation::CharSwap => char_swap(&c.stem, &mut rng),
                    Perturbation::SynonymSubword => format!("{} {}", c.alias, c.stem),
                    Perturbation::Paraphrase => match c.parent {
                        Some(p) => format!("{} {}", c.alias, concepts[p].member_hint),
                        None => c.alias.clone(),
                    },
                }
            } else {
                let inst = &instances[e - nc];
                let leaf = &concepts[inst.leaf];
                match op {
                    Perturbation::Identity => surface.clone(),
                    Perturbation::CharDrop => {
                        format!("{} {}", char_drop(&inst.own, &mut rng), leaf.stem)
                    }
                    Perturbation::CharSwap => {
                        format!("{} {}", inst.own, char_swap(&leaf.stem, &mut rng))
                    }
                    Perturbation::SynonymSubword => format!("{} {}", inst.own, leaf.alias),
                    Perturbation::Paraphrase => {
                        format!("{} {}", leaf.member_hint, concepts[inst.target].target_hint)
                    }
                }
            };
            if seen_pairs.insert((mention.clone(), id)) {
                raw_pairs.push((mention, id));
            }
        }
    }
    raw_pairs.shuffle(&mut rng);
    let n = raw_pairs.len();
    let n_train = (spec.split[0] * n as f64).round() as usize;
    let n_dev = ((spec.split[1] * n as f64).round() as usize).min(n - n_train.min(n));
    let pairs = raw_pairs
        .into_iter()
        .enumerate()
        .map(|(i, (m, id))| {
            let split = if i < n_train {
                Split::Train
            } else if i < n_train + n_dev {
                Split::Dev
            } else {
                Split::Test
            };
            Pair::new(m, id, split)
        })
        .collect();
    let pairs = PairDataset::new(pairs)?;

    // Corpus: each concept's formal and colloquial words co-occur, and
    // each instance alias appears next to its own word.
    let mut corpus = Vec::new();
    for c in &concepts {
        corpus.push(format!(
            "{} {} {} {}",
            c.stem, c.alias, c.member_hint, c.target_hint
        ));
        corpus.push(format!("{} {}", c.alias, c.stem));
    }
    for inst in &instances {
        corpus.push(format!("{} {}", inst.own, inst.own_alias));
    }

    Ok(DataBundle { kg, pairs, corpus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{validate_graph, Subset};

    #[test]
    fn small_tree_counts() {
        let spec = SyntheticSpec {
            depth: 1,
            branching: 2,
            instances_per_leaf: 1,
            ..SyntheticSpec::default()
        };
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(b.kg.concepts().len(), 3);
        assert_eq!(b.kg.instances().len(), 2);
        assert_eq!(b.kg.subset(Subset::SubClassOf).len(), 2);
        assert_eq!(b.kg.subset(Subset::InstanceOf).len(), 2);
    }

    #[test]
    fn output_validates() {
        let b = generate_synthetic(&SyntheticSpec::default()).unwrap();
        assert!(validate_graph(&b.kg).is_empty());
    }

    #[test]
    fn rejects_bad_specs() {
        let s = SyntheticSpec {
            split: [0.5, 0.1, 0.1],
            ..SyntheticSpec::default()
        };
        assert!(matches!(generate_synthetic(&s), Err(Error::SpecInvalid(_))));
        let s = SyntheticSpec {
            depth: 0,
            ..SyntheticSpec::default()
        };
        assert!(generate_synthetic(&s).is_err());
        let s = SyntheticSpec {
            perturbations: vec![],
            ..SyntheticSpec::default()
        };
        assert!(generate_synthetic(&s).is_err());
    }
}
