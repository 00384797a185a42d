#![allow(dead_code)]

use std::collections::HashSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use synlink::kg::{
    build_graph, DuplicatePolicy, EntityKind, KnowledgeGraph, RawTriple, INSTANCE_OF, SUBCLASS_OF,
};
use synlink::tensor::norm;

/// Writes one result line straight to the process stderr so it shows up
/// even when the test harness captures output.
pub fn report_line(id: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("[acceptance {id}] {verdict}: {name} ({detail})\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

/// Norm-wise relative error between analytic and numeric gradients, with
/// the denominator floored at 1e-6.
pub fn rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    let diff: Vec<f64> = analytic.iter().zip(numeric).map(|(a, n)| a - n).collect();
    norm(&diff) / norm(analytic).max(norm(numeric)).max(1e-6)
}

/// Central differences of `f` with respect to every entry of `x`.
pub fn numeric_grad(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

pub fn random_vec(rng: &mut impl Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// A random graph with triples in all five families, built until
/// `num_triples` distinct triples exist.
pub fn random_graph(
    seed: u64,
    instances: usize,
    concepts: usize,
    num_triples: usize,
) -> KnowledgeGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst: Vec<String> = (0..instances).map(|i| format!("inst{i}")).collect();
    let conc: Vec<String> = (0..concepts).map(|i| format!("Conc{i}")).collect();
    let mut kinds: Vec<(String, EntityKind)> = inst
        .iter()
        .map(|s| (s.clone(), EntityKind::Instance))
        .collect();
    kinds.extend(conc.iter().map(|s| (s.clone(), EntityKind::Concept)));
    let mut seen = HashSet::new();
    let mut raw = Vec::new();
    while raw.len() < num_triples {
        let rel = format!("r{}", rng.gen_range(0..3));
        let t = match rng.gen_range(0..5) {
            0 => RawTriple::new(
                &inst[rng.gen_range(0..instances)],
                INSTANCE_OF,
                &conc[rng.gen_range(0..concepts)],
            ),
            1 => {
                let (a, b) = (rng.gen_range(0..concepts), rng.gen_range(0..concepts));
                if a == b {
                    continue;
                }
                RawTriple::new(&conc[a], SUBCLASS_OF, &conc[b])
            }
            2 => RawTriple::new(
                &inst[rng.gen_range(0..instances)],
                rel,
                &inst[rng.gen_range(0..instances)],
            ),
            3 => RawTriple::new(
                &inst[rng.gen_range(0..instances)],
                rel,
                &conc[rng.gen_range(0..concepts)],
            ),
            _ => RawTriple::new(
                &conc[rng.gen_range(0..concepts)],
                rel,
                &conc[rng.gen_range(0..concepts)],
            ),
        };
        if seen.insert((t.head.clone(), t.relation.clone(), t.tail.clone())) {
            raw.push(t);
        }
    }
    build_graph(&raw, &kinds, DuplicatePolicy::Strict).expect("random graph is valid")
}
