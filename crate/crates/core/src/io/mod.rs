//! Text formats, checkpoints and the synthetic data generator.

mod checkpoint;
mod pairs;
mod synthetic;
mod tsv;

use std::path::Path;

pub use checkpoint::{
    kge_container, kge_from_container, load_kge_checkpoint, load_matcher_checkpoint,
    matcher_container, matcher_from_container, save_kge_checkpoint, save_matcher_checkpoint,
    Container, KgeCheckpoint, FORMAT_VERSION, MAGIC,
};
pub use pairs::{Pair, PairDataset, Split};
pub use synthetic::{generate_synthetic, Perturbation, SyntheticSpec};
pub use tsv::{
    format_corpus, format_kinds, format_pairs, format_triples, load_corpus, load_kinds, load_pairs,
    load_triples, parse_corpus, parse_kinds, parse_pairs, parse_triples, save_corpus, save_kinds,
    save_pairs, save_triples,
};

use crate::error::Result;
use crate::kg::{build_graph, DuplicatePolicy, KnowledgeGraph};

pub const TRIPLES_FILE: &str = "triples.tsv";
pub const KINDS_FILE: &str = "kinds.tsv";
pub const PAIRS_FILE: &str = "pairs.tsv";
pub const CORPUS_FILE: &str = "corpus.txt";

/// A graph with its annotated pairs and unlabelled corpus.
#[derive(Debug, Clone)]
pub struct DataBundle {
    pub kg: KnowledgeGraph,
    pub pairs: PairDataset,
    pub corpus: Vec<String>,
}

impl DataBundle {
    /// Entity surfaces indexed by entity id.
    pub fn surfaces(&self) -> Vec<String> {
        self.kg
            .entities()
            .iter()
            .map(|e| e.surface.clone())
            .collect()
    }

    /// Writes the four bundle files into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        save_triples(&self.kg.raw_triples(), &dir.join(TRIPLES_FILE))?;
        save_kinds(&self.kg.kind_registry(), &dir.join(KINDS_FILE))?;
        save_pairs(&self.pairs, &self.kg, &dir.join(PAIRS_FILE))?;
        save_corpus(&self.corpus, &dir.join(CORPUS_FILE))
    }

    /// Reads a bundle directory. A missing corpus file means an empty
    /// corpus.
    pub fn load(dir: &Path, policy: DuplicatePolicy) -> Result<Self> {
        let kg = load_graph(&dir.join(TRIPLES_FILE), &dir.join(KINDS_FILE), policy)?;
        let pairs = load_pairs(&dir.join(PAIRS_FILE), &kg)?;
        let corpus_path = dir.join(CORPUS_FILE);
        let corpus = if corpus_path.exists() {
            load_corpus(&corpus_path)?
        } else {
            Vec::new()
        };
        Ok(DataBundle { kg, pairs, corpus })
    }
}

pub fn load_graph(triples: &Path, kinds: &Path, policy: DuplicatePolicy) -> Result<KnowledgeGraph> {
    build_graph(&load_triples(triples)?, &load_kinds(kinds)?, policy)
}
