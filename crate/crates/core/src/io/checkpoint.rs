//! Versioned binary container for model state.
//!
//! Layout: 6 magic bytes, 1 version byte, header length (u64 LE), header
//! JSON, tensor payload as f64 little-endian in header order, then the
//! SHA-256 digest of everything before it.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::kg::{build_graph, DuplicatePolicy, EntityKind, KnowledgeGraph, RawTriple};
use crate::kge::{EmbeddingStore, KgeConfig};
use crate::matcher::{
    EntityCatalog, FusionMode, FusionParams, GateActivation, GateParams, MatcherConfig,
    MatcherModel,
};
use crate::semantic::{SemanticTable, SubwordVocab, TokenizerMode, TwoLayerFc};
use crate::tensor::Matrix;

pub const MAGIC: [u8; 6] = *b"SYNLNK";
pub const FORMAT_VERSION: u8 = 1;
const DIGEST_LEN: usize = 32;
const PREFIX_LEN: usize = MAGIC.len() + 1 + 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    kind: String,
    meta: serde_json::Value,
    tensors: Vec<TensorEntry>,
}

/// Named tensors plus JSON metadata, tagged with a kind string.
#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub kind: String,
    pub meta: serde_json::Value,
    pub tensors: Vec<(String, Matrix)>,
}

impl Container {
    pub fn new(kind: impl Into<String>, meta: serde_json::Value) -> Self {
        Container {
            kind: kind.into(),
            meta,
            tensors: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, m: Matrix) {
        self.tensors.push((name.to_string(), m));
    }

    pub fn push_vec(&mut self, name: &str, v: &[f64]) {
        self.push(name, Matrix::from_vec(1, v.len(), v.to_vec()));
    }

    pub fn tensor(&self, name: &str) -> Result<&Matrix> {
        self.tensors
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::CorruptChecksum(format!("missing tensor `{name}`")))
    }

    fn take(&mut self, name: &str) -> Result<Matrix> {
        let pos = self
            .tensors
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::CorruptChecksum(format!("missing tensor `{name}`")))?;
        Ok(self.tensors.remove(pos).1)
    }

    fn take_vec(&mut self, name: &str) -> Result<Vec<f64>> {
        Ok(self.take(name)?.into_vec())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = Header {
            kind: self.kind.clone(),
            meta: self.meta.clone(),
            tensors: self
                .tensors
                .iter()
                .map(|(name, m)| TensorEntry {
                    name: name.clone(),
                    rows: m.rows(),
                    cols: m.cols(),
                })
                .collect(),
        };
        let header = serde_json::to_vec(&header).expect("header serializes");
        let payload: usize = self
            .tensors
            .iter()
            .map(|(_, m)| m.as_slice().len() * 8)
            .sum();
        let mut out = Vec::with_capacity(PREFIX_LEN + header.len() + payload + DIGEST_LEN);
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        for (_, m) in &self.tensors {
            for x in m.as_slice() {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 1 {
            return Err(Error::CorruptChecksum("file too short".into()));
        }
        if bytes[..MAGIC.len()] != MAGIC {
            return Err(Error::CorruptChecksum("bad magic bytes".into()));
        }
        let version = bytes[MAGIC.len()];
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        if bytes.len() < PREFIX_LEN + DIGEST_LEN {
            return Err(Error::CorruptChecksum("file truncated".into()));
        }
        let (body, digest) = bytes.split_at(bytes.len() - DIGEST_LEN);
        if Sha256::digest(body).as_slice() != digest {
            return Err(Error::CorruptChecksum(
                "digest does not match contents".into(),
            ));
        }
        let header_len = u64::from_le_bytes(
            body[MAGIC.len() + 1..PREFIX_LEN]
                .try_into()
                .expect("8 bytes"),
        ) as usize;
        let header_end = PREFIX_LEN
            .checked_add(header_len)
            .filter(|&e| e <= body.len())
            .ok_or_else(|| Error::CorruptChecksum("header length out of range".into()))?;
        let header: Header = serde_json::from_slice(&body[PREFIX_LEN..header_end])
            .map_err(|e| Error::CorruptChecksum(format!("header: {e}")))?;
        let mut payload = body[header_end..].chunks_exact(8);
        let expected: usize = header.tensors.iter().map(|t| t.rows * t.cols).sum();
        if payload.len() != expected || !payload.remainder().is_empty() {
            return Err(Error::CorruptChecksum(
                "payload size does not match header".into(),
            ));
        }
        let tensors = header
            .tensors
            .into_iter()
            .map(|t| {
                let data: Vec<f64> = payload
                    .by_ref()
                    .take(t.rows * t.cols)
                    .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                    .collect();
                (t.name, Matrix::from_vec(t.rows, t.cols, data))
            })
            .collect();
        Ok(Container {
            kind: header.kind,
            meta: header.meta,
            tensors,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
        }
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path).map_err(|e| Error::io(path, e))?)
    }

    fn expect_kind(&self, kind: &str) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "checkpoint holds `{}`, expected `{kind}`",
                self.kind
            )))
        }
    }
}

fn meta_field<T: for<'de> Deserialize<'de>>(meta: &serde_json::Value, key: &str) -> Result<T> {
    let v = meta
        .get(key)
        .ok_or_else(|| Error::CorruptChecksum(format!("header missing `{key}`")))?;
    serde_json::from_value(v.clone())
        .map_err(|e| Error::CorruptChecksum(format!("header `{key}`: {e}")))
}

/// Graph description stored alongside knowledge embeddings so a checkpoint
/// is usable on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct GraphMeta {
    kinds: Vec<(String, EntityKind)>,
    triples: Vec<(String, String, String)>,
}

impl GraphMeta {
    fn of(kg: &KnowledgeGraph) -> Self {
        GraphMeta {
            kinds: kg.kind_registry(),
            triples: kg
                .raw_triples()
                .into_iter()
                .map(|t| (t.head, t.relation, t.tail))
                .collect(),
        }
    }

    fn build(&self) -> Result<KnowledgeGraph> {
        let raw: Vec<RawTriple> = self
            .triples
            .iter()
            .map(|(h, r, t)| RawTriple::new(h, r, t))
            .collect();
        build_graph(&raw, &self.kinds, DuplicatePolicy::Strict)
    }
}

/// Trained knowledge embeddings together with the graph and configuration
/// that produced them.
#[derive(Debug, Clone)]
pub struct KgeCheckpoint {
    pub kg: KnowledgeGraph,
    pub store: EmbeddingStore,
    pub config: KgeConfig,
}

const KGE_KIND: &str = "kge";
const MATCHER_KIND: &str = "matcher";

pub fn kge_container(kg: &KnowledgeGraph, store: &EmbeddingStore, config: &KgeConfig) -> Container {
    let meta = serde_json::json!({
        "config": config,
        "graph": GraphMeta::of(kg),
    });
    let mut c = Container::new(KGE_KIND, meta);
    c.push("instance_vecs", store.instance_vecs.clone());
    c.push("concept_centers", store.concept_centers.clone());
    c.push_vec("concept_radii", &store.concept_radii);
    c.push("concept_node_vecs", store.concept_node_vecs.clone());
    c.push("relation_vecs", store.relation_vecs.clone());
    c
}

pub fn save_kge_checkpoint(
    kg: &KnowledgeGraph,
    store: &EmbeddingStore,
    config: &KgeConfig,
    path: &Path,
) -> Result<()> {
    kge_container(kg, store, config).write(path)
}

pub fn kge_from_container(mut c: Container) -> Result<KgeCheckpoint> {
    c.expect_kind(KGE_KIND)?;
    let config: KgeConfig = meta_field(&c.meta, "config")?;
    let graph: GraphMeta = meta_field(&c.meta, "graph")?;
    let kg = graph.build()?;
    let store = EmbeddingStore {
        instance_vecs: c.take("instance_vecs")?,
        concept_centers: c.take("concept_centers")?,
        concept_radii: c.take_vec("concept_radii")?,
        concept_node_vecs: c.take("concept_node_vecs")?,
        relation_vecs: c.take("relation_vecs")?,
    };
    store.check_covers(&kg)?;
    Ok(KgeCheckpoint { kg, store, config })
}

pub fn load_kge_checkpoint(path: &Path) -> Result<KgeCheckpoint> {
    kge_from_container(Container::read(path)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MatcherMeta {
    fusion_mode: FusionMode,
    gate_activation: GateActivation,
    tokenizer: TokenizerMode,
    vocab: Vec<String>,
    surfaces: Vec<String>,
    kinds: Vec<EntityKind>,
    config: Option<MatcherConfig>,
}

fn push_fc(c: &mut Container, prefix: &str, fc: &TwoLayerFc) {
    c.push(&format!("{prefix}.w1"), fc.w1.clone());
    c.push_vec(&format!("{prefix}.b1"), &fc.b1);
    c.push(&format!("{prefix}.w2"), fc.w2.clone());
    c.push_vec(&format!("{prefix}.b2"), &fc.b2);
}

fn take_fc(c: &mut Container, prefix: &str) -> Result<TwoLayerFc> {
    Ok(TwoLayerFc {
        w1: c.take(&format!("{prefix}.w1"))?,
        b1: c.take_vec(&format!("{prefix}.b1"))?,
        w2: c.take(&format!("{prefix}.w2"))?,
        b2: c.take_vec(&format!("{prefix}.b2"))?,
    })
}

pub fn matcher_container(model: &MatcherModel, config: Option<&MatcherConfig>) -> Container {
    let meta = MatcherMeta {
        fusion_mode: model.mode,
        gate_activation: model.fusion.activation,
        tokenizer: model.vocab.mode(),
        vocab: model.vocab.tokens().to_vec(),
        surfaces: model.entities.surfaces.clone(),
        kinds: model.entities.kinds.clone(),
        config: config.cloned(),
    };
    let mut c = Container::new(
        MATCHER_KIND,
        serde_json::to_value(meta).expect("meta serializes"),
    );
    c.push("table", model.table.weights.clone());
    push_fc(&mut c, "semantic_fc", &model.semantic_fc);
    push_fc(&mut c, "knowledge_fc", &model.knowledge_fc);
    c.push("gate.wg", model.fusion.gate.wg.clone());
    c.push("fusion.wf", model.fusion.wf.clone());
    c.push("knowledge", model.knowledge.clone());
    c
}

pub fn save_matcher_checkpoint(
    model: &MatcherModel,
    config: Option<&MatcherConfig>,
    path: &Path,
) -> Result<()> {
    matcher_container(model, config).write(path)
}

/// A restored matcher and the configuration it was trained with, if any.
pub fn matcher_from_container(mut c: Container) -> Result<(MatcherModel, Option<MatcherConfig>)> {
    c.expect_kind(MATCHER_KIND)?;
    let meta: MatcherMeta = serde_json::from_value(c.meta.clone())
        .map_err(|e| Error::CorruptChecksum(format!("header: {e}")))?;
    let vocab = SubwordVocab::from_tokens(meta.vocab, meta.tokenizer)?;
    let table = SemanticTable {
        weights: c.take("table")?,
    };
    let semantic_fc = take_fc(&mut c, "semantic_fc")?;
    let knowledge_fc = take_fc(&mut c, "knowledge_fc")?;
    let fusion = FusionParams {
        gate: GateParams {
            wg: c.take("gate.wg")?,
        },
        wf: c.take("fusion.wf")?,
        activation: meta.gate_activation,
    };
    let knowledge = c.take("knowledge")?;
    let entities = EntityCatalog {
        surfaces: meta.surfaces,
        kinds: meta.kinds,
    };
    let model = MatcherModel::new(
        vocab,
        table,
        semantic_fc,
        knowledge_fc,
        fusion,
        meta.fusion_mode,
        knowledge,
        entities,
    )?;
    Ok((model, meta.config))
}

pub fn load_matcher_checkpoint(path: &Path) -> Result<(MatcherModel, Option<MatcherConfig>)> {
    matcher_from_container(Container::read(path)?)
}
