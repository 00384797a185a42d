use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::SyntheticSpec;
use crate::kge::KgeConfig;
use crate::matcher::{FusionMode, MatcherConfig};
use crate::semantic::TokenizerMode;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Bundle directory (triples, kinds, pairs, corpus).
    pub data: Option<PathBuf>,
    pub kge_checkpoint: Option<PathBuf>,
    pub matcher_checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Everything a pipeline run needs, as one JSON document. Absent keys take
/// their defaults; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// When set, replaces the seed of every stage.
    pub seed: Option<u64>,
    pub fusion_mode: Option<FusionMode>,
    pub tokenizer: Option<TokenizerMode>,
    pub kge: KgeConfig,
    pub matcher: MatcherConfig,
    pub synthetic: SyntheticSpec,
    pub paths: Paths,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Pushes the top-level overrides into the stage configurations.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        if let Some(seed) = c.seed {
            c.kge.seed = seed;
            c.matcher.seed = seed;
            c.synthetic.seed = seed;
        }
        if let Some(mode) = c.fusion_mode {
            c.matcher.fusion_mode = mode;
        }
        if let Some(tok) = c.tokenizer {
            c.matcher.semantic.tokenizer = tok;
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        self.kge.validate()?;
        self.matcher.validate()?;
        self.synthetic.validate()
    }

    /// Hex prefix of the SHA-256 of the resolved configuration's JSON.
    pub fn fingerprint(&self) -> String {
        fingerprint(&self.resolved())
    }
}

pub fn fingerprint<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configuration serializes");
    hex::encode(&Sha256::digest(bytes)[..8])
}
