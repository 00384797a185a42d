//! Synonym discovery for informal mentions against a typed knowledge graph.
//!
//! The pipeline has two stages. A hierarchy-aware translation embedding is
//! first learned for every entity of the graph ([`kge`]). A matcher then
//! encodes mentions and entity surfaces from subwords ([`semantic`]), injects
//! the frozen knowledge vectors through a learned gate ([`matcher`]) and
//! ranks entities by dot product. [`eval`] computes filtered hits@k and
//! ablations; [`io`] covers file formats, checkpoints and the synthetic
//! generator.

pub mod config;
pub mod error;
pub mod eval;
pub mod io;
pub mod kg;
pub mod kge;
pub mod matcher;
pub mod semantic;
pub mod tensor;

pub use error::{Error, ErrorClass, Result};
