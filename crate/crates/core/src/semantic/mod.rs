//! Surface-form encoding: subword tokenization, a learnable subword table
//! averaged per surface, and the two-layer tanh projection shared by
//! mentions and entities.

mod fc;
mod skipgram;
mod table;
mod tokenize;
mod vocab;

pub use fc::{dropout_mask, semantic_encode, FcTrace, SharedFc, TwoLayerFc};
pub use skipgram::{encode_corpus, pretrain_subword_embeddings, SkipGramConfig};
pub use table::{semantic_embedding, SemanticTable};
pub use tokenize::{is_cjk, tokenize, TokenizerMode, BOUNDARY};
pub use vocab::{build_vocab, SubwordVocab, OOV_INDEX, OOV_TOKEN};
