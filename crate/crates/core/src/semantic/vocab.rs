use std::collections::HashMap;

use super::tokenize::{tokenize, TokenizerMode};
use crate::error::{Error, Result};

/// Name written for the out-of-vocabulary bucket in vocabulary files.
pub const OOV_TOKEN: &str = "<oov>";
pub const OOV_INDEX: usize = 0;

/// Frozen subword-to-row map. Row 0 is the shared OOV bucket; the rest are
/// assigned in first-seen order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordVocab {
    mode: TokenizerMode,
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

pub fn build_vocab<I, S>(surfaces: I, mode: TokenizerMode) -> Result<SubwordVocab>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut vocab = SubwordVocab::empty(mode);
    let mut any = false;
    for s in surfaces {
        let s = s.as_ref();
        if s.trim().is_empty() {
            continue;
        }
        any = true;
        for tok in tokenize(s, mode)? {
            vocab.insert(tok);
        }
    }
    if !any {
        return Err(Error::EmptyCorpus);
    }
    Ok(vocab)
}

impl SubwordVocab {
    fn empty(mode: TokenizerMode) -> Self {
        SubwordVocab {
            mode,
            tokens: vec![OOV_TOKEN.to_string()],
            index: HashMap::new(),
        }
    }

    fn insert(&mut self, tok: String) {
        if !self.index.contains_key(&tok) {
            self.index.insert(tok.clone(), self.tokens.len());
            self.tokens.push(tok);
        }
    }

    /// Rebuilds a vocabulary from its token list (row order), e.g. when
    /// loading a checkpoint. `tokens[0]` must be the OOV marker.
    pub fn from_tokens(tokens: Vec<String>, mode: TokenizerMode) -> Result<Self> {
        if tokens.first().map(String::as_str) != Some(OOV_TOKEN) {
            return Err(Error::Parse {
                path: "<vocab>".into(),
                line: 1,
                msg: format!("row 0 must be {OOV_TOKEN}"),
            });
        }
        let mut vocab = SubwordVocab::empty(mode);
        for (i, tok) in tokens.into_iter().enumerate().skip(1) {
            if vocab.index.contains_key(&tok) || tok == OOV_TOKEN {
                return Err(Error::Parse {
                    path: "<vocab>".into(),
                    line: i + 1,
                    msg: format!("duplicate subword `{tok}`"),
                });
            }
            vocab.insert(tok);
        }
        Ok(vocab)
    }

    pub fn mode(&self) -> TokenizerMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.len() <= 1
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn get(&self, tok: &str) -> Option<usize> {
        self.index.get(tok).copied()
    }

    /// Row for a subword; unseen subwords map to the OOV bucket.
    pub fn lookup(&self, tok: &str) -> usize {
        self.get(tok).unwrap_or(OOV_INDEX)
    }

    /// Rows of every subword of `surface`, with multiplicity.
    pub fn ids(&self, surface: &str) -> Result<Vec<usize>> {
        Ok(tokenize(surface, self.mode)?
            .iter()
            .map(|t| self.lookup(t))
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trigram_vocab_of_two_words() {
        let v = build_vocab(["ab", "bc"], TokenizerMode::LetterTrigram).unwrap();
        assert_eq!(v.tokens(), &[OOV_TOKEN, "#ab", "ab#", "#bc", "bc#"]);
        assert_eq!(v.len(), 5);
    }

    #[test]
    fn single_char_vocab() {
        let v = build_vocab(["a"], TokenizerMode::UnicodeChar).unwrap();
        assert_eq!(v.tokens(), &[OOV_TOKEN, "a"]);
    }

    #[test]
    fn build_is_idempotent() {
        let input = ["肚子痛", "歪嘴风", "肚子"];
        let a = build_vocab(input, TokenizerMode::UnicodeChar).unwrap();
        let b = build_vocab(input, TokenizerMode::UnicodeChar).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_corpus() {
        assert!(matches!(
            build_vocab(Vec::<String>::new(), TokenizerMode::Auto),
            Err(Error::EmptyCorpus)
        ));
        assert!(matches!(
            build_vocab(["  "], TokenizerMode::Auto),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn unseen_subwords_hit_the_bucket() {
        let v = build_vocab(["ab"], TokenizerMode::LetterTrigram).unwrap();
        assert_eq!(v.ids("ab xy").unwrap(), vec![1, 2, OOV_INDEX, OOV_INDEX]);
    }

    #[test]
    fn from_tokens_round_trip() {
        let v = build_vocab(["skin burn"], TokenizerMode::LetterTrigram).unwrap();
        let w = SubwordVocab::from_tokens(v.tokens().to_vec(), v.mode()).unwrap();
        assert_eq!(v, w);
        assert!(SubwordVocab::from_tokens(vec!["x".into()], TokenizerMode::Auto).is_err());
    }
}
