use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary marker wrapped around each word before taking trigrams.
pub const BOUNDARY: char = '#';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenizerMode {
    /// One token per Unicode scalar value (whitespace skipped).
    UnicodeChar,
    /// Lowercased, `#`-padded letter trigrams per whitespace-separated word.
    LetterTrigram,
    /// CJK characters as single tokens, other runs as letter trigrams.
    #[default]
    Auto,
}

impl TokenizerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenizerMode::UnicodeChar => "unicode_char",
            TokenizerMode::LetterTrigram => "letter_trigram",
            TokenizerMode::Auto => "auto",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unicode_char" => Some(TokenizerMode::UnicodeChar),
            "letter_trigram" => Some(TokenizerMode::LetterTrigram),
            "auto" => Some(TokenizerMode::Auto),
            _ => None,
        }
    }
}

/// Splits a surface form into subwords.
///
/// In trigram mode a word of length `L` is padded to `#word#` and yields
/// its `L` contiguous trigrams; a one-letter word yields the single padded
/// trigram `#a#`.
pub fn tokenize(surface: &str, mode: TokenizerMode) -> Result<Vec<String>> {
    let trimmed = surface.trim();
    if trimmed.is_empty() {
        return Err(Error::EmptySurface);
    }
    let mut out = Vec::new();
    match mode {
        TokenizerMode::UnicodeChar => {
            out.extend(
                trimmed
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .map(String::from),
            );
        }
        TokenizerMode::LetterTrigram => {
            for word in trimmed.split_whitespace() {
                push_trigrams(word, &mut out);
            }
        }
        TokenizerMode::Auto => {
            let mut run = String::new();
            for c in trimmed.chars() {
                if is_cjk(c) || c.is_whitespace() {
                    if !run.is_empty() {
                        push_trigrams(&run, &mut out);
                        run.clear();
                    }
                    if !c.is_whitespace() {
                        out.push(c.to_string());
                    }
                } else {
                    run.push(c);
                }
            }
            if !run.is_empty() {
                push_trigrams(&run, &mut out);
            }
        }
    }
    Ok(out)
}

fn push_trigrams(word: &str, out: &mut Vec<String>) {
    let padded: Vec<char> = std::iter::once(BOUNDARY)
        .chain(word.chars().flat_map(char::to_lowercase))
        .chain(std::iter::once(BOUNDARY))
        .collect();
    out.extend(padded.windows(3).map(|w| w.iter().collect::<String>()));
}

/// Han ideographs, kana, Hangul and CJK punctuation.
pub fn is_cjk(c: char) -> bool {
    matches!(c as u32,
        0x3000..=0x303F
        | 0x3040..=0x30FF
        | 0x3400..=0x4DBF
        | 0x4E00..=0x9FFF
        | 0xAC00..=0xD7AF
        | 0xF900..=0xFAFF
        | 0xFF00..=0xFFEF
        | 0x20000..=0x2FA1F)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str, mode: TokenizerMode) -> Vec<String> {
        tokenize(s, mode).unwrap()
    }

    #[test]
    fn chinese_characters() {
        assert_eq!(
            toks("肚子痛", TokenizerMode::UnicodeChar),
            vec!["肚", "子", "痛"]
        );
    }

    #[test]
    fn english_trigrams() {
        assert_eq!(
            toks("skin", TokenizerMode::LetterTrigram),
            vec!["#sk", "ski", "kin", "in#"]
        );
        assert_eq!(
            toks("Skin", TokenizerMode::LetterTrigram),
            toks("skin", TokenizerMode::LetterTrigram)
        );
        assert_eq!(toks("a", TokenizerMode::LetterTrigram), vec!["#a#"]);
        assert_eq!(
            toks("ab cd", TokenizerMode::LetterTrigram),
            vec!["#ab", "ab#", "#cd", "cd#"]
        );
    }

    #[test]
    fn empty_surface_is_rejected() {
        assert!(matches!(
            tokenize("", TokenizerMode::UnicodeChar),
            Err(Error::EmptySurface)
        ));
        assert!(matches!(
            tokenize("   ", TokenizerMode::LetterTrigram),
            Err(Error::EmptySurface)
        ));
    }

    #[test]
    fn auto_mode_mixes_scripts() {
        assert_eq!(toks("肺ab", TokenizerMode::Auto), vec!["肺", "#ab", "ab#"]);
        assert_eq!(
            toks("lung 钙化", TokenizerMode::Auto),
            vec!["#lu", "lun", "ung", "ng#", "钙", "化"]
        );
    }

    #[test]
    fn trigram_count_equals_word_length() {
        for w in ["ab", "abc", "abcdefgh"] {
            assert_eq!(toks(w, TokenizerMode::LetterTrigram).len(), w.len());
        }
    }
}
