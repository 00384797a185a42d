//! Line-oriented text formats. Every file is UTF-8 with LF line endings;
//! blank lines and lines starting with `#` are ignored.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::kg::{EntityKind, KnowledgeGraph, RawTriple};

use super::pairs::{Pair, PairDataset, Split};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Content lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn fields<'a>(origin: &str, line: usize, text: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = text.split('\t').collect();
    if parts.len() != n {
        return Err(Error::Parse {
            path: origin.to_string(),
            line,
            msg: format!("expected {n} tab-separated fields, found {}", parts.len()),
        });
    }
    if let Some(empty) = parts.iter().position(|p| p.trim().is_empty()) {
        return Err(Error::Parse {
            path: origin.to_string(),
            line,
            msg: format!("field {} is empty", empty + 1),
        });
    }
    Ok(parts)
}

/// Rejects values that would not survive a write/read cycle.
fn check_field(value: &str) -> Result<&str> {
    let bad =
        value.trim().is_empty() || value.starts_with('#') || value.contains(['\t', '\n', '\r']);
    if bad {
        Err(Error::Parse {
            path: "<output>".into(),
            line: 0,
            msg: format!("field {value:?} cannot be written to a TSV line"),
        })
    } else {
        Ok(value)
    }
}

pub fn parse_triples(text: &str, origin: &str) -> Result<Vec<RawTriple>> {
    content_lines(text)
        .map(|(n, l)| {
            let f = fields(origin, n, l, 3)?;
            Ok(RawTriple::new(f[0], f[1], f[2]))
        })
        .collect()
}

pub fn format_triples(triples: &[RawTriple]) -> Result<String> {
    let mut out = String::from("# head\trelation\ttail\n");
    for t in triples {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            check_field(&t.head)?,
            check_field(&t.relation)?,
            check_field(&t.tail)?
        ));
    }
    Ok(out)
}

pub fn load_triples(path: &Path) -> Result<Vec<RawTriple>> {
    parse_triples(&read(path)?, &path.display().to_string())
}

pub fn save_triples(triples: &[RawTriple], path: &Path) -> Result<()> {
    write(path, &format_triples(triples)?)
}

pub fn parse_kinds(text: &str, origin: &str) -> Result<Vec<(String, EntityKind)>> {
    content_lines(text)
        .map(|(n, l)| {
            let f = fields(origin, n, l, 2)?;
            let kind = EntityKind::parse(f[1]).ok_or_else(|| Error::Parse {
                path: origin.to_string(),
                line: n,
                msg: format!("unknown entity kind `{}`", f[1]),
            })?;
            Ok((f[0].to_string(), kind))
        })
        .collect()
}

pub fn format_kinds(kinds: &[(String, EntityKind)]) -> Result<String> {
    let mut out = String::from("# entity\tkind\n");
    for (surface, kind) in kinds {
        out.push_str(&format!("{}\t{}\n", check_field(surface)?, kind.as_str()));
    }
    Ok(out)
}

pub fn load_kinds(path: &Path) -> Result<Vec<(String, EntityKind)>> {
    parse_kinds(&read(path)?, &path.display().to_string())
}

pub fn save_kinds(kinds: &[(String, EntityKind)], path: &Path) -> Result<()> {
    write(path, &format_kinds(kinds)?)
}

/// Parses `mention<TAB>entity<TAB>split` rows, resolving entity surfaces
/// against the graph.
pub fn parse_pairs(text: &str, origin: &str, kg: &KnowledgeGraph) -> Result<PairDataset> {
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    for (n, l) in content_lines(text) {
        let f = fields(origin, n, l, 3)?;
        let split = Split::parse(f[2]).ok_or_else(|| Error::BadSplitTag {
            path: origin.to_string(),
            line: n,
            tag: f[2].to_string(),
        })?;
        let entity = kg
            .resolve(f[1])
            .map_err(|_| Error::UnknownEntity(format!("{} ({origin}:{n})", f[1])))?;
        if !seen.insert((f[0].to_string(), entity, split)) {
            return Err(Error::Parse {
                path: origin.to_string(),
                line: n,
                msg: format!("duplicate pair ({}, {}, {})", f[0], f[1], f[2]),
            });
        }
        pairs.push(Pair::new(f[0], entity, split));
    }
    PairDataset::new(pairs)
}

pub fn format_pairs(pairs: &PairDataset, kg: &KnowledgeGraph) -> Result<String> {
    let mut out = String::from("# mention\tentity\tsplit\n");
    for p in pairs.pairs() {
        let entity = kg
            .entity(p.entity)
            .ok_or_else(|| Error::UnknownEntity(format!("id {}", p.entity.0)))?;
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            check_field(&p.mention)?,
            check_field(&entity.surface)?,
            p.split
        ));
    }
    Ok(out)
}

pub fn load_pairs(path: &Path, kg: &KnowledgeGraph) -> Result<PairDataset> {
    parse_pairs(&read(path)?, &path.display().to_string(), kg)
}

pub fn save_pairs(pairs: &PairDataset, kg: &KnowledgeGraph, path: &Path) -> Result<()> {
    write(path, &format_pairs(pairs, kg)?)
}

pub fn parse_corpus(text: &str) -> Vec<String> {
    content_lines(text).map(|(_, l)| l.to_string()).collect()
}

pub fn format_corpus(lines: &[String]) -> Result<String> {
    let mut out = String::new();
    for l in lines {
        let bad = l.trim().is_empty() || l.starts_with('#') || l.contains(['\n', '\r']);
        if bad {
            return Err(Error::Parse {
                path: "<output>".into(),
                line: 0,
                msg: format!("corpus line {l:?} cannot be written"),
            });
        }
        out.push_str(l);
        out.push('\n');
    }
    Ok(out)
}

pub fn load_corpus(path: &Path) -> Result<Vec<String>> {
    Ok(parse_corpus(&read(path)?))
}

pub fn save_corpus(lines: &[String], path: &Path) -> Result<()> {
    write(path, &format_corpus(lines)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{build_graph, DuplicatePolicy};

    fn kg() -> KnowledgeGraph {
        let kinds = parse_kinds("a\tinstance\nb\tinstance\nC\tconcept\n", "k").unwrap();
        let triples = parse_triples("# comment\n\na\tinstanceOf\tC\n", "t").unwrap();
        build_graph(&triples, &kinds, DuplicatePolicy::Strict).unwrap()
    }

    #[test]
    fn three_pair_lines() {
        let d = parse_pairs("x\ta\ttrain\ny\tb\tdev\nz\tC\ttest\n", "p", &kg()).unwrap();
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn duplicate_pair_names_line() {
        let err = parse_pairs("x\ta\ttrain\n# c\nx\ta\ttrain\n", "p.tsv", &kg()).unwrap_err();
        match err {
            Error::Parse { line, path, .. } => {
                assert_eq!(line, 3);
                assert_eq!(path, "p.tsv");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_tag_is_rejected() {
        let err = parse_pairs("x\ta\tvalidation\n", "p", &kg()).unwrap_err();
        assert!(matches!(err, Error::BadSplitTag { line: 1, .. }));
    }

    #[test]
    fn unknown_pair_entity() {
        assert!(matches!(
            parse_pairs("x\tnope\ttrain\n", "p", &kg()),
            Err(Error::UnknownEntity(_))
        ));
    }

    #[test]
    fn wrong_field_count() {
        assert!(matches!(
            parse_triples("a\tb\n", "t"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_kinds("a\tthing\n", "k"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn unwritable_field() {
        assert!(format_triples(&[RawTriple::new("a\tb", "r", "c")]).is_err());
        assert!(format_corpus(&["#x".to_string()]).is_err());
    }
}
