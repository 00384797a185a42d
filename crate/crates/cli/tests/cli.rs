use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn synlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synlink"))
        .args(args)
        .arg("-q")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL_CONFIG: &str = r#"{
  "seed": 3,
  "synthetic": {"depth": 2, "branching": 2, "instances_per_leaf": 3},
  "kge": {"dim": 8, "epochs": 10},
  "matcher": {"negatives": 5, "max_epochs": 3, "semantic": {"dim": 8, "k": 6}}
}"#;

#[test]
fn help_exits_zero() {
    let out = synlink(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("train-kge"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(synlink(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(synlink(&["query", "--mention", "x"]).status.code(), Some(1));
    assert_eq!(
        synlink(&["gen"]).status.code(),
        Some(1),
        "gen without --out"
    );
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"kge": {"dimension": 8}}"#).unwrap();
    let out = synlink(&[
        "gen",
        "--config",
        path(&cfg),
        "--out",
        path(&dir.path().join("b")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_checkpoint_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.bin");
    let out = synlink(&["query", "--model", path(&missing), "--mention", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn corrupted_checkpoint_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("junk.bin");
    fs::write(&ckpt, b"SYNLNK\x01 definitely not a checkpoint").unwrap();
    let out = synlink(&["query", "--model", path(&ckpt), "--mention", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pipeline_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let cfg = root.join("run.json");
    fs::write(&cfg, SMALL_CONFIG).unwrap();
    let data = root.join("bundle");
    let kge = root.join("kge.bin");
    let matcher = root.join("matcher.bin");

    let gen = synlink(&["gen", "--config", path(&cfg), "--out", path(&data)]);
    assert_eq!(
        gen.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&gen.stderr)
    );
    for f in ["triples.tsv", "kinds.tsv", "pairs.tsv", "corpus.txt"] {
        assert!(data.join(f).is_file(), "{f} written");
    }

    let out = synlink(&[
        "train-kge",
        "--config",
        path(&cfg),
        "--data",
        path(&data),
        "--out",
        path(&kge),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(root.join("kge.bin.trace.json").is_file());

    let out = synlink(&[
        "train-matcher",
        "--config",
        path(&cfg),
        "--data",
        path(&data),
        "--kge",
        path(&kge),
        "--out",
        path(&matcher),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let pairs = data.join("pairs.tsv");
    let out = synlink(&["eval", "--model", path(&matcher), "--pairs", path(&pairs)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let tsv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = tsv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("method\thits@3/all"));
    assert!(lines[1].starts_with("model\t"));

    let out = synlink(&[
        "eval",
        "--data",
        path(&data),
        "--pairs",
        path(&pairs),
        "--baseline",
        "jaccard",
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json[0]["method"], "JACCARD");

    let mention = fs::read_to_string(&pairs)
        .unwrap()
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split('\t')
        .next()
        .unwrap()
        .to_string();
    let out = synlink(&[
        "query",
        "--model",
        path(&matcher),
        "--mention",
        &mention,
        "--k",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "rank\tentity\tscore");
    assert_eq!(rows.len(), 4);
    let scores: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split('\t').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(scores.windows(2).all(|w| w[0] >= w[1]));

    // A second matcher run with the same config is byte-identical.
    let again = root.join("matcher2.bin");
    let out = synlink(&[
        "train-matcher",
        "--config",
        path(&cfg),
        "--data",
        path(&data),
        "--kge",
        path(&kge),
        "--out",
        path(&again),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(fs::read(&matcher).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn mismatched_graph_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let cfg = root.join("run.json");
    fs::write(&cfg, SMALL_CONFIG).unwrap();
    let (a, b) = (root.join("a"), root.join("b"));
    assert!(synlink(&["gen", "--config", path(&cfg), "--out", path(&a)])
        .status
        .success());
    assert!(synlink(&[
        "gen",
        "--config",
        path(&cfg),
        "--seed",
        "9",
        "--out",
        path(&b)
    ])
    .status
    .success());
    let kge = root.join("kge.bin");
    assert!(synlink(&[
        "train-kge",
        "--config",
        path(&cfg),
        "--data",
        path(&a),
        "--out",
        path(&kge)
    ])
    .status
    .success());
    // A different seed yields different surfaces for the same tree shape.
    let out = synlink(&[
        "train-matcher",
        "--config",
        path(&cfg),
        "--data",
        path(&b),
        "--kge",
        path(&kge),
        "--out",
        path(&root.join("m.bin")),
    ]);
    assert_ne!(
        fs::read(a.join("kinds.tsv")).unwrap(),
        fs::read(b.join("kinds.tsv")).unwrap()
    );
    assert_eq!(out.status.code(), Some(2));
}
