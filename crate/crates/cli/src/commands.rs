use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};
use synlink::config::RunConfig;
use synlink::eval::{
    evaluate, jaccard_report, reports_to_tsv, run_ablation, EvalReport, JaccardScorer,
    MatcherScorer, Scorer, Variant, DEFAULT_KS,
};
use synlink::io::{
    generate_synthetic, load_kge_checkpoint, load_matcher_checkpoint, load_pairs,
    save_kge_checkpoint, save_matcher_checkpoint, DataBundle, Split, SyntheticSpec,
};
use synlink::kg::{
    build_graph, build_synonym_index, validate_graph, DuplicatePolicy, KnowledgeGraph,
};
use synlink::kge::train_kge_traced;
use synlink::matcher::{train_matcher_traced, MatcherIndex};
use synlink::semantic::TokenizerMode;
use synlink::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "synlink",
    version,
    about = "Link informal mentions to knowledge-graph entities"
)]
pub struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    /// Only log errors.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

impl Cli {
    pub fn log_level(&self) -> LevelFilter {
        if self.quiet {
            return LevelFilter::Error;
        }
        match self.verbose {
            0 => LevelFilter::Info,
            1 => LevelFilter::Debug,
            _ => LevelFilter::Trace,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Seed applied to every stage; overrides the config file.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file or directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic bundle (triples, kinds, pairs, corpus).
    Gen {
        /// Synthetic spec as JSON; defaults to the `synthetic` section of the config.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Train knowledge embeddings on a bundle's graph.
    TrainKge {
        /// Bundle directory.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Drop duplicate triples with a warning instead of failing.
        #[arg(long)]
        lenient: bool,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Train the matcher against frozen knowledge embeddings.
    TrainMatcher {
        #[arg(long)]
        data: Option<PathBuf>,
        /// Knowledge embedding checkpoint from `train-kge`.
        #[arg(long)]
        kge: Option<PathBuf>,
        #[arg(long)]
        lenient: bool,
        #[arg(long)]
        epochs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Filtered hits@k of a model or baseline on a pairs file.
    Eval {
        /// Matcher checkpoint.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Pairs TSV (mention, entity, split).
        #[arg(long)]
        pairs: PathBuf,
        /// Bundle directory supplying the entity list when no model is given.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum)]
        baseline: Option<Baseline>,
        /// Split to score; `all` scores every row.
        #[arg(long, default_value = "test")]
        split: String,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Train and evaluate the ablation variants on one bundle.
    Ablate {
        /// Bundle directory; a synthetic bundle is generated when absent.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Comma-separated variants (full, -KE, -TransC, ->DA, ->EF).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        variants: Option<Vec<String>>,
        #[arg(long)]
        lenient: bool,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[command(flatten)]
        common: Common,
    },
    /// Rank every entity for one mention.
    Query {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        mention: String,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Baseline {
    Jaccard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if let Some(out) = &common.out {
        cfg.paths.out = Some(out.clone());
    }
    Ok(cfg)
}

fn log_run(cmd: &str, cfg: &RunConfig) {
    let r = cfg.resolved();
    info!(
        "{cmd}: config fingerprint {} kge seed {} matcher seed {} synthetic seed {}",
        cfg.fingerprint(),
        r.kge.seed,
        r.matcher.seed,
        r.synthetic.seed
    );
}

fn required(value: Option<PathBuf>, what: &str) -> Result<PathBuf> {
    value.ok_or_else(|| Error::Config(format!("missing {what}")))
}

fn policy(lenient: bool) -> DuplicatePolicy {
    if lenient {
        DuplicatePolicy::Lenient
    } else {
        DuplicatePolicy::Strict
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn render(reports: &[EvalReport], format: Format) -> String {
    match format {
        Format::Tsv => reports_to_tsv(reports),
        Format::Json => serde_json::to_string_pretty(reports).expect("reports serialize") + "\n",
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { spec, common } => {
            let cfg = load_config(&common)?;
            log_run("gen", &cfg);
            let mut synthetic = match spec {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                    serde_json::from_str::<SyntheticSpec>(&text)
                        .map_err(|e| Error::Config(e.to_string()))?
                }
                None => cfg.resolved().synthetic,
            };
            if let Some(seed) = common.seed {
                synthetic.seed = seed;
            }
            let out = required(cfg.paths.out, "--out directory")?;
            let bundle = generate_synthetic(&synthetic)?;
            bundle.save(&out)?;
            println!(
                "entities\t{}\ntriples\t{}\npairs\t{}\ncorpus_lines\t{}",
                bundle.kg.num_entities(),
                bundle.kg.num_triples(),
                bundle.pairs.len(),
                bundle.corpus.len()
            );
            Ok(())
        }
        Command::TrainKge {
            data,
            lenient,
            epochs,
            dim,
            common,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(e) = epochs {
                cfg.kge.epochs = e;
            }
            if let Some(d) = dim {
                cfg.kge.dim = d;
            }
            log_run("train-kge", &cfg);
            let r = cfg.resolved();
            let dir = required(data.or(r.paths.data.clone()), "--data directory")?;
            let out = required(r.paths.out.clone(), "--out checkpoint path")?;
            let bundle = DataBundle::load(&dir, policy(lenient))?;
            let report = validate_graph(&bundle.kg);
            for issue in &report.issues {
                log::warn!("graph issue: {issue}");
            }
            let (store, trace) = train_kge_traced(&bundle.kg, &r.kge)?;
            save_kge_checkpoint(&bundle.kg, &store, &r.kge, &out)?;
            write_text(
                &sidecar(&out, ".trace.json"),
                &serde_json::to_string_pretty(&trace.epoch_losses)?,
            )?;
            if let Some(last) = trace.epoch_losses.last() {
                println!("final_epoch_loss\t{last:.6}");
            }
            println!("checkpoint\t{}", out.display());
            Ok(())
        }
        Command::TrainMatcher {
            data,
            kge,
            lenient,
            epochs,
            common,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(e) = epochs {
                cfg.matcher.max_epochs = e;
            }
            log_run("train-matcher", &cfg);
            let r = cfg.resolved();
            let dir = required(data.or(r.paths.data.clone()), "--data directory")?;
            let kge_path = required(kge.or(r.paths.kge_checkpoint.clone()), "--kge checkpoint")?;
            let out = required(r.paths.out.clone(), "--out checkpoint path")?;
            let ckpt = load_kge_checkpoint(&kge_path)?;
            let bundle = DataBundle::load(&dir, policy(lenient))?;
            if ckpt.kg.kind_registry() != bundle.kg.kind_registry() {
                return Err(Error::MissingEmbedding(format!(
                    "entities of {} do not match the graph in {}",
                    kge_path.display(),
                    dir.display()
                )));
            }
            let (model, trace) = train_matcher_traced(
                &bundle.kg,
                &ckpt.store,
                &bundle.pairs,
                &bundle.corpus,
                &r.matcher,
            )?;
            save_matcher_checkpoint(&model, Some(&r.matcher), &out)?;
            write_text(
                &sidecar(&out, ".trace.json"),
                &serde_json::to_string_pretty(&trace)?,
            )?;
            if let Some(h) = trace.dev_hits.get(trace.best_epoch) {
                println!(
                    "best_epoch\t{}\ndev_hits@{}\t{h:.4}",
                    trace.best_epoch, r.matcher.dev_k
                );
            }
            println!("checkpoint\t{}", out.display());
            Ok(())
        }
        Command::Eval {
            model,
            pairs,
            data,
            baseline,
            split,
            format,
            common,
        } => {
            let cfg = load_config(&common)?;
            log_run("eval", &cfg);
            let r = cfg.resolved();
            let loaded = model.as_deref().map(load_matcher_checkpoint).transpose()?;
            let (kg, mode): (KnowledgeGraph, TokenizerMode) = match (&loaded, &data) {
                (Some((m, _)), _) => {
                    let kinds: Vec<_> = m
                        .entities
                        .surfaces
                        .iter()
                        .cloned()
                        .zip(m.entities.kinds.iter().copied())
                        .collect();
                    (
                        build_graph(&[], &kinds, DuplicatePolicy::Strict)?,
                        m.vocab.mode(),
                    )
                }
                (None, Some(dir)) => (
                    DataBundle::load(dir, DuplicatePolicy::Lenient)?.kg,
                    r.matcher.semantic.tokenizer,
                ),
                (None, None) => return Err(Error::Config("eval needs --model or --data".into())),
            };
            let dataset = load_pairs(&pairs, &kg)?;
            let syn = build_synonym_index(&dataset, &kg)?;
            let selected: Vec<_> = if split == "all" {
                dataset.pairs().to_vec()
            } else {
                let s = Split::parse(&split).ok_or_else(|| {
                    Error::Config(format!("unknown split `{split}` (train, dev, test, all)"))
                })?;
                dataset.split_vec(s)
            };
            let surfaces: Vec<String> = kg.entities().iter().map(|e| e.surface.clone()).collect();
            let scorer: Box<dyn Scorer + '_> = match (baseline, &loaded) {
                (Some(Baseline::Jaccard), _) => Box::new(JaccardScorer::new(&surfaces, mode)?),
                (None, Some((m, _))) => Box::new(MatcherScorer::new("model", m)?),
                (None, None) => {
                    return Err(Error::Config(
                        "eval needs --model unless --baseline is set".into(),
                    ))
                }
            };
            let report = evaluate(
                scorer.as_ref(),
                &selected,
                &syn,
                &DEFAULT_KS,
                &surfaces,
                mode,
            )?
            .with_fingerprint(cfg.fingerprint());
            let text = render(std::slice::from_ref(&report), format);
            match &r.paths.out {
                Some(out) => write_text(out, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Ablate {
            data,
            variants,
            lenient,
            format,
            common,
        } => {
            let cfg = load_config(&common)?;
            log_run("ablate", &cfg);
            let r = cfg.resolved();
            r.validate()?;
            let bundle = match data.or(r.paths.data.clone()) {
                Some(dir) => DataBundle::load(&dir, policy(lenient))?,
                None => generate_synthetic(&r.synthetic)?,
            };
            let variants = match variants {
                Some(names) => names
                    .iter()
                    .map(|n| {
                        Variant::parse(n)
                            .ok_or_else(|| Error::Config(format!("unknown variant `{n}`")))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => Variant::ALL.to_vec(),
            };
            let fp = cfg.fingerprint();
            let mut reports = vec![jaccard_report(
                &bundle,
                &DEFAULT_KS,
                r.matcher.semantic.tokenizer,
            )?];
            reports.extend(run_ablation(
                &bundle,
                &r.kge,
                &r.matcher,
                &variants,
                &DEFAULT_KS,
            )?);
            let reports: Vec<_> = reports
                .into_iter()
                .map(|rep| rep.with_fingerprint(fp.clone()))
                .collect();
            let text = render(&reports, format);
            match &r.paths.out {
                Some(out) => write_text(out, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Query {
            model,
            mention,
            k,
            common,
        } => {
            let cfg = load_config(&common)?;
            log_run("query", &cfg);
            let (m, _) = load_matcher_checkpoint(&model)?;
            let index = MatcherIndex::build(&m)?;
            let ranked = index.top_k(&m, &mention, k, &m.entities.ids())?;
            let mut text = String::from("rank\tentity\tscore\n");
            for (i, (id, score)) in ranked.iter().enumerate() {
                text.push_str(&format!(
                    "{}\t{}\t{:.6}\n",
                    i + 1,
                    m.entities.surfaces[id.index()],
                    score
                ));
            }
            match &cfg.paths.out {
                Some(out) => write_text(out, &text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
    }
}
