mod manifest;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use folkrank_core::content::{read_content_file, ContentSource, Tokenizer};
use folkrank_core::dataset::{
    clean_tags, compute_post_core_with, date_split, leave_one_out_split, parse_posts_with,
    read_posts_file, stratified_sample, theoretical_max_recall, write_posts_file,
    write_queries, CleaningProfile, ColumnMapping, CoreGranularity, TestWindow,
};
use folkrank_core::eval::{metadata_json, run_experiment, write_details_tsv, write_plot_dat, write_summary_csv};
use folkrank_core::graph::{build_graph, write_edge_list};
use folkrank_core::{DocumentContentModel, EngineConfig, QueryPost, Recommender, TaggingDataset};

use manifest::Run;

/// Folksonomy tag recommendation with FolkRank and PathRank.
#[derive(Parser)]
#[command(name = "folkrank", version, about)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a raw assignment file into canonical posts.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Zero-based columns of user, document, tag and timestamp.
        #[arg(long, default_value = "0,1,2,3")]
        columns: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower-case tags and drop system tags.
    Clean {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "generic")]
        profile: CleaningProfile,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reduce to the post-core at level n.
    Core {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        /// Drop whole posts instead of single tag assignments for rare tags.
        #[arg(long)]
        core_strict: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split into train and test posts.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = ["date", "loo"], default_value = "date")]
        method: String,
        /// Test period for the date split, e.g. 2m or 30d.
        #[arg(long, default_value = "2m")]
        window: TestWindow,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified sample of documents with all their posts.
    Sample {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        target: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build a graph and write it as a TSV edge list.
    BuildGraph {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "folksonomy")]
        variant: String,
        #[command(flatten)]
        content: ContentArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recommend tags for one query post.
    Recommend {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        user: String,
        #[arg(long = "doc")]
        document: String,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        content: ContentArgs,
        /// Also write ranking.tsv and a manifest here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a configuration on a train/test split.
    Evaluate {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        content: ContentArgs,
        /// N values, as a range `1-10` or a list `1,5,10`.
        #[arg(long, default_value = "1-10")]
        n_range: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Upper bound on recall@N given the training tags.
    MaxRecall {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value = "1-10")]
        n_range: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ContentArgs {
    /// Document content table: `document \t title [\t fulltext]`.
    #[arg(long)]
    content: Option<PathBuf>,
}

/// Engine settings; flags override the config file.
#[derive(Args)]
struct EngineArgs {
    /// Flat `key = value` engine config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    spreader: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    pl: Option<String>,
    /// Number of tags to recommend.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    k_similar: Option<String>,
    #[arg(long)]
    content_source: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

impl EngineArgs {
    fn resolve(&self, run: Option<&mut Run>) -> Result<EngineConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                if let Some(run) = run {
                    run.input(path)?;
                }
                EngineConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => EngineConfig::default(),
        };
        let overrides = [
            ("variant", &self.variant),
            ("spreader", &self.spreader),
            ("mode", &self.mode),
            ("b", &self.b),
            ("d", &self.d),
            ("epsilon", &self.epsilon),
            ("pl", &self.pl),
            ("N", &self.n),
            ("k-similar", &self.k_similar),
            ("content-source", &self.content_source),
            ("seed", &self.seed),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v).with_context(|| format!("--{}", key.to_lowercase()))?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn load_posts(path: &Path, run: &mut Run) -> Result<TaggingDataset> {
    let (ds, report) = read_posts_file(path).with_context(|| format!("cannot read {}", path.display()))?;
    if report.malformed + report.bad_timestamps > 0 {
        eprintln!(
            "{}: skipped {} malformed and {} bad-timestamp lines",
            path.display(),
            report.malformed,
            report.bad_timestamps
        );
    }
    run.input(path)?;
    Ok(ds)
}

fn load_content(
    args: &ContentArgs,
    source: ContentSource,
    run: &mut Run,
) -> Result<Option<DocumentContentModel>> {
    let Some(path) = &args.content else {
        return Ok(None);
    };
    let table = read_content_file(path).with_context(|| format!("cannot read {}", path.display()))?;
    run.input(path)?;
    let texts = table.texts(source);
    let model = DocumentContentModel::from_texts(
        texts.iter().map(|(d, t)| (d.as_str(), t.as_str())),
        &Tokenizer::default(),
        source,
    )?;
    Ok(Some(model))
}

fn parse_n_range(s: &str) -> Result<Vec<usize>> {
    let ns: Vec<usize> = if let Some((a, b)) = s.split_once('-') {
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        bail!("N values must be positive: `{s}`");
    }
    Ok(ns)
}

fn config_json(cfg: &EngineConfig) -> serde_json::Value {
    let map: serde_json::Map<String, serde_json::Value> = cfg
        .to_kv_string()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_owned(), json!(v)))
        .collect();
    json!({ "hash": cfg.hash(), "settings": map })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")
        .with_context(|| format!("cannot write {}", path.display()))
}

fn write_query_file(path: &Path, queries: &[QueryPost]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_queries(queries, &mut out)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Ingest { input, columns, out } => {
            let cols: Vec<usize> = columns
                .split(',')
                .map(|c| c.trim().parse())
                .collect::<Result<_, _>>()
                .context("--columns expects four comma-separated indices")?;
            let [user, document, tag, timestamp] = cols[..] else {
                bail!("--columns expects four indices, got {}", cols.len());
            };
            let mapping = ColumnMapping { user, document, tag, timestamp };
            let mut run = Run::start("ingest", &out)?;
            let file = File::open(&input).with_context(|| format!("cannot open {}", input.display()))?;
            let (ds, report) = parse_posts_with(BufReader::new(file), mapping)?;
            run.input(&input)?;
            write_posts_file(&ds, run.output("posts.tsv"))?;
            write_json(&run.output("report.json"), &report)?;
            run.finish(json!({ "columns": columns }), None)
        }
        Command::Clean { input, profile, out } => {
            let mut run = Run::start("clean", &out)?;
            let ds = load_posts(&input, &mut run)?;
            write_posts_file(&clean_tags(&ds, profile), run.output("posts.tsv"))?;
            run.finish(json!({ "profile": profile.to_string() }), None)
        }
        Command::Core { input, n, core_strict, out } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let granularity = if core_strict { CoreGranularity::Post } else { CoreGranularity::Assignment };
            let mut run = Run::start("core", &out)?;
            let ds = load_posts(&input, &mut run)?;
            let core = compute_post_core_with(&ds, n, granularity);
            write_posts_file(&core, run.output("posts.tsv"))?;
            write_json(
                &run.output("stats.json"),
                &json!({
                    "posts_in": ds.len(), "posts_out": core.len(),
                    "users": core.user_count(), "documents": core.document_count(), "tags": core.tag_count(),
                }),
            )?;
            run.finish(json!({ "n": n, "strict": core_strict }), None)
        }
        Command::Split { input, method, window, out } => {
            let mut run = Run::start("split", &out)?;
            let ds = load_posts(&input, &mut run)?;
            let (train, test) = match method.as_str() {
                "date" => date_split(&ds, window)?,
                _ => leave_one_out_split(&ds)?,
            };
            write_posts_file(&train, run.output("train.tsv"))?;
            write_query_file(&run.output("test.tsv"), &test)?;
            let cfg = match method.as_str() {
                "date" => json!({ "method": method, "window": window.to_string() }),
                _ => json!({ "method": method }),
            };
            run.finish(cfg, None)
        }
        Command::Sample { input, target, seed, out } => {
            let mut run = Run::start("sample", &out)?;
            let ds = load_posts(&input, &mut run)?;
            let (sample, strata) = stratified_sample(&ds, target, seed)?;
            write_posts_file(&sample, run.output("posts.tsv"))?;
            write_json(&run.output("strata.json"), &strata)?;
            run.finish(json!({ "target": target }), Some(seed))
        }
        Command::BuildGraph { input, variant, content, out } => {
            let variant = variant.parse()?;
            let mut run = Run::start("build-graph", &out)?;
            let ds = load_posts(&input, &mut run)?;
            let model = load_content(&content, ContentSource::Title, &mut run)?;
            let graph = build_graph(variant, &ds, model.as_ref())?;
            graph.validate()?;
            let mut w = BufWriter::new(File::create(run.output("graph.tsv"))?);
            write_edge_list(&graph, &mut w)?;
            run.finish(
                json!({ "variant": variant.to_string(), "nodes": graph.node_count(), "edges": graph.edge_count() }),
                None,
            )
        }
        Command::Recommend { train, user, document, engine, content, out } => {
            let scratch;
            let mut run = match &out {
                Some(dir) => Run::start("recommend", dir)?,
                None => {
                    scratch = std::env::temp_dir();
                    Run::start("recommend", &scratch)?
                }
            };
            let cfg = engine.resolve(Some(&mut run))?;
            let ds = load_posts(&train, &mut run)?;
            let model = load_content(&content, cfg.content_source, &mut run)?;
            let rec = Recommender::new(cfg.clone(), &ds, model)?;
            let ranking = rec.recommend(&QueryPost::new(&user, &document))?;
            let mut text = String::new();
            for (i, (tag, score)) in ranking.entries.iter().enumerate() {
                text.push_str(&format!("{user}\t{document}\t{}\t{tag}\t{score}\n", i + 1));
            }
            io::stdout().write_all(text.as_bytes())?;
            if out.is_some() {
                fs::write(run.output("ranking.tsv"), &text)?;
                run.finish(config_json(&cfg), Some(cfg.seed))?;
            }
            Ok(())
        }
        Command::Evaluate { train, test, engine, content, n_range, out } => {
            let ns = parse_n_range(&n_range)?;
            let mut run = Run::start("evaluate", &out)?;
            let cfg = engine.resolve(Some(&mut run))?;
            let train_ds = load_posts(&train, &mut run)?;
            let test_queries = load_posts(&test, &mut run)?.to_queries();
            let model = load_content(&content, cfg.content_source, &mut run)?;
            let result = run_experiment(&train_ds, &test_queries, &cfg, model, &ns)?;
            write_summary_csv(&result, BufWriter::new(File::create(run.output("summary.csv"))?))?;
            write_details_tsv(&result, BufWriter::new(File::create(run.output("details.tsv"))?))?;
            write_plot_dat(&result, BufWriter::new(File::create(run.output("recall.dat"))?))?;
            write_json(&run.output("metadata.json"), &metadata_json(&result))?;
            for row in &result.summary {
                println!("N={}\trecall={:.4}\tprecision={:.4}\tf1={:.4}", row.n, row.recall, row.precision, row.f1);
            }
            run.finish(config_json(&cfg), Some(cfg.seed))
        }
        Command::MaxRecall { train, test, n_range, out } => {
            let ns = parse_n_range(&n_range)?;
            let mut run = Run::start("max-recall", &out)?;
            let train_ds = load_posts(&train, &mut run)?;
            let test_queries = load_posts(&test, &mut run)?.to_queries();
            let bound = theoretical_max_recall(&train_ds, &test_queries, &ns)?;
            let mut w = BufWriter::new(File::create(run.output("max_recall.csv"))?);
            writeln!(w, "N,max_recall,posts")?;
            for b in &bound {
                writeln!(w, "{},{},{}", b.n, b.recall, b.posts)?;
                println!("N={}\tmax_recall={:.4}", b.n, b.recall);
            }
            w.flush()?;
            run.finish(json!({ "n_values": ns }), None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_ranges() {
        assert_eq!(parse_n_range("1-3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_n_range("5, 1").unwrap(), vec![5, 1]);
        assert!(parse_n_range("0-2").is_err());
        assert!(parse_n_range("x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
