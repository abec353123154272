use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use lid_core::config::RunConfig;
use lid_core::ingest::{
    parse_business, parse_census, parse_h1b, parse_patents, parse_poi, parse_rnd, parse_sfr, write_jsonl, CensusSchema,
    DateWindow, ParseOptions, ParseWarning, PoiKind,
};
use lid_core::pipeline::{OutcomeSelection, Pipeline, Stage};

/// Zone-level innovation features and seed-averaged random-forest importance.
#[derive(Parser)]
#[command(name = "lid", version, about)]
struct Cli {
    /// Worker threads for forest training (outputs do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed; overrides `master_seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Outcomes to train on: patents, sfr or both.
    #[arg(long, default_value = "both")]
    outcome: OutcomeSelection,
    /// Accept an outcome/base year gap other than four years.
    #[arg(long)]
    allow_custom_lag: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse sources into staged records. With --config, runs the full
    /// ingest stage; otherwise parses one file.
    Ingest {
        /// Run configuration (TOML).
        #[arg(long, required_unless_present = "source")]
        config: Option<PathBuf>,
        /// Output directory (with --config) or staging directory (with --source).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Accept an outcome/base year gap other than four years.
        #[arg(long)]
        allow_custom_lag: bool,
        /// Source to parse: census, patents, sfr, rnd, h1b, business, or a POI kind.
        #[arg(long, conflicts_with = "config", requires_all = ["path", "out"])]
        source: Option<String>,
        /// Input file for --source.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Base year, used to filter year-stamped sources.
        #[arg(long, default_value_t = 2012)]
        base_year: i32,
        /// Outcome year, used to filter patents and SFR.
        #[arg(long, default_value_t = 2016)]
        outcome_year: i32,
    },
    /// Build the feature matrix from staged records.
    Build(RunArgs),
    /// Write summary statistics tables.
    Summarize(RunArgs),
    /// Train seed-averaged forests and write importance reports.
    Train(RunArgs),
    /// Write choropleth GeoJSON maps.
    Maps(RunArgs),
    /// Run every stage, or only the listed ones.
    Run {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated stages: ingest, build, summarize, train, maps.
        #[arg(long, value_delimiter = ',')]
        only: Vec<Stage>,
    },
}

fn pipeline(args: &RunArgs) -> Result<Pipeline> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    config.allow_custom_lag |= args.allow_custom_lag;
    let out = match (&args.out, &config.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => config.resolve(o),
        (None, None) => bail!("no output directory: pass --out or set output_dir"),
    };
    Ok(Pipeline::new(config, out, args.outcome)?)
}

fn ingest_one(source: &str, path: &Path, out: &Path, base_year: i32, outcome_year: i32) -> Result<()> {
    let opts = ParseOptions::default();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let target = out.join(format!("{source}.jsonl"));
    fn report(source: &str, n: usize, warnings: &[ParseWarning]) {
        for w in warnings {
            log::warn!("{source} line {}: {}", w.line, w.message);
        }
        info!("{source}: {n} records, {} warnings", warnings.len());
    }
    macro_rules! stage {
        ($parsed:expr) => {{
            let p = $parsed;
            report(source, p.records.len(), &p.warnings);
            write_jsonl(&target, &p.records)?;
        }};
    }
    match source {
        "census" => stage!(parse_census(path, &CensusSchema::default(), &opts)?),
        "patents" => stage!(parse_patents(path, DateWindow::year(outcome_year), &opts)?),
        "sfr" => stage!(parse_sfr(path, &opts)?),
        "rnd" => stage!(parse_rnd(path, base_year, &opts)?),
        "h1b" => stage!(parse_h1b(path, &opts)?),
        "business" => stage!(parse_business(path, base_year, &opts)?),
        other => {
            let kind: PoiKind = other.parse().map_err(anyhow::Error::msg)?;
            stage!(parse_poi(path, kind)?)
        }
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest { config: Some(config), out, allow_custom_lag, .. } => {
            let run = RunArgs { config, out, seed: None, outcome: OutcomeSelection::Both, allow_custom_lag };
            pipeline(&run)?.run(&[Stage::Ingest])?;
        }
        Command::Ingest { config: None, out, source, path, base_year, outcome_year, .. } => {
            let (Some(source), Some(path), Some(out)) = (source, path, out) else {
                bail!("ingest needs either --config or --source, --path and --out");
            };
            ingest_one(&source, &path, &out, base_year, outcome_year)?;
        }
        Command::Build(a) => pipeline(&a)?.run(&[Stage::Build])?,
        Command::Summarize(a) => pipeline(&a)?.run(&[Stage::Summarize])?,
        Command::Train(a) => pipeline(&a)?.run(&[Stage::Train])?,
        Command::Maps(a) => pipeline(&a)?.run(&[Stage::Maps])?,
        Command::Run { run, only } => {
            let p = pipeline(&run)?;
            if only.is_empty() {
                p.run_all()?;
            } else {
                let mut stages = only;
                stages.sort();
                stages.dedup();
                p.run(&stages)?;
            }
            info!("manifest {}", p.manifest_digest());
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().context("building thread pool")?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}
