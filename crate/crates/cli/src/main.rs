use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sceneeval_cli::config::{ConfigBuilder, KEYS};
use sceneeval_cli::report::read_scene_reports;
use sceneeval_cli::{aggregate, run, AggregateReport, RunError};
use sceneeval_core::annotation::{check_round_trip, load_dataset, Difficulty};
use sceneeval_core::judge::API_KEY_ENV;

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "sceneeval", version, about = "Score generated indoor scenes against annotated text constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every dataset entry against the scene directory of the same id.
    Evaluate(EvaluateArgs),
    /// Recompute the aggregate of a finished run from its per-scene reports.
    Report {
        run_dir: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Load a dataset, print entry counts by difficulty and check every spec line.
    ValidateDataset { root: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct EvaluateArgs {
    /// `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    scenes: Option<String>,
    /// remote, mock or replay.
    #[arg(long)]
    judge: Option<String>,
    /// Mock answers table (TSV).
    #[arg(long)]
    judge_table: Option<String>,
    /// Transcript to replay, or to record into in the other modes.
    #[arg(long)]
    transcript: Option<String>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Directory of prompt templates overriding the built-in ones.
    #[arg(long)]
    prompts: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Occupancy cell size in meters.
    #[arg(long)]
    resolution: Option<String>,
    #[arg(long)]
    relation_samples: Option<String>,
    #[arg(long)]
    oob_samples: Option<String>,
    #[arg(long)]
    support_tolerance: Option<String>,
    #[arg(long)]
    accessibility_depth: Option<String>,
    #[arg(long)]
    oob_exempt_wall_ceiling: Option<String>,
    #[arg(long)]
    tuple_cap: Option<String>,
    /// Parent of the run directory.
    #[arg(long)]
    out: Option<String>,
    /// Scenes evaluated concurrently.
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    run_name: Option<String>,
    /// Comma-separated entry ids to leave out.
    #[arg(long)]
    skip: Option<String>,
}

impl EvaluateArgs {
    fn flag(&self, key: &str) -> Option<&String> {
        match key {
            "dataset" => self.dataset.as_ref(),
            "scenes" => self.scenes.as_ref(),
            "judge" => self.judge.as_ref(),
            "judge_table" => self.judge_table.as_ref(),
            "transcript" => self.transcript.as_ref(),
            "endpoint" => self.endpoint.as_ref(),
            "model" => self.model.as_ref(),
            "prompts" => self.prompts.as_ref(),
            "seed" => self.seed.as_ref(),
            "resolution" => self.resolution.as_ref(),
            "relation_samples" => self.relation_samples.as_ref(),
            "oob_samples" => self.oob_samples.as_ref(),
            "support_tolerance" => self.support_tolerance.as_ref(),
            "accessibility_depth" => self.accessibility_depth.as_ref(),
            "oob_exempt_wall_ceiling" => self.oob_exempt_wall_ceiling.as_ref(),
            "tuple_cap" => self.tuple_cap.as_ref(),
            "out" => self.out.as_ref(),
            "jobs" => self.jobs.as_ref(),
            "run_name" => self.run_name.as_ref(),
            "skip" => self.skip.as_ref(),
            _ => None,
        }
    }
}

fn evaluate(args: EvaluateArgs) -> Result<u8, RunError> {
    let mut b = ConfigBuilder::default();
    if let Some(path) = &args.config {
        b.apply_file(path)?;
    }
    for key in KEYS {
        if let Some(v) = args.flag(key) {
            b.set(key, v)?;
        }
    }
    let api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
    let config = b.finish(api_key)?;
    let outcome = run(&config)?;
    print!("{}", outcome.aggregate.to_csv());
    for s in &outcome.aggregate.skipped {
        eprintln!("skipped {}: {}", s.entry_id, s.reason);
    }
    for f in &outcome.aggregate.failed {
        eprintln!("failed {}: {}", f.entry_id, f.reason);
    }
    eprintln!("reports written to {}", outcome.run_dir.display());
    Ok(if outcome.has_failures() { EXIT_PARTIAL } else { 0 })
}

fn report(run_dir: PathBuf, format: Format) -> Result<u8, String> {
    let reports = read_scene_reports(&run_dir).map_err(|e| format!("{}: {e}", run_dir.display()))?;
    let previous: Option<AggregateReport> = std::fs::read_to_string(run_dir.join("aggregate.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok());
    let (seed, judge, skipped, failed) = match previous {
        Some(p) => (p.seed, p.judge, p.skipped, p.failed),
        None => (
            reports.first().map_or(0, |r| r.config.seed),
            String::from("unknown"),
            vec![],
            vec![],
        ),
    };
    let agg = aggregate(seed, &judge, &reports, skipped, failed);
    match format {
        Format::Json => print!("{}", agg.to_json()),
        Format::Csv => print!("{}", agg.to_csv()),
    }
    Ok(0)
}

fn validate_dataset(root: PathBuf) -> Result<u8, String> {
    let ds = load_dataset(&root).map_err(|e| e.to_string())?;
    for d in Difficulty::ALL {
        println!("{}\t{}", d.as_str(), ds.count_by_difficulty(d));
    }
    println!("total\t{}", ds.entries.len());
    for w in &ds.warnings {
        eprintln!("warning: {w}");
    }
    let mismatches = check_round_trip(&root, &ds).map_err(|e| e.to_string())?;
    for m in &mismatches {
        eprintln!("{}/{}:{}: '{}' serializes as '{}'", m.entry, m.file, m.line, m.original, m.serialized);
    }
    Ok(if !mismatches.is_empty() { EXIT_PARTIAL } else { 0 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Evaluate(args) => evaluate(args).map_err(|e| e.to_string()),
        Command::Report { run_dir, format } => report(run_dir, format),
        Command::ValidateDataset { root } => validate_dataset(root),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
