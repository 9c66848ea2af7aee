//! Batch evaluation of every dataset entry against the scene of the same id.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use sceneeval_core::annotation::{load_dataset, DatasetEntry};
use sceneeval_core::judge::{CachedJudge, Judge, MockJudge, PromptSet, RemoteConfig, RemoteJudge};
use sceneeval_core::metrics::{evaluate_scene, SceneReport};
use sceneeval_core::scene::load_scene;

use crate::config::{ConfigError, JudgeMode, RunConfig};
use crate::report::{
    aggregate, peak_rss_kb, resources_csv, scene_report_path, AggregateReport, NotEvaluated, ResourceRecord,
};

pub const SCENE_MANIFEST: &str = "scene.json";
pub const TRANSCRIPT_FILE: &str = "judge_transcript.jsonl";

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Output { path: PathBuf, message: String },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "configuration error: {e}"),
            RunError::Output { path, message } => write!(f, "cannot write {}: {message}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

fn out_err(path: &Path, e: impl fmt::Display) -> RunError {
    RunError::Output {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    std::fs::write(path, text).map_err(|e| out_err(path, e))
}

#[derive(Debug)]
pub struct RunOutcome {
    pub run_dir: PathBuf,
    pub aggregate: AggregateReport,
}

impl RunOutcome {
    /// True when a scene could not be evaluated or a metric failed inside one.
    pub fn has_failures(&self) -> bool {
        !self.aggregate.failed.is_empty() || self.aggregate.scenes.iter().any(|s| s.errors > 0)
    }
}

fn build_judge(config: &RunConfig, run_dir: &Path) -> Result<Box<dyn Judge>, ConfigError> {
    let cfg = |e: sceneeval_core::judge::JudgeError| ConfigError(e.to_string());
    let judge: Box<dyn Judge> = match config.judge {
        JudgeMode::Mock => {
            let table = config.judge_table.as_ref().expect("checked in finish");
            Box::new(MockJudge::load(table).map_err(cfg)?)
        }
        JudgeMode::Replay => {
            let t = config.transcript.as_ref().expect("checked in finish");
            return Ok(Box::new(CachedJudge::replay(t).map_err(cfg)?));
        }
        JudgeMode::Remote => {
            let mut rc = RemoteConfig {
                api_key: config.api_key.clone(),
                ..RemoteConfig::default()
            };
            if let Some(e) = &config.endpoint {
                rc.endpoint = e.clone();
            }
            if let Some(m) = &config.model {
                rc.model = m.clone();
            }
            let prompts = match &config.prompts {
                Some(dir) => PromptSet::load_dir(dir).map_err(cfg)?,
                None => PromptSet::default(),
            };
            Box::new(RemoteJudge::new(rc, prompts))
        }
    };
    let record = match (&config.transcript, config.judge) {
        (Some(t), _) => Some(t.clone()),
        (None, JudgeMode::Remote) => Some(run_dir.join(TRANSCRIPT_FILE)),
        (None, _) => None,
    };
    Ok(match record {
        Some(path) => Box::new(CachedJudge::recording(judge, path).map_err(cfg)?),
        None => judge,
    })
}

fn run_dir_name(config: &RunConfig) -> PathBuf {
    if let Some(name) = &config.run_name {
        return config.out.join(name);
    }
    let stamp = chrono::Utc::now().format("run-%Y%m%dT%H%M%SZ").to_string();
    let mut dir = config.out.join(&stamp);
    let mut n = 1;
    while dir.exists() {
        dir = config.out.join(format!("{stamp}-{n}"));
        n += 1;
    }
    dir
}

enum Outcome {
    Done(Box<SceneReport>, ResourceRecord),
    Skipped(NotEvaluated),
    Failed(NotEvaluated),
}

fn not_evaluated(entry: &DatasetEntry, reason: String) -> NotEvaluated {
    NotEvaluated {
        entry_id: entry.id.clone(),
        difficulty: entry.difficulty,
        reason,
    }
}

fn evaluate_entry(config: &RunConfig, judge: &dyn Judge, entry: &DatasetEntry, run_dir: &Path) -> Outcome {
    if config.skip.contains(&entry.id) {
        return Outcome::Skipped(not_evaluated(entry, "in skip list".into()));
    }
    let manifest = config.scenes.join(&entry.id).join(SCENE_MANIFEST);
    if !manifest.is_file() {
        return Outcome::Skipped(not_evaluated(entry, format!("no scene at {}", manifest.display())));
    }
    let start = Instant::now();
    let scene = match load_scene(&manifest) {
        Ok(s) => s,
        Err(e) => {
            log::error!("{}: {e}", entry.id);
            return Outcome::Failed(not_evaluated(entry, e.to_string()));
        }
    };
    let report = evaluate_scene(&scene, entry, judge, &config.metrics);
    let path = run_dir.join(scene_report_path(&report.scene_id));
    if let Err(e) = std::fs::write(&path, report.to_json()) {
        return Outcome::Failed(not_evaluated(entry, format!("cannot write {}: {e}", path.display())));
    }
    for e in &report.errors {
        log::warn!("{}: {e}", entry.id);
    }
    let res = ResourceRecord {
        scene_id: report.scene_id.clone(),
        wall_time_s: start.elapsed().as_secs_f64(),
        peak_rss_kb: peak_rss_kb(),
    };
    log::info!("{}: done in {:.2}s", entry.id, res.wall_time_s);
    Outcome::Done(Box::new(report), res)
}

/// Evaluates every entry, writing `scenes/<id>.json`, `aggregate.json`, `aggregate.csv`,
/// `resources.csv` and `config.json` into a fresh run directory under `config.out`.
pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let dataset = load_dataset(&config.dataset).map_err(|e| ConfigError(e.to_string()))?;
    let run_dir = run_dir_name(config);
    std::fs::create_dir_all(run_dir.join("scenes")).map_err(|e| out_err(&run_dir, e))?;
    let judge = build_judge(config, &run_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ConfigError(e.to_string()))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        dataset
            .entries
            .par_iter()
            .map(|e| evaluate_entry(config, judge.as_ref(), e, &run_dir))
            .collect()
    });

    let (mut reports, mut resources, mut skipped, mut failed) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for o in outcomes {
        match o {
            Outcome::Done(r, res) => {
                reports.push(*r);
                resources.push(res);
            }
            Outcome::Skipped(s) => skipped.push(s),
            Outcome::Failed(f) => failed.push(f),
        }
    }
    let agg = aggregate(config.metrics.seed, config.judge.as_str(), &reports, skipped, failed);
    write(&run_dir.join("aggregate.json"), &agg.to_json())?;
    write(&run_dir.join("aggregate.csv"), &agg.to_csv())?;
    write(&run_dir.join("resources.csv"), &resources_csv(config.metrics.seed, &resources))?;
    let mut cfg = serde_json::to_string_pretty(config).expect("config serializes");
    cfg.push('\n');
    write(&run_dir.join("config.json"), &cfg)?;
    Ok(RunOutcome { run_dir, aggregate: agg })
}
