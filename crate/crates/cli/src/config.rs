//! Run configuration: defaults, then a `key = value` file, then command-line flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sceneeval_core::metrics::MetricsConfig;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgeMode {
    Remote,
    Mock,
    Replay,
}

impl JudgeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            JudgeMode::Remote => "remote",
            JudgeMode::Mock => "mock",
            JudgeMode::Replay => "replay",
        }
    }
}

impl FromStr for JudgeMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "remote" => Ok(JudgeMode::Remote),
            "mock" => Ok(JudgeMode::Mock),
            "replay" => Ok(JudgeMode::Replay),
            _ => Err(err(format!("unknown judge mode '{s}' (expected remote, mock or replay)"))),
        }
    }
}

/// Everything one `evaluate` invocation needs. Serialized into the run directory
/// without the API key.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub scenes: PathBuf,
    pub judge: JudgeMode,
    /// Mock answers (mock mode).
    pub judge_table: Option<PathBuf>,
    /// Transcript to replay (replay mode) or to record into (other modes).
    pub transcript: Option<PathBuf>,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    /// Directory overriding the built-in prompt templates.
    pub prompts: Option<PathBuf>,
    #[serde(skip)]
    pub api_key: Option<String>,
    pub metrics: MetricsConfig,
    pub out: PathBuf,
    pub jobs: usize,
    /// Run directory name; a UTC timestamp when unset.
    pub run_name: Option<String>,
    /// Entry ids to leave out.
    pub skip: Vec<String>,
}

/// Keys accepted in config files and, with `-` for `_`, as flags.
pub const KEYS: [&str; 20] = [
    "dataset",
    "scenes",
    "judge",
    "judge_table",
    "transcript",
    "endpoint",
    "model",
    "prompts",
    "seed",
    "resolution",
    "relation_samples",
    "oob_samples",
    "support_tolerance",
    "accessibility_depth",
    "oob_exempt_wall_ceiling",
    "tuple_cap",
    "out",
    "jobs",
    "run_name",
    "skip",
];

/// Partially specified configuration; later `set` calls override earlier ones.
#[derive(Clone, Debug)]
pub struct ConfigBuilder {
    dataset: Option<PathBuf>,
    scenes: Option<PathBuf>,
    judge: JudgeMode,
    judge_table: Option<PathBuf>,
    transcript: Option<PathBuf>,
    endpoint: Option<String>,
    model: Option<String>,
    prompts: Option<PathBuf>,
    metrics: MetricsConfig,
    out: PathBuf,
    jobs: usize,
    run_name: Option<String>,
    skip: Vec<String>,
}

impl Default for ConfigBuilder {
    fn default() -> Self {
        Self {
            dataset: None,
            scenes: None,
            judge: JudgeMode::Mock,
            judge_table: None,
            transcript: None,
            endpoint: None,
            model: None,
            prompts: None,
            metrics: MetricsConfig::default(),
            out: PathBuf::from("runs"),
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            run_name: None,
            skip: Vec::new(),
        }
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| err(format!("invalid value for {key}: '{v}'")))
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(err(format!("{key} must be positive, got {v}")))
    }
}

impl ConfigBuilder {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        let m = &mut self.metrics;
        match key.as_str() {
            "dataset" => self.dataset = Some(v.into()),
            "scenes" => self.scenes = Some(v.into()),
            "judge" => self.judge = v.parse()?,
            "judge_table" => self.judge_table = Some(v.into()),
            "transcript" => self.transcript = Some(v.into()),
            "endpoint" => self.endpoint = Some(v.into()),
            "model" => self.model = Some(v.into()),
            "prompts" => self.prompts = Some(v.into()),
            "seed" => m.seed = num(&key, v)?,
            "resolution" => m.occupancy_resolution = positive(&key, num(&key, v)?)?,
            "relation_samples" => m.relation_samples = num(&key, v)?,
            "oob_samples" => m.oob_samples = num(&key, v)?,
            "support_tolerance" => m.support_tolerance = positive(&key, num(&key, v)?)?,
            "accessibility_depth" => m.accessibility_depth = positive(&key, num(&key, v)?)?,
            "oob_exempt_wall_ceiling" => m.oob_exempt_wall_ceiling = num(&key, v)?,
            "tuple_cap" => m.tuple_cap = num(&key, v)?,
            "out" => self.out = v.into(),
            "jobs" => {
                self.jobs = num(&key, v)?;
                if self.jobs == 0 {
                    return Err(err("jobs must be at least 1"));
                }
            }
            "run_name" => self.run_name = Some(v.into()),
            "skip" => self
                .skip
                .extend(v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from)),
            _ => return Err(err(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file. Blank lines and lines starting with `#` are
    /// ignored; relative paths stay relative to the working directory.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), ConfigError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("{origin}:{}: expected key = value", n + 1)))?;
            self.set(k, v).map_err(|e| err(format!("{origin}:{}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| err(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Checks required fields and that every input path exists. `api_key` comes from
    /// the environment.
    pub fn finish(self, api_key: Option<String>) -> Result<RunConfig, ConfigError> {
        let dataset = self.dataset.ok_or_else(|| err("dataset is required"))?;
        let scenes = self.scenes.ok_or_else(|| err("scenes is required"))?;
        for (name, p) in [("dataset", &dataset), ("scenes", &scenes)] {
            if !p.is_dir() {
                return Err(err(format!("{name} directory not found: {}", p.display())));
            }
        }
        match self.judge {
            JudgeMode::Mock => {
                let t = self.judge_table.as_ref().ok_or_else(|| err("mock judge needs judge_table"))?;
                if !t.is_file() {
                    return Err(err(format!("judge table not found: {}", t.display())));
                }
            }
            JudgeMode::Replay => {
                let t = self.transcript.as_ref().ok_or_else(|| err("replay judge needs transcript"))?;
                if !t.is_file() {
                    return Err(err(format!("transcript not found: {}", t.display())));
                }
            }
            JudgeMode::Remote => {
                if api_key.is_none() {
                    return Err(err(format!(
                        "remote judge needs an API key in {}",
                        sceneeval_core::judge::API_KEY_ENV
                    )));
                }
            }
        }
        if let Some(p) = &self.prompts {
            if !p.is_dir() {
                return Err(err(format!("prompts directory not found: {}", p.display())));
            }
        }
        if let Some(name) = &self.run_name {
            if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
                return Err(err(format!("invalid run name '{name}'")));
            }
        }
        Ok(RunConfig {
            dataset,
            scenes,
            judge: self.judge,
            judge_table: self.judge_table,
            transcript: self.transcript,
            endpoint: self.endpoint,
            model: self.model,
            prompts: self.prompts,
            api_key,
            metrics: self.metrics,
            out: self.out,
            jobs: self.jobs,
            run_name: self.run_name,
            skip: self.skip,
        })
    }
}
