//! Aggregation of per-scene reports and the JSON and CSV emitters.

use std::fmt::Write as _;
use std::path::Path;

use sceneeval_core::annotation::Difficulty;
use sceneeval_core::metrics::{MetricSummary, SceneReport};
use serde::{Deserialize, Serialize};

/// Means of every metric over one group of scenes. `scenes_per_metric[i]` counts the
/// scenes that had a value for column `i`; scenes without one do not enter the mean.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub scenes: usize,
    pub scenes_per_metric: Vec<usize>,
    pub means: MetricSummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneIndex {
    pub scene_id: String,
    pub difficulty: Difficulty,
    /// Path relative to the run directory.
    pub report: String,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotEvaluated {
    pub entry_id: String,
    pub difficulty: Difficulty,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub seed: u64,
    pub judge: String,
    /// Columns of every row's `means`, in order.
    pub columns: Vec<String>,
    /// One row per difficulty with scenes, then `overall`.
    pub rows: Vec<AggregateRow>,
    pub scenes: Vec<SceneIndex>,
    pub skipped: Vec<NotEvaluated>,
    pub failed: Vec<NotEvaluated>,
}

fn mean_row(group: &str, summaries: &[MetricSummary]) -> AggregateRow {
    let mut sums = [0.0; 10];
    let mut counts = [0usize; 10];
    for s in summaries {
        for (i, v) in s.values().iter().enumerate() {
            if let Some(v) = v {
                sums[i] += v;
                counts[i] += 1;
            }
        }
    }
    let mut means = [None; 10];
    for i in 0..10 {
        if counts[i] > 0 {
            means[i] = Some(sums[i] / counts[i] as f64);
        }
    }
    AggregateRow {
        group: group.into(),
        scenes: summaries.len(),
        scenes_per_metric: counts.to_vec(),
        means: MetricSummary::from_values(means),
    }
}

/// Overall row as the mean of the group means weighted by their scene counts.
fn overall_row(rows: &[AggregateRow]) -> AggregateRow {
    let mut means = [None; 10];
    let mut counts = [0usize; 10];
    for (i, slot) in means.iter_mut().enumerate() {
        let mut acc = 0.0;
        for r in rows {
            if let Some(m) = r.means.values()[i] {
                acc += m * r.scenes_per_metric[i] as f64;
                counts[i] += r.scenes_per_metric[i];
            }
        }
        if counts[i] > 0 {
            *slot = Some(acc / counts[i] as f64);
        }
    }
    AggregateRow {
        group: "overall".into(),
        scenes: rows.iter().map(|r| r.scenes).sum(),
        scenes_per_metric: counts.to_vec(),
        means: MetricSummary::from_values(means),
    }
}

/// Groups `reports` by difficulty. The scene index is ordered by difficulty, then id.
pub fn aggregate(
    seed: u64,
    judge: &str,
    reports: &[SceneReport],
    skipped: Vec<NotEvaluated>,
    failed: Vec<NotEvaluated>,
) -> AggregateReport {
    let mut rows = Vec::new();
    for d in Difficulty::ALL {
        let s: Vec<MetricSummary> = reports.iter().filter(|r| r.difficulty == d).map(SceneReport::summary).collect();
        if !s.is_empty() {
            rows.push(mean_row(d.as_str(), &s));
        }
    }
    if !rows.is_empty() {
        let overall = overall_row(&rows);
        rows.push(overall);
    }
    let mut scenes: Vec<SceneIndex> = reports
        .iter()
        .map(|r| SceneIndex {
            scene_id: r.scene_id.clone(),
            difficulty: r.difficulty,
            report: scene_report_path(&r.scene_id),
            errors: r.errors.len(),
        })
        .collect();
    let rank = |d: Difficulty| Difficulty::ALL.iter().position(|x| *x == d);
    scenes.sort_by(|a, b| (rank(a.difficulty), &a.scene_id).cmp(&(rank(b.difficulty), &b.scene_id)));
    AggregateReport {
        seed,
        judge: judge.into(),
        columns: MetricSummary::COLUMNS.iter().map(|c| c.to_string()).collect(),
        rows,
        scenes,
        skipped,
        failed,
    }
}

pub fn scene_report_path(scene_id: &str) -> String {
    format!("scenes/{scene_id}.json")
}

fn fixed(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:.4}"))
}

impl AggregateReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("aggregate serializes");
        s.push('\n');
        s
    }

    /// `group,scenes,<metric columns>,seed` with values fixed to four decimals and
    /// empty cells for metrics without a value.
    pub fn to_csv(&self) -> String {
        let mut out = format!("group,scenes,{},seed\n", MetricSummary::COLUMNS.join(","));
        for r in &self.rows {
            let vals: Vec<String> = r.means.values().iter().map(|v| fixed(*v)).collect();
            let _ = writeln!(out, "{},{},{},{}", r.group, r.scenes, vals.join(","), self.seed);
        }
        out
    }

    pub fn row(&self, group: &str) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.group == group)
    }
}

/// Evaluation cost of one scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceRecord {
    pub scene_id: String,
    pub wall_time_s: f64,
    /// Process-wide peak resident memory after the scene finished, when available.
    pub peak_rss_kb: Option<u64>,
}

pub fn resources_csv(seed: u64, records: &[ResourceRecord]) -> String {
    let mut out = String::from("scene_id,eval_wall_time_s,eval_peak_rss_kb,seed\n");
    for r in records {
        let mem = r.peak_rss_kb.map_or(String::new(), |m| m.to_string());
        let _ = writeln!(out, "{},{:.4},{},{}", r.scene_id, r.wall_time_s, mem, seed);
    }
    out
}

/// Peak resident set size of this process from `/proc/self/status`.
pub fn peak_rss_kb() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Reads every `scenes/*.json` report of a run directory, sorted by file name.
pub fn read_scene_reports(run_dir: &Path) -> std::io::Result<Vec<SceneReport>> {
    let dir = run_dir.join("scenes");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{}: {e}", p.display())))
        })
        .collect()
}
