//! Object matching, the four fidelity metrics (CNT, ATR, OOR, OAR), the five
//! plausibility metrics (COL, SUP, NAV, ACC, OOB) and per-scene reports.

mod fidelity;
mod matching;
mod plausibility;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{DatasetEntry, Difficulty};
use crate::judge::{Judge, JudgeError, JudgeResponse, RecordingJudge};
use crate::relations::SampleContext;
use crate::scene::{SceneInstance, SceneOccupancy};

pub use fidelity::{eval_attribute, eval_count, eval_oa, eval_oo, FieldReport, SpecResult};
pub use matching::{entry_categories, match_objects, CategoryAssignment};
pub use plausibility::{
    access_of, check_support, eval_accessibility, eval_collision, eval_navigability, eval_oob, eval_support,
    floor_hits, functional_sides_of, is_out_of_bounds, navigability_of, side_band_cells, support_contacts,
    support_type_of, AccessReport, CollisionReport, NavReport, ObjectAccess, OobObject, OobReport, SideAccess,
    SupportReport, SupportVerdict,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("{context}: {source}")]
    Judge { context: String, source: JudgeError },
    #[error("judge answered {task} with {got}")]
    UnexpectedResponse { task: String, got: String },
}

impl MetricError {
    pub(crate) fn judge(context: String, source: JudgeError) -> Self {
        MetricError::Judge { context, source }
    }

    pub(crate) fn unexpected(task: &str, got: &JudgeResponse) -> Self {
        MetricError::UnexpectedResponse {
            task: task.into(),
            got: format!("{got:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsConfig {
    pub seed: u64,
    /// Box samples per relation score.
    pub relation_samples: usize,
    /// Surface samples per object for out-of-bounds rays.
    pub oob_samples: usize,
    /// Occupancy cell size (m).
    pub occupancy_resolution: f64,
    /// Contact distance for support rays (m).
    pub support_tolerance: f64,
    /// Depth of the accessibility probe band (m).
    pub accessibility_depth: f64,
    /// Leave wall- and ceiling-supported objects out of the out-of-bounds metric.
    pub oob_exempt_wall_ceiling: bool,
    /// Most relation tuples scored per spec.
    pub tuple_cap: usize,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            relation_samples: 1000,
            oob_samples: 1000,
            occupancy_resolution: 0.05,
            support_tolerance: 0.01,
            accessibility_depth: 0.5,
            oob_exempt_wall_ceiling: false,
            tuple_cap: 10_000,
        }
    }
}

impl MetricsConfig {
    pub fn sample_context(&self) -> SampleContext {
        SampleContext {
            count: self.relation_samples,
            seed: self.seed,
        }
    }
}

/// Everything measured for one scene. Serialization is stable for fixed inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneReport {
    pub scene_id: String,
    pub entry_id: String,
    pub difficulty: Difficulty,
    pub config: MetricsConfig,
    /// Digest of the judgments this evaluation consumed.
    pub judge_transcript_hash: String,
    pub judge_requests: usize,
    pub object_count: usize,
    pub assignment: Option<CategoryAssignment>,
    pub cnt: Option<FieldReport>,
    pub atr: Option<FieldReport>,
    pub oor: Option<FieldReport>,
    pub oar: Option<FieldReport>,
    pub col: CollisionReport,
    pub sup: Option<SupportReport>,
    pub nav: NavReport,
    pub acc: Option<AccessReport>,
    pub oob: OobReport,
    /// Metrics that could not be computed, with the cause.
    pub errors: Vec<String>,
}

/// Headline values in table column order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub cnt: Option<f64>,
    pub atr: Option<f64>,
    pub oor: Option<f64>,
    pub oar: Option<f64>,
    pub col_ob: Option<f64>,
    pub col_sc: Option<f64>,
    pub sup: Option<f64>,
    pub nav: Option<f64>,
    pub acc: Option<f64>,
    pub oob: Option<f64>,
}

impl MetricSummary {
    pub const COLUMNS: [&'static str; 10] = ["cnt", "atr", "oor", "oar", "col_ob", "col_sc", "sup", "nav", "acc", "oob"];

    pub fn values(&self) -> [Option<f64>; 10] {
        [
            self.cnt, self.atr, self.oor, self.oar, self.col_ob, self.col_sc, self.sup, self.nav, self.acc, self.oob,
        ]
    }

    pub fn from_values(v: [Option<f64>; 10]) -> Self {
        Self {
            cnt: v[0],
            atr: v[1],
            oor: v[2],
            oar: v[3],
            col_ob: v[4],
            col_sc: v[5],
            sup: v[6],
            nav: v[7],
            acc: v[8],
            oob: v[9],
        }
    }
}

impl SceneReport {
    /// Per-scene values: percentages for all but `nav` and `acc`, which are ratios.
    /// `col_sc` is 100 for a scene with a collision and 0 otherwise.
    pub fn summary(&self) -> MetricSummary {
        let pct = |f: &Option<FieldReport>| f.as_ref().and_then(|f| f.percent);
        MetricSummary {
            cnt: pct(&self.cnt),
            atr: pct(&self.atr),
            oor: pct(&self.oor),
            oar: pct(&self.oar),
            col_ob: Some(self.col.col_ob),
            col_sc: Some(if self.col.col_sc { 100.0 } else { 0.0 }),
            sup: self.sup.as_ref().and_then(|s| s.sup),
            nav: Some(self.nav.nav),
            acc: self.acc.as_ref().and_then(|a| a.mean),
            oob: self.oob.oob,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Matching, then every metric. A failing metric is recorded in `errors` and the
/// others still run.
pub fn evaluate_scene(
    scene: &SceneInstance,
    entry: &DatasetEntry,
    judge: &dyn Judge,
    config: &MetricsConfig,
) -> SceneReport {
    let judge = RecordingJudge::new(judge);
    let mut errors = Vec::new();
    let mut keep = |name: &str, r: Result<FieldReport, MetricError>| match r {
        Ok(f) => Some(f),
        Err(e) => {
            errors.push(format!("{name}: {e}"));
            None
        }
    };
    let assignment = match_objects(scene, &entry_categories(entry), &judge);
    let (assignment, cnt, atr, oor, oar) = match assignment {
        Ok(a) => {
            let cnt = Some(eval_count(&a, &entry.counts));
            let atr = keep("atr", eval_attribute(scene, &a, &entry.attributes, &judge));
            let oor = keep("oor", eval_oo(scene, &a, &entry.oo_relations, &judge, config));
            let oar = keep("oar", eval_oa(scene, &a, &entry.oa_relations, &judge, config));
            (Some(a), cnt, atr, oor, oar)
        }
        Err(e) => {
            errors.push(format!("matching: {e}"));
            (None, None, None, None, None)
        }
    };
    let col = eval_collision(scene);
    let sup = eval_support(scene, &judge, config)
        .map_err(|e| errors.push(format!("sup: {e}")))
        .ok();
    let occupancy = SceneOccupancy::build(scene, config.occupancy_resolution);
    let nav = eval_navigability(&occupancy);
    let acc = eval_accessibility(scene, &occupancy, &judge, config)
        .map_err(|e| errors.push(format!("acc: {e}")))
        .ok();
    let oob = eval_oob(scene, config, sup.as_ref());
    SceneReport {
        scene_id: scene.id.clone(),
        entry_id: entry.id.clone(),
        difficulty: entry.difficulty,
        config: config.clone(),
        judge_transcript_hash: judge.digest(),
        judge_requests: judge.len(),
        object_count: scene.objects.len(),
        assignment,
        cnt,
        atr,
        oor,
        oar,
        col,
        sup,
        nav,
        acc,
        oob,
        errors,
    }
}

#[cfg(test)]
mod tests;
