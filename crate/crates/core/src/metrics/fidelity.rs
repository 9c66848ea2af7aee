use serde::{Deserialize, Serialize};

use super::{CategoryAssignment, MetricError, MetricsConfig};
use crate::annotation::{check_quantifier, ArchRef, AttributeSpec, CountSpec, OARelationSpec, OORelationSpec};
use crate::judge::{ArchMapping, Judge, JudgeRequest, JudgeResponse, RelationMapping};
use crate::relations::{
    count_satisfied, score_oa, score_oo, score_surround, ArchTarget, OARelation, OORelation, RelationScore,
    SampleContext,
};
use crate::scene::{ArchKind, ObjectInstance, RoomRegion, SceneInstance};

/// Outcome of one annotated spec.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecResult {
    /// Canonical spec line.
    pub spec: String,
    pub passed: bool,
    /// Instances or tuples that satisfied the spec, when it could be evaluated.
    pub satisfied: Option<u32>,
    /// Relation mapping used, e.g. `side_of:front+next_to`.
    pub mapping: Option<String>,
    pub reason: Option<String>,
}

impl SpecResult {
    fn counted(spec: String, passed: bool, satisfied: u32) -> Self {
        Self {
            spec,
            passed,
            satisfied: Some(satisfied),
            mapping: None,
            reason: None,
        }
    }

    fn failed(spec: String, reason: impl Into<String>) -> Self {
        Self {
            spec,
            passed: false,
            satisfied: None,
            mapping: None,
            reason: Some(reason.into()),
        }
    }
}

/// Per-spec results of one fidelity field with the share satisfied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldReport {
    pub results: Vec<SpecResult>,
    pub passed: usize,
    pub total: usize,
    /// 100 · passed / total; `None` without specs.
    pub percent: Option<f64>,
}

impl FieldReport {
    pub fn from_results(results: Vec<SpecResult>) -> Self {
        let total = results.len();
        let passed = results.iter().filter(|r| r.passed).count();
        let percent = (total > 0).then(|| 100.0 * passed as f64 / total as f64);
        Self {
            results,
            passed,
            total,
            percent,
        }
    }
}

pub fn eval_count(assignment: &CategoryAssignment, specs: &[CountSpec]) -> FieldReport {
    FieldReport::from_results(
        specs
            .iter()
            .map(|s| {
                let n = assignment.instances(&s.category).len() as u32;
                SpecResult::counted(s.to_string(), check_quantifier(s.quantifier, s.quantity, n), n)
            })
            .collect(),
    )
}

fn objects<'a>(scene: &'a SceneInstance, ids: &[String]) -> Vec<&'a ObjectInstance> {
    ids.iter().filter_map(|id| scene.object(id)).collect()
}

pub fn eval_attribute(
    scene: &SceneInstance,
    assignment: &CategoryAssignment,
    specs: &[AttributeSpec],
    judge: &dyn Judge,
) -> Result<FieldReport, MetricError> {
    let mut results = Vec::new();
    for s in specs {
        let instances = objects(scene, assignment.instances(&s.category));
        if instances.is_empty() {
            results.push(SpecResult::failed(s.to_string(), format!("no '{}' instances", s.category)));
            continue;
        }
        let mut n = 0u32;
        for obj in instances {
            let req = JudgeRequest::verify_attribute(obj, &s.category, &s.attribute);
            let ctx = || format!("attribute '{}' of '{}'", s.attribute, obj.id);
            match judge.judge(&req).map_err(|e| MetricError::judge(ctx(), e))? {
                JudgeResponse::Attribute(v) => n += v.satisfied as u32,
                other => return Err(MetricError::unexpected("verify_attribute", &other)),
            }
        }
        results.push(SpecResult::counted(s.to_string(), check_quantifier(s.quantifier, s.quantity, n), n));
    }
    Ok(FieldReport::from_results(results))
}

fn describe_oo(m: &RelationMapping) -> String {
    m.mapped_types
        .iter()
        .zip(&m.sides)
        .map(|(t, s)| match s {
            Some(s) => format!("{}:{}", t.name(), s.as_str()),
            None => t.name().to_string(),
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// k-element combinations of `items`, in lexicographic index order.
fn combinations<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn rec<T: Copy>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Anchor plus targets. Targets come from one combination per target group.
struct Tuple<'a> {
    anchor: &'a ObjectInstance,
    targets: Vec<&'a ObjectInstance>,
}

fn enumerate_tuples<'a>(
    scene: &'a SceneInstance,
    assignment: &CategoryAssignment,
    anchor: &str,
    groups: &[(String, usize)],
    cap: usize,
) -> (Vec<Tuple<'a>>, bool) {
    let anchors = objects(scene, assignment.instances(anchor));
    let group_combos: Vec<Vec<Vec<&ObjectInstance>>> = groups
        .iter()
        .map(|(cat, k)| combinations(&objects(scene, assignment.instances(cat)), *k))
        .collect();
    let mut out = Vec::new();
    let mut truncated = false;
    'anchors: for anchor in anchors {
        let mut partial: Vec<Vec<&ObjectInstance>> = vec![Vec::new()];
        for combos in &group_combos {
            let mut next = Vec::new();
            for p in &partial {
                for c in combos {
                    let mut t = p.clone();
                    t.extend(c.iter().copied());
                    next.push(t);
                }
            }
            partial = next;
        }
        for targets in partial {
            let mut ids: Vec<&str> = targets.iter().map(|t| t.id.as_str()).collect();
            ids.push(&anchor.id);
            ids.sort_unstable();
            if ids.windows(2).any(|w| w[0] == w[1]) {
                continue;
            }
            if out.len() == cap {
                truncated = true;
                break 'anchors;
            }
            out.push(Tuple { anchor, targets });
        }
    }
    (out, truncated)
}

/// Target groups of a spec; a count from the mapping overrides the written one.
fn target_groups(spec: &OORelationSpec, mapping: &RelationMapping) -> Vec<(String, usize)> {
    spec.target_groups()
        .into_iter()
        .map(|(cat, k)| {
            let mapped = mapping
                .other_categories
                .iter()
                .position(|c| *c == cat)
                .and_then(|i| mapping.other_counts.get(i).copied())
                .filter(|&n| n > 0);
            (cat, mapped.unwrap_or(k))
        })
        .collect()
}

fn score_tuple(
    tuple: &Tuple<'_>,
    mapping: &RelationMapping,
    ctx: &SampleContext,
    notes: &mut Vec<String>,
) -> Vec<RelationScore> {
    let mut scores = Vec::new();
    let mut note = |e: String| {
        if !notes.contains(&e) {
            notes.push(e);
        }
    };
    for (rel, side) in mapping.mapped_types.iter().zip(&mapping.sides) {
        if *rel == OORelation::Surround {
            match score_surround(tuple.anchor, &tuple.targets) {
                Ok((s, _)) => scores.push(s),
                Err(e) => {
                    note(e.to_string());
                    scores.push(RelationScore::new(0.0));
                }
            }
            continue;
        }
        for t in &tuple.targets {
            match score_oo(*rel, *side, t, tuple.anchor, ctx) {
                Ok(s) => scores.push(s),
                Err(e) => {
                    note(e.to_string());
                    scores.push(RelationScore::new(0.0));
                }
            }
        }
    }
    scores
}

pub fn eval_oo(
    scene: &SceneInstance,
    assignment: &CategoryAssignment,
    specs: &[OORelationSpec],
    judge: &dyn Judge,
    config: &MetricsConfig,
) -> Result<FieldReport, MetricError> {
    let ctx = config.sample_context();
    let mut results = Vec::new();
    for s in specs {
        let line = s.to_string();
        let mapping = match judge
            .judge(&JudgeRequest::map_oo_relation(s))
            .map_err(|e| MetricError::judge(format!("mapping relation '{}'", s.relation_text), e))?
        {
            JudgeResponse::OoMapping(m) => m,
            other => return Err(MetricError::unexpected("map_oo_relation", &other)),
        };
        if let Some(why) = &mapping.none_reason {
            results.push(SpecResult::failed(line, format!("no catalogue relation: {why}")));
            continue;
        }
        let (tuples, truncated) = enumerate_tuples(scene, assignment, &s.anchor(), &target_groups(s, &mapping), config.tuple_cap);
        let mut notes = Vec::new();
        if truncated {
            log::warn!("{}: tuples for '{line}' truncated at {}", scene.id, config.tuple_cap);
            notes.push(format!("tuples truncated at {}", config.tuple_cap));
        }
        let scored: Vec<Vec<RelationScore>> = tuples.iter().map(|t| score_tuple(t, &mapping, &ctx, &mut notes)).collect();
        let (n, passed) = count_satisfied(s.quantifier, s.quantity, &scored);
        if tuples.is_empty() {
            notes.push("no candidate tuples".into());
        }
        results.push(SpecResult {
            spec: line,
            passed,
            satisfied: Some(n),
            mapping: Some(describe_oo(&mapping)),
            reason: (!notes.is_empty()).then(|| notes.join("; ")),
        });
    }
    Ok(FieldReport::from_results(results))
}

/// Rooms an OA spec refers to: the judge's floors, else rooms of the named type,
/// else every room.
fn select_rooms<'a>(scene: &'a SceneInstance, spec: &OARelationSpec, mapping: &ArchMapping) -> Vec<&'a RoomRegion> {
    if !mapping.specific_floors.is_empty() {
        let rooms: Vec<&RoomRegion> = scene
            .rooms
            .iter()
            .filter(|r| r.floor_ids.iter().any(|f| mapping.specific_floors.contains(f)))
            .collect();
        if !rooms.is_empty() {
            return rooms;
        }
    }
    if let ArchRef::RoomType(t) = &spec.arch_ref {
        let rooms: Vec<&RoomRegion> = scene.rooms_of_type(t).collect();
        if !rooms.is_empty() {
            return rooms;
        }
    }
    scene.rooms.iter().collect()
}

fn arch_kind(r: &ArchRef) -> Option<ArchKind> {
    match r {
        ArchRef::Wall => Some(ArchKind::Wall),
        ArchRef::Floor => Some(ArchKind::Floor),
        ArchRef::Ceiling => Some(ArchKind::Ceiling),
        ArchRef::Window => Some(ArchKind::Window),
        ArchRef::Door => Some(ArchKind::Door),
        ArchRef::Room | ArchRef::RoomType(_) => None,
    }
}

fn oa_targets<'a>(
    scene: &'a SceneInstance,
    spec: &OARelationSpec,
    mapping: &ArchMapping,
    relation: OARelation,
) -> Result<Vec<ArchTarget<'a>>, String> {
    let scoped = !mapping.specific_floors.is_empty() || matches!(spec.arch_ref, ArchRef::RoomType(_));
    let rooms = select_rooms(scene, spec, mapping);
    let walls = || -> Vec<ArchTarget<'a>> {
        if scoped {
            let mut ids: Vec<&str> = Vec::new();
            let mut out = Vec::new();
            for r in &rooms {
                for w in scene.room_walls(r) {
                    if !ids.contains(&w.id.as_str()) {
                        ids.push(&w.id);
                        out.push(ArchTarget::Element(w));
                    }
                }
            }
            out
        } else {
            scene.walls().map(ArchTarget::Element).collect()
        }
    };
    let targets = match relation {
        OARelation::InsideRoom | OARelation::MiddleRoom | OARelation::CornerRoom => {
            rooms.into_iter().map(ArchTarget::Room).collect()
        }
        OARelation::OnWall | OARelation::AgainstWall => walls(),
        OARelation::HangCeiling => scene.elements_of(ArchKind::Ceiling).map(ArchTarget::Element).collect(),
        OARelation::NextTo | OARelation::Near | OARelation::Across | OARelation::Far => {
            let reference = mapping.element_type.clone().unwrap_or_else(|| spec.arch_ref.clone());
            match arch_kind(&reference) {
                Some(ArchKind::Wall) => walls(),
                Some(kind) => scene.elements_of(kind).map(ArchTarget::Element).collect(),
                None => rooms.into_iter().map(ArchTarget::Room).collect(),
            }
        }
    };
    if targets.is_empty() {
        let what = match relation {
            OARelation::OnWall | OARelation::AgainstWall => "walls",
            OARelation::HangCeiling => "ceilings",
            OARelation::InsideRoom | OARelation::MiddleRoom | OARelation::CornerRoom => "rooms",
            _ => "matching architecture",
        };
        return Err(format!("scene has no {what}"));
    }
    Ok(targets)
}

pub fn eval_oa(
    scene: &SceneInstance,
    assignment: &CategoryAssignment,
    specs: &[OARelationSpec],
    judge: &dyn Judge,
    config: &MetricsConfig,
) -> Result<FieldReport, MetricError> {
    let ctx = config.sample_context();
    let floor_ids: Vec<String> = scene.floors().map(|f| f.id.clone()).collect();
    let mut results = Vec::new();
    for s in specs {
        let line = s.to_string();
        let mapping = match judge
            .judge(&JudgeRequest::map_oa_relation(s, &floor_ids))
            .map_err(|e| MetricError::judge(format!("mapping relation '{}'", s.relation_text), e))?
        {
            JudgeResponse::OaMapping(m) => m,
            other => return Err(MetricError::unexpected("map_oa_relation", &other)),
        };
        let Some(relation) = mapping.relation else {
            results.push(SpecResult::failed(line, format!("no catalogue relation: {}", mapping.reason)));
            continue;
        };
        let targets = match oa_targets(scene, s, &mapping, relation) {
            Ok(t) => t,
            Err(why) => {
                let mut r = SpecResult::failed(line, why);
                r.mapping = Some(relation.name().into());
                results.push(r);
                continue;
            }
        };
        let instances = objects(scene, assignment.instances(&s.category));
        let mut notes = Vec::new();
        let mut n = 0u32;
        for obj in &instances {
            let mut any = false;
            for t in &targets {
                match score_oa(relation, obj, *t, scene, &ctx) {
                    Ok(score) => any |= score.positive,
                    Err(e) => {
                        let e = e.to_string();
                        if !notes.contains(&e) {
                            notes.push(e);
                        }
                    }
                }
            }
            n += any as u32;
        }
        if instances.is_empty() {
            notes.push(format!("no '{}' instances", s.category));
        }
        let passed = !instances.is_empty() && check_quantifier(s.quantifier, s.quantity, n);
        results.push(SpecResult {
            spec: line,
            passed,
            satisfied: Some(n),
            mapping: Some(relation.name().into()),
            reason: (!notes.is_empty()).then(|| notes.join("; ")),
        });
    }
    Ok(FieldReport::from_results(results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        let items = [1, 2, 3, 4, 5];
        assert_eq!(combinations(&items, 2).len(), 10);
        assert_eq!(combinations(&items, 0), vec![Vec::<i32>::new()]);
        assert!(combinations(&items, 6).is_empty());
        assert_eq!(combinations(&items, 5), vec![items.to_vec()]);
    }
}
