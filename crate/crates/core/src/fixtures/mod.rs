//! Procedural scenes and judge tables for tests and examples.

mod suite;

use nalgebra::{Point3, Vector3};
use serde_json::{json, Value};

use crate::annotation::{OARelationSpec, OORelationSpec};
use crate::geometry::{RigidTransform, TriMesh};
use crate::judge::{JudgeRequest, JudgeTask, MockJudge, SupportType};
use crate::relations::{OARelation, OORelation, Side};
use crate::scene::{ArchElement, ArchKind, ObjectInstance, SceneInstance, DEFAULT_FRONT_AXIS};

pub use suite::{suite, suite_files, suite_judge, write_suite, SuiteCase};

/// Axis-aligned rectangular room on `[0, w] × [0, d]` at z = 0: a floor, four walls of
/// height `h` facing inward, and a ceiling at `h` when `ceiling` is set.
pub fn rect_room(w: f64, d: f64, h: f64, ceiling: bool) -> Vec<ArchElement> {
    let p = Point3::new;
    let floor = ArchElement::from_polygon(
        "floor",
        ArchKind::Floor,
        vec![p(0.0, 0.0, 0.0), p(w, 0.0, 0.0), p(w, d, 0.0), p(0.0, d, 0.0)],
        None,
    )
    .expect("valid floor");
    let wall = |id: &str, a: Point3<f64>, b: Point3<f64>, n: Vector3<f64>| {
        ArchElement::from_polygon(
            id,
            ArchKind::Wall,
            vec![a, b, b + Vector3::z() * h, a + Vector3::z() * h],
            Some(n),
        )
        .expect("valid wall")
    };
    let mut out = vec![
        floor,
        wall("wall_south", p(0.0, 0.0, 0.0), p(w, 0.0, 0.0), Vector3::y()),
        wall("wall_east", p(w, 0.0, 0.0), p(w, d, 0.0), -Vector3::x()),
        wall("wall_north", p(w, d, 0.0), p(0.0, d, 0.0), -Vector3::y()),
        wall("wall_west", p(0.0, d, 0.0), p(0.0, 0.0, 0.0), Vector3::x()),
    ];
    if ceiling {
        out.push(
            ArchElement::from_polygon(
                "ceiling",
                ArchKind::Ceiling,
                vec![p(0.0, 0.0, h), p(0.0, d, h), p(w, d, h), p(w, 0.0, h)],
                None,
            )
            .expect("valid ceiling"),
        );
    }
    out
}

/// Floor only, no walls.
pub fn bare_floor(w: f64, d: f64) -> Vec<ArchElement> {
    rect_room(w, d, 1.0, false).into_iter().take(1).collect()
}

/// Box of full size `size` with its center at `center`, turned by `yaw` about +Z.
/// The front is local +Y.
pub fn box_at(id: &str, size: [f64; 3], center: [f64; 3], yaw: f64) -> ObjectInstance {
    let mesh = TriMesh::cuboid(Vector3::from(size) / 2.0);
    let t = RigidTransform::from_yaw(yaw, Vector3::from(center));
    ObjectInstance::new(id, id, mesh, t, Some(DEFAULT_FRONT_AXIS)).expect("valid box")
}

/// Box resting on z = `base` with footprint center `(x, y)`.
pub fn box_on(id: &str, size: [f64; 3], x: f64, y: f64, base: f64, yaw: f64) -> ObjectInstance {
    box_at(id, size, [x, y, base + size[2] / 2.0], yaw)
}

pub fn scene(id: &str, objects: Vec<ObjectInstance>, architecture: Vec<ArchElement>) -> SceneInstance {
    SceneInstance::new(id, objects, architecture, vec![]).expect("valid scene")
}

/// Builds a [`MockJudge`] from typed answers, producing exactly the requests the
/// metrics issue.
#[derive(Clone, Debug, Default)]
pub struct MockBuilder {
    rows: Vec<(JudgeTask, Value, Value)>,
}

impl MockBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn push(mut self, req: JudgeRequest, response: Value) -> Self {
        self.rows.push((req.task, req.payload, response));
        self
    }

    pub fn category(self, obj: &ObjectInstance, categories: &[String], matched: Option<&str>) -> Self {
        let resp = json!({
            "matched": matched.is_some(),
            "matched_category": matched.unwrap_or(""),
            "reason": "",
        });
        self.push(JudgeRequest::match_category(obj, categories), resp)
    }

    pub fn attribute(self, obj: &ObjectInstance, category: &str, attribute: &str, satisfied: bool) -> Self {
        self.push(
            JudgeRequest::verify_attribute(obj, category, attribute),
            json!({"satisfied": satisfied, "reason": ""}),
        )
    }

    pub fn support(self, obj: &ObjectInstance, kind: SupportType) -> Self {
        let name = serde_json::to_value(kind).expect("support type serializes");
        self.push(JudgeRequest::support_type(obj), json!({"support_type": name, "reason": ""}))
    }

    pub fn sides(self, obj: &ObjectInstance, sides: &[Side]) -> Self {
        let names: Vec<&str> = sides.iter().map(|s| s.as_str()).collect();
        self.push(JudgeRequest::functional_sides(obj), json!({"functional_sides": names, "reason": ""}))
    }

    pub fn oo(self, spec: &OORelationSpec, types: &[(OORelation, Option<Side>)]) -> Self {
        let names: Vec<&str> = types.iter().map(|t| t.0.name()).collect();
        let sides: Vec<Value> = types.iter().map(|t| t.1.map_or(Value::Null, |s| json!(s.as_str()))).collect();
        let groups = spec.target_groups();
        let resp = json!({
            "anchor_object": spec.anchor(),
            "other_objects": groups.iter().map(|g| g.0.clone()).collect::<Vec<_>>(),
            "other_object_counts": groups.iter().map(|g| g.1).collect::<Vec<_>>(),
            "relationship_types": names,
            "sides": sides,
            "reason": "",
        });
        self.push(JudgeRequest::map_oo_relation(spec), resp)
    }

    pub fn oo_none(self, spec: &OORelationSpec, reason: &str) -> Self {
        self.push(
            JudgeRequest::map_oo_relation(spec),
            json!({"relationship_types": null, "sides": null, "reason": reason}),
        )
    }

    pub fn oa(
        self,
        spec: &OARelationSpec,
        floor_ids: &[String],
        relation: OARelation,
        element: &str,
        floors: &[&str],
    ) -> Self {
        let resp = json!({
            "relationship_type": relation.name(),
            "architectural_element_type": element,
            "specific_floors": floors,
            "reason": "",
        });
        self.push(JudgeRequest::map_oa_relation(spec, floor_ids), resp)
    }

    pub fn extend(mut self, other: MockBuilder) -> Self {
        self.rows.extend(other.rows);
        self
    }

    pub fn build(self) -> MockJudge {
        MockJudge::from_rows(self.rows)
    }

    /// Fixture file text, one row per answer.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (task, payload, resp) in &self.rows {
            out.push_str(&MockJudge::row(&JudgeRequest::new(*task, payload.clone()), resp));
            out.push('\n');
        }
        out
    }
}
