use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Point3, Vector3};
use proptest::prelude::*;

use super::*;
use crate::annotation::{parse_spec_line, FieldKind, OARelationSpec, OORelationSpec, SpecLine};
use crate::fixtures::{box_at, box_on, rect_room, scene, MockBuilder};
use crate::geometry::OccupancyMask;
use crate::judge::{MockJudge, SupportType};
use crate::relations::{OARelation, OORelation, Side};
use crate::scene::ObjectInstance;

fn spec(kind: FieldKind, line: &str) -> SpecLine {
    parse_spec_line(kind, line).unwrap()
}

fn oo_spec(line: &str) -> OORelationSpec {
    match spec(FieldKind::Oo, line) {
        SpecLine::Oo(s) => s,
        _ => unreachable!(),
    }
}

fn oa_spec(line: &str) -> OARelationSpec {
    match spec(FieldKind::Oa, line) {
        SpecLine::Oa(s) => s,
        _ => unreachable!(),
    }
}

fn entry(counts: &[&str], attrs: &[&str], oo: &[&str], oa: &[&str]) -> DatasetEntry {
    let mut e = DatasetEntry {
        id: "fixture".into(),
        difficulty: Difficulty::Easy,
        description: String::new(),
        counts: Vec::new(),
        attributes: Vec::new(),
        oo_relations: Vec::new(),
        oa_relations: Vec::new(),
    };
    for l in counts {
        if let SpecLine::Count(s) = spec(FieldKind::Count, l) {
            e.counts.push(s);
        }
    }
    for l in attrs {
        if let SpecLine::Attribute(s) = spec(FieldKind::Attribute, l) {
            e.attributes.push(s);
        }
    }
    e.oo_relations = oo.iter().map(|l| oo_spec(l)).collect();
    e.oa_relations = oa.iter().map(|l| oa_spec(l)).collect();
    e
}

fn cats(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn assign(pairs: &[(&str, &[&str])]) -> CategoryAssignment {
    CategoryAssignment {
        by_category: pairs
            .iter()
            .map(|(c, ids)| (c.to_string(), ids.iter().map(|s| s.to_string()).collect()))
            .collect(),
        unmatched_objects: Vec::new(),
    }
}

fn config() -> MetricsConfig {
    MetricsConfig {
        relation_samples: 400,
        oob_samples: 400,
        ..MetricsConfig::default()
    }
}

// matching

#[test]
fn matching_groups_by_verdict() {
    let b1 = box_on("b1", [1.6, 2.0, 0.5], 1.5, 2.0, 0.0, 0.0);
    let b2 = box_on("b2", [1.6, 2.0, 0.5], 4.0, 2.0, 0.0, 0.0);
    let d1 = box_on("d1", [1.2, 0.6, 0.75], 2.5, 4.5, 0.0, 0.0);
    let c = cats(&["bed", "desk"]);
    let judge = MockBuilder::new()
        .category(&b1, &c, Some("bed"))
        .category(&b2, &c, Some("bed"))
        .category(&d1, &c, Some("desk"))
        .build();
    let s = scene("s", vec![b1, b2, d1], rect_room(6.0, 6.0, 3.0, false));
    let a = match_objects(&s, &c, &judge).unwrap();
    assert_eq!(a.instances("bed"), ["b1", "b2"]);
    assert_eq!(a.instances("desk"), ["d1"]);
    assert!(a.unmatched_objects.is_empty());
}

#[test]
fn unmatched_and_empty() {
    let sofa = box_on("sofa", [2.0, 0.9, 0.8], 3.0, 3.0, 0.0, 0.0);
    let c = cats(&["bed"]);
    let judge = MockBuilder::new().category(&sofa, &c, None).build();
    let s = scene("s", vec![sofa], rect_room(6.0, 6.0, 3.0, false));
    let a = match_objects(&s, &c, &judge).unwrap();
    assert_eq!(a.unmatched_objects, ["sofa"]);
    assert!(a.instances("bed").is_empty());
    assert!(a.by_category.contains_key("bed"));

    let empty = scene("e", vec![], rect_room(6.0, 6.0, 3.0, false));
    let a = match_objects(&empty, &cats(&["bed", "desk"]), &MockJudge::default()).unwrap();
    assert_eq!(a.by_category.len(), 2);
    assert!(a.by_category.values().all(Vec::is_empty));
}

#[test]
fn matching_propagates_judge_error_with_object() {
    let sofa = box_on("sofa_7", [2.0, 0.9, 0.8], 3.0, 3.0, 0.0, 0.0);
    let s = scene("s", vec![sofa], rect_room(6.0, 6.0, 3.0, false));
    let err = match_objects(&s, &cats(&["bed"]), &MockJudge::default()).unwrap_err();
    assert!(err.to_string().contains("sofa_7"), "{err}");
    assert!(err.to_string().contains("missing fixture entry"), "{err}");
}

// counts and attributes

#[test]
fn count_examples() {
    let e = entry(&["eq,1,bed", "ge,2,chair", "eq,0,sofa"], &[], &[], &[]);
    let a = assign(&[("bed", &["b"]), ("chair", &["c"]), ("sofa", &[])]);
    let r = eval_count(&a, &e.counts);
    let passed: Vec<bool> = r.results.iter().map(|x| x.passed).collect();
    assert_eq!(passed, [true, false, true]);
    assert_eq!(r.total, 3);
    assert!((r.percent.unwrap() - 200.0 / 3.0).abs() < 1e-12);
    assert_eq!(eval_count(&a, &[]).percent, None);
}

#[test]
fn attribute_examples() {
    let bed = box_on("bed", [1.6, 2.0, 0.5], 3.0, 3.0, 0.0, 0.0);
    let s = scene("s", vec![bed.clone()], rect_room(6.0, 6.0, 3.0, false));
    let e = entry(&["eq,1,bed"], &["eq,1,bed,red"], &[], &[]);
    let a = assign(&[("bed", &["bed"])]);
    for (red, expect) in [(true, true), (false, false)] {
        let judge = MockBuilder::new().attribute(&bed, "bed", "red", red).build();
        let r = eval_attribute(&s, &a, &e.attributes, &judge).unwrap();
        assert_eq!(r.results[0].passed, expect);
    }
    let none = assign(&[("bed", &[])]);
    let r = eval_attribute(&s, &none, &e.attributes, &MockJudge::default()).unwrap();
    assert!(!r.results[0].passed);
    assert!(r.results[0].reason.as_ref().unwrap().contains("no 'bed'"));
}

// object-object relations

#[test]
fn nightstand_left_of_bed() {
    let bed = box_on("bed", [1.6, 2.0, 0.5], 3.0, 3.0, 0.0, 0.0);
    let left = box_on("ns", [0.4, 0.4, 0.5], 1.95, 3.7, 0.0, 0.0);
    let right = box_on("ns", [0.4, 0.4, 0.5], 4.05, 3.7, 0.0, 0.0);
    let sp = oo_spec("eq,1,left of,0,bed,nightstand");
    let judge = MockBuilder::new().oo(&sp, &[(OORelation::SideOf, Some(Side::Left))]).build();
    let a = assign(&[("bed", &["bed"]), ("nightstand", &["ns"])]);
    let pass = |ns: &ObjectInstance| {
        let s = scene("s", vec![bed.clone(), ns.clone()], rect_room(6.0, 6.0, 3.0, false));
        let r = eval_oo(&s, &a, std::slice::from_ref(&sp), &judge, &config()).unwrap();
        assert_eq!(r.results[0].mapping.as_deref(), Some("side_of:left"));
        r.results[0].passed
    };
    assert!(pass(&left));
    assert!(!pass(&right));
}

#[test]
fn chair_facing_desk() {
    let desk = box_on("desk", [1.2, 0.6, 0.75], 3.0, 3.0, 0.0, 0.0);
    let sp = oo_spec("eq,1,facing,0,desk,chair");
    let judge = MockBuilder::new().oo(&sp, &[(OORelation::Face, None)]).build();
    let a = assign(&[("desk", &["desk"]), ("chair", &["chair"])]);
    let run = |yaw: f64| {
        let chair = box_on("chair", [0.5, 0.5, 0.9], 3.0, 2.2, 0.0, yaw);
        let s = scene("s", vec![desk.clone(), chair], rect_room(6.0, 6.0, 3.0, false));
        eval_oo(&s, &a, std::slice::from_ref(&sp), &judge, &config()).unwrap().results[0].passed
    };
    assert!(run(0.0));
    assert!(!run(PI));
}

fn ring(n: usize, center: [f64; 2], r: f64, phase: f64) -> Vec<ObjectInstance> {
    (0..n)
        .map(|k| {
            let a = phase + k as f64 * 2.0 * PI / n as f64;
            box_on(&format!("chair_{k}"), [0.4, 0.4, 0.9], center[0] + r * a.cos(), center[1] + r * a.sin(), 0.0, 0.0)
        })
        .collect()
}

#[test]
fn chairs_surround_table() {
    let table = box_on("table", [1.0, 1.0, 0.75], 3.0, 3.0, 0.0, 0.0);
    let sp = oo_spec("eq,1,around,0,table,chair*4");
    let judge = MockBuilder::new().oo(&sp, &[(OORelation::Surround, None)]).build();
    let chairs = ring(4, [3.0, 3.0], 1.0, 0.3);
    let ids: Vec<&str> = chairs.iter().map(|c| c.id.as_str()).collect();
    let a = assign(&[("table", &["table"]), ("chair", &ids)]);
    let mut objs = vec![table];
    objs.extend(chairs);
    let s = scene("s", objs, rect_room(6.0, 6.0, 3.0, false));
    let r = eval_oo(&s, &a, &[sp], &judge, &config()).unwrap();
    assert!(r.results[0].passed);
    assert_eq!(r.results[0].satisfied, Some(1));
}

#[test]
fn surround_count_from_mapping_and_missing_instances() {
    let table = box_on("table", [1.0, 1.0, 0.75], 3.0, 3.0, 0.0, 0.0);
    let sp = oo_spec("eq,1,surrounded by,0,table,chair");
    let chairs = ring(3, [3.0, 3.0], 1.0, 0.0);
    let ids: Vec<&str> = chairs.iter().map(|c| c.id.as_str()).collect();
    let a = assign(&[("table", &["table"]), ("chair", &ids)]);
    let mut objs = vec![table];
    objs.extend(chairs);
    let s = scene("s", objs, rect_room(6.0, 6.0, 3.0, false));
    // the judge reports three chairs
    let req = crate::judge::JudgeRequest::map_oo_relation(&sp);
    let judge = MockJudge::from_rows(vec![(
        req.task,
        req.payload,
        serde_json::json!({"anchor_object": "table", "other_objects": ["chair"], "other_object_counts": [3],
                           "relationship_types": ["surround"], "sides": [null], "reason": ""}),
    )]);
    let r = eval_oo(&s, &a, std::slice::from_ref(&sp), &judge, &config()).unwrap();
    assert!(r.results[0].passed, "{:?}", r.results[0]);

    let none = assign(&[("table", &["table"]), ("chair", &[])]);
    let r = eval_oo(&s, &none, &[sp], &judge, &config()).unwrap();
    assert!(!r.results[0].passed);
    assert_eq!(r.results[0].satisfied, Some(0));
}

#[test]
fn unmappable_relation_fails_with_reason() {
    let sp = oo_spec("eq,1,in harmony with,0,bed,lamp");
    let judge = MockBuilder::new().oo_none(&sp, "aesthetic, not spatial").build();
    let s = scene("s", vec![], rect_room(6.0, 6.0, 3.0, false));
    let r = eval_oo(&s, &assign(&[]), &[sp], &judge, &config()).unwrap();
    assert!(!r.results[0].passed);
    assert!(r.results[0].reason.as_ref().unwrap().contains("aesthetic"));
}

#[test]
fn tuples_are_capped() {
    let mut objs = Vec::new();
    let mut ids = Vec::new();
    for k in 0..8 {
        let id = format!("c{k}");
        objs.push(box_on(&id, [0.3, 0.3, 0.3], 0.5 + 0.6 * k as f64, 1.0, 0.0, 0.0));
        ids.push(id);
    }
    let idr: Vec<&str> = ids.iter().map(String::as_str).collect();
    let sp = oo_spec("ge,0,near,0,cup,cup");
    let judge = MockBuilder::new().oo(&sp, &[(OORelation::Near, None)]).build();
    let s = scene("s", objs, rect_room(6.0, 6.0, 3.0, false));
    let cfg = MetricsConfig {
        tuple_cap: 10,
        ..config()
    };
    let r = eval_oo(&s, &assign(&[("cup", &idr)]), &[sp], &judge, &cfg).unwrap();
    assert!(r.results[0].reason.as_ref().unwrap().contains("truncated at 10"));
}

// object-architecture relations

fn floor_ids() -> Vec<String> {
    vec!["floor".into()]
}

#[test]
fn bookshelf_against_wall() {
    let sp = oa_spec("eq,1,against,bookshelf,wall");
    let judge = MockBuilder::new()
        .oa(&sp, &floor_ids(), OARelation::AgainstWall, "wall", &[])
        .build();
    let a = assign(&[("bookshelf", &["shelf"])]);
    let run = |gap: f64| {
        let shelf = box_on("shelf", [1.0, 0.4, 1.8], 3.0, gap + 0.2, 0.0, 0.0);
        let s = scene("s", vec![shelf], rect_room(6.0, 6.0, 3.0, false));
        eval_oa(&s, &a, std::slice::from_ref(&sp), &judge, &config()).unwrap().results[0].passed
    };
    assert!(run(0.1));
    assert!(!run(1.0));
}

#[test]
fn wardrobe_in_center_is_not_in_corner() {
    let sp = oa_spec("eq,1,corner,wardrobe,room");
    let judge = MockBuilder::new()
        .oa(&sp, &floor_ids(), OARelation::CornerRoom, "room", &[])
        .build();
    let a = assign(&[("wardrobe", &["w"])]);
    let run = |x: f64, y: f64| {
        let w = box_on("w", [1.0, 0.6, 2.0], x, y, 0.0, 0.0);
        let s = scene("s", vec![w], rect_room(6.0, 6.0, 3.0, false));
        eval_oa(&s, &a, std::slice::from_ref(&sp), &judge, &config()).unwrap().results[0].passed
    };
    assert!(!run(3.0, 3.0));
    assert!(run(0.6, 0.4));
}

#[test]
fn lamp_on_floor_does_not_hang() {
    let sp = oa_spec("eq,1,hanging from,lamp,ceiling");
    let judge = MockBuilder::new()
        .oa(&sp, &floor_ids(), OARelation::HangCeiling, "ceiling", &[])
        .build();
    let a = assign(&[("lamp", &["lamp"])]);
    let run = |lamp: ObjectInstance| {
        let s = scene("s", vec![lamp], rect_room(6.0, 6.0, 3.0, true));
        eval_oa(&s, &a, std::slice::from_ref(&sp), &judge, &config()).unwrap().results[0].passed
    };
    assert!(!run(box_on("lamp", [0.4, 0.4, 0.5], 3.0, 3.0, 0.0, 0.0)));
    assert!(run(box_on("lamp", [0.4, 0.4, 0.5], 3.0, 3.0, 2.5, 0.0)));
}

#[test]
fn wall_relation_without_walls_fails_with_reason() {
    let sp = oa_spec("eq,1,against,bookshelf,wall");
    let judge = MockBuilder::new()
        .oa(&sp, &floor_ids(), OARelation::AgainstWall, "wall", &[])
        .build();
    let shelf = box_on("shelf", [1.0, 0.4, 1.8], 3.0, 0.3, 0.0, 0.0);
    let s = scene("s", vec![shelf], crate::fixtures::bare_floor(6.0, 6.0));
    let r = eval_oa(&s, &assign(&[("bookshelf", &["shelf"])]), &[sp], &judge, &config()).unwrap();
    assert!(!r.results[0].passed);
    assert_eq!(r.results[0].reason.as_deref(), Some("scene has no walls"));
}

// collision

#[test]
fn collision_examples() {
    let arch = rect_room(6.0, 6.0, 3.0, false);
    let a = box_on("a", [1.0, 1.0, 1.0], 1.0, 1.0, 0.0, 0.0);
    let b = box_on("b", [1.0, 1.0, 1.0], 1.5, 1.2, 0.0, 0.3);
    let c = box_on("c", [1.0, 1.0, 1.0], 4.0, 4.0, 0.0, 0.0);
    let r = eval_collision(&scene("s", vec![a.clone(), b.clone()], arch.clone()));
    assert_eq!((r.col_ob, r.col_sc), (100.0, true));
    let far = box_on("b", [1.0, 1.0, 1.0], 3.0, 1.0, 0.0, 0.0);
    let r = eval_collision(&scene("s", vec![a.clone(), far], arch.clone()));
    assert_eq!((r.col_ob, r.col_sc), (0.0, false));
    let r = eval_collision(&scene("s", vec![a.clone(), b, c], arch.clone()));
    assert!((r.col_ob - 200.0 / 3.0).abs() < 1e-12);
    assert_eq!(r.colliding_pairs, vec![("a".to_string(), "b".to_string())]);
    // face contact is not a collision
    let touching = box_on("t", [1.0, 1.0, 1.0], 2.0, 1.0, 0.0, 0.0);
    assert!(!eval_collision(&scene("s", vec![a, touching], arch)).col_sc);
}

// support

fn support_of(objs: Vec<ObjectInstance>, idx: usize, kind: SupportType) -> bool {
    let s = scene("s", objs, rect_room(6.0, 6.0, 3.0, true));
    check_support(&s, idx, kind, 0.01).0
}

#[test]
fn support_examples() {
    let on_floor = box_on("b", [0.5, 0.5, 0.5], 3.0, 3.0, 0.0, 0.4);
    assert!(support_of(vec![on_floor], 0, SupportType::Ground));
    let floating = box_on("b", [0.5, 0.5, 0.5], 3.0, 3.0, 0.1, 0.0);
    assert!(!support_of(vec![floating], 0, SupportType::Ground));
    let slightly_sunk = box_on("b", [0.5, 0.5, 0.5], 3.0, 3.0, -0.003, 0.0);
    assert!(support_of(vec![slightly_sunk], 0, SupportType::Ground));
}

#[test]
fn overhang_on_table() {
    let table = box_on("table", [1.0, 1.0, 0.75], 3.0, 3.0, 0.0, 0.0);
    let run = |fraction: f64| {
        let w = 0.4;
        let x = 3.5 - w / 2.0 + fraction * w;
        let b = box_on("box", [w, w, 0.2], x, 3.0, 0.75, 0.0);
        support_of(vec![table.clone(), b], 1, SupportType::Object)
    };
    assert!(run(0.0));
    assert!(run(0.4));
    assert!(run(0.49));
    assert!(!run(0.51));
    assert!(!run(0.6));
}

#[test]
fn wall_and_ceiling_support() {
    // picture on the south wall, front facing into the room
    let picture = box_on("pic", [0.8, 0.04, 0.6], 3.0, 0.02, 1.2, 0.0);
    assert!(support_of(vec![picture], 0, SupportType::Wall));
    let loose = box_on("pic", [0.8, 0.04, 0.6], 3.0, 0.2, 1.2, 0.0);
    assert!(!support_of(vec![loose], 0, SupportType::Wall));
    let lamp = box_on("lamp", [0.3, 0.3, 0.4], 3.0, 3.0, 2.6, 0.0);
    assert!(support_of(vec![lamp], 0, SupportType::Ceiling));
}

// navigability

#[test]
fn navigability_examples() {
    let empty = scene("s", vec![], rect_room(5.0, 4.0, 3.0, false));
    let occ = SceneOccupancy::build(&empty, 0.05);
    assert_eq!(eval_navigability(&occ).nav, 1.0);

    let sofa = box_on("sofa", [0.5, 4.0, 0.8], 2.95, 2.0, 0.0, 0.0);
    let split = scene("s", vec![sofa], rect_room(5.0, 4.0, 3.0, false));
    let nav = eval_navigability(&SceneOccupancy::build(&split, 0.05));
    assert_eq!(nav.components, 2);
    // one ring of boundary cells per region
    let tol = 0.05 * 2.0 * (2.7 + 1.8 + 8.0) / (4.5 * 4.0);
    assert!((nav.nav - 0.6).abs() <= tol, "{}", nav.nav);

    let full = navigability_of(&OccupancyMask::from_grid(4, 4, 0.1, vec![true; 16]));
    assert_eq!(full.nav, 0.0);
    assert!(full.no_free_space);
}

// accessibility

fn access(objs: Vec<ObjectInstance>, idx: usize, sides: &[Side]) -> ObjectAccess {
    let s = scene("s", objs, rect_room(6.0, 6.0, 3.0, false));
    let occ = SceneOccupancy::build(&s, 0.05);
    access_of(&occ, &s, idx, sides, 0.5)
}

#[test]
fn accessibility_examples() {
    let sofa = box_on("sofa", [2.0, 0.9, 0.8], 3.0, 3.0, 0.0, 0.0);
    assert_eq!(access(vec![sofa], 0, &[Side::Front]).best, Some(1.0));

    let w1 = box_on("w1", [1.0, 0.6, 2.0], 3.0, 3.0, 0.0, 0.0);
    let w2 = box_on("w2", [1.0, 0.6, 2.0], 3.0, 3.6, 0.0, PI);
    assert_eq!(access(vec![w1, w2], 0, &[Side::Front]).best, Some(0.0));

    // bed facing +Y: left is -X, right is +X
    let bed = box_on("bed", [1.6, 2.0, 0.5], 3.0, 3.0, 0.0, 0.0);
    let blocker = box_on("ns", [0.5, 1.0, 0.5], 1.95, 3.5, 0.0, 0.0);
    let acc = access(vec![bed, blocker], 0, &[Side::Left, Side::Right]);
    let left = acc.sides[0].score.unwrap();
    assert!((left - 0.5).abs() < 0.05, "{left}");
    assert_eq!(acc.sides[1].score, Some(1.0));
    assert_eq!(acc.best, Some(1.0));
}

#[test]
fn accessibility_excludes_objects_without_sides() {
    let cup = box_on("cup", [0.1, 0.1, 0.1], 3.0, 3.0, 0.0, 0.0);
    let sofa = box_on("sofa", [2.0, 0.9, 0.8], 3.0, 1.0, 0.0, 0.0);
    let judge = MockBuilder::new().sides(&cup, &[]).sides(&sofa, &[Side::Front]).build();
    let s = scene("s", vec![cup, sofa], rect_room(6.0, 6.0, 3.0, false));
    let occ = SceneOccupancy::build(&s, 0.05);
    let r = eval_accessibility(&s, &occ, &judge, &config()).unwrap();
    assert_eq!(r.objects[0].best, None);
    assert_eq!(r.mean, Some(1.0));
}

// out of bounds

#[test]
fn oob_examples() {
    let inside = box_on("in", [0.5, 0.5, 0.5], 3.0, 3.0, 0.0, 0.0);
    let outside = box_on("out", [0.5, 0.5, 0.5], 8.0, 3.0, 0.0, 0.0);
    let s = scene("s", vec![inside, outside], rect_room(6.0, 6.0, 3.0, false));
    let r = eval_oob(&s, &config(), None);
    assert!(!r.objects[0].out_of_bounds);
    assert!(r.objects[1].out_of_bounds);
    assert_eq!(r.oob, Some(50.0));
}

#[test]
fn oob_threshold_on_explicit_points() {
    let s = scene("s", vec![], rect_room(6.0, 6.0, 3.0, false));
    let floors: Vec<_> = s.floors().map(|f| (f.id.as_str(), f.geometry())).collect();
    for (inside, expect_oob) in [(100, false), (99, false), (98, true)] {
        let pts: Vec<Point3<f64>> = (0..100)
            .map(|k| {
                let x = if k < inside { 3.0 } else { 7.0 };
                Point3::new(x, 0.5 + 0.05 * k as f64, 0.2)
            })
            .collect();
        let hits = floor_hits(&pts, &floors);
        assert_eq!(hits, inside);
        assert_eq!(is_out_of_bounds(hits, 100), expect_oob);
    }
}

#[test]
fn oob_exemption_for_wall_objects() {
    let pic = box_on("pic", [0.8, 0.04, 0.6], 3.0, -0.5, 1.2, 0.0);
    let s = scene("s", vec![pic], rect_room(6.0, 6.0, 3.0, false));
    let sup = SupportReport {
        sup: Some(0.0),
        objects: vec![SupportVerdict {
            id: "pic".into(),
            support_type: SupportType::Wall,
            contacts: 0,
            supported: false,
        }],
    };
    let cfg = MetricsConfig {
        oob_exempt_wall_ceiling: true,
        ..config()
    };
    let r = eval_oob(&s, &cfg, Some(&sup));
    assert!(r.objects[0].exempt && r.objects[0].out_of_bounds);
    assert_eq!(r.oob, None);
    assert_eq!(eval_oob(&s, &config(), Some(&sup)).oob, Some(100.0));
}

// whole scenes

struct Bedroom {
    scene: crate::scene::SceneInstance,
    entry: DatasetEntry,
    judge: MockJudge,
}

/// Bed against the north wall with a nightstand on its left and a red rug; every spec
/// is satisfied.
fn bedroom(with_bed: bool) -> Bedroom {
    let entry = entry(
        &["eq,1,bed", "eq,1,nightstand"],
        &["eq,1,bed,red"],
        &["eq,1,left of,0,bed,nightstand"],
        &["eq,1,against,bed,wall"],
    );
    let bed = box_at("bed", [1.6, 2.0, 0.5], [3.0, 4.9, 0.25], PI);
    let ns = box_on("nightstand", [0.4, 0.4, 0.5], 4.1, 5.5, 0.0, PI);
    let c = entry_categories(&entry);
    let mut objs = vec![ns.clone()];
    let mut b = MockBuilder::new()
        .category(&ns, &c, Some("nightstand"))
        .support(&ns, SupportType::Ground)
        .sides(&ns, &[]);
    if with_bed {
        objs.insert(0, bed.clone());
        b = b
            .category(&bed, &c, Some("bed"))
            .attribute(&bed, "bed", "red", true)
            .support(&bed, SupportType::Ground)
            .sides(&bed, &[Side::Left, Side::Right]);
    }
    let b = b
        .oo(&entry.oo_relations[0], &[(OORelation::SideOf, Some(Side::Left))])
        .oa(&entry.oa_relations[0], &floor_ids(), OARelation::AgainstWall, "wall", &[]);
    Bedroom {
        scene: scene("bedroom", objs, rect_room(6.0, 6.0, 3.0, true)),
        entry,
        judge: b.build(),
    }
}

#[test]
fn bedroom_satisfies_everything() {
    let b = bedroom(true);
    let r = evaluate_scene(&b.scene, &b.entry, &b.judge, &config());
    assert!(r.errors.is_empty(), "{:?}", r.errors);
    let s = r.summary();
    for v in [s.cnt, s.atr, s.oor, s.oar] {
        assert_eq!(v, Some(100.0), "{:#?}", r);
    }
    assert_eq!(s.col_ob, Some(0.0));
    assert_eq!(s.sup, Some(100.0));
    assert_eq!(s.oob, Some(0.0));
    assert_eq!(s.nav, Some(1.0));
    assert_eq!(r.acc.as_ref().unwrap().objects[1].best, None);
}

#[test]
fn deleting_the_bed_fails_dependent_specs() {
    let b = bedroom(false);
    let r = evaluate_scene(&b.scene, &b.entry, &b.judge, &config());
    assert!(r.errors.is_empty(), "{:?}", r.errors);
    let pass = |f: &Option<FieldReport>| f.as_ref().unwrap().results.iter().map(|x| x.passed).collect::<Vec<_>>();
    assert_eq!(pass(&r.cnt), [false, true]);
    assert_eq!(pass(&r.atr), [false]);
    assert_eq!(pass(&r.oor), [false]);
    assert_eq!(pass(&r.oar), [false]);
}

#[test]
fn empty_scene_and_annotations() {
    let s = scene("empty", vec![], rect_room(4.0, 4.0, 3.0, false));
    let e = entry(&[], &[], &[], &[]);
    let r = evaluate_scene(&s, &e, &MockJudge::default(), &config());
    assert!(r.errors.is_empty());
    let m = r.summary();
    assert_eq!((m.cnt, m.atr, m.oor, m.oar), (None, None, None, None));
    assert_eq!(m.col_ob, Some(0.0));
    assert_eq!(m.col_sc, Some(0.0));
    assert_eq!(m.nav, Some(1.0));
    assert_eq!((m.sup, m.acc, m.oob), (None, None, None));
    assert_eq!(r.judge_requests, 0);
}

#[test]
fn judge_failures_do_not_stop_other_metrics() {
    let b = bedroom(true);
    let r = evaluate_scene(&b.scene, &b.entry, &MockJudge::default(), &config());
    assert!(r.cnt.is_none() && r.sup.is_none() && r.acc.is_none());
    assert_eq!(r.errors.len(), 3);
    assert_eq!(r.nav.nav, 1.0);
    assert_eq!(r.oob.oob, Some(0.0));
}

#[test]
fn reports_are_byte_stable_and_motion_invariant() {
    let b = bedroom(true);
    let r1 = evaluate_scene(&b.scene, &b.entry, &b.judge, &config());
    let r2 = evaluate_scene(&b.scene, &b.entry, &b.judge, &config());
    assert_eq!(r1.to_json(), r2.to_json());
    let back: SceneReport = serde_json::from_str(&r1.to_json()).unwrap();
    assert_eq!(back.to_json(), r1.to_json());

    let t = crate::geometry::RigidTransform::from_yaw(0.7, Vector3::new(12.0, -3.5, 0.0));
    let moved = b.scene.transformed(&t);
    let r3 = evaluate_scene(&moved, &b.entry, &b.judge, &config());
    for (a, c) in r1.summary().values().iter().zip(r3.summary().values()) {
        match (a, c) {
            (Some(a), Some(c)) => assert!((a - c).abs() <= 1e-6, "{a} vs {c}"),
            _ => assert_eq!(*a, c),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn col_sc_matches_col_ob(seed in proptest::collection::vec((0.5f64..5.5, 0.5f64..5.5, 0.0f64..FRAC_PI_2), 1..6)) {
        let objs: Vec<ObjectInstance> = seed
            .iter()
            .enumerate()
            .map(|(i, (x, y, yaw))| box_on(&format!("o{i}"), [0.8, 0.6, 0.5], *x, *y, 0.0, *yaw))
            .collect();
        let r = eval_collision(&scene("s", objs, rect_room(6.0, 6.0, 3.0, false)));
        prop_assert_eq!(r.col_sc, r.col_ob > 0.0);
        prop_assert!((0.0..=100.0).contains(&r.col_ob));
    }

    #[test]
    fn deleting_never_raises_ge_gt_passes(n in 0usize..6, q in 0u32..6, drop in 0usize..6) {
        let ids: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let mut a = CategoryAssignment::default();
        a.by_category.insert("chair".into(), ids.clone());
        let specs: Vec<_> = ["ge", "gt"]
            .iter()
            .map(|op| match spec(FieldKind::Count, &format!("{op},{q},chair")) {
                SpecLine::Count(s) => s,
                _ => unreachable!(),
            })
            .collect();
        let before = eval_count(&a, &specs).passed;
        if n > 0 {
            a.by_category.get_mut("chair").unwrap().remove(drop % n);
        }
        prop_assert!(eval_count(&a, &specs).passed <= before);
    }
}
