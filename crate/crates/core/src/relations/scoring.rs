use std::f64::consts::{PI, TAU};

use nalgebra::{Point2, Point3, Vector2, Vector3};

use super::catalog::{
    OARelation, OORelation, CORNER_WALL, FACE_MAX_ANGLE_DEG, HANG_CEILING, MIDDLE_OF_SIGMA, MIDDLE_ROOM_MIN_SIGMA,
    PERPENDICULAR_DOT_TOL,
};
use super::{
    DistanceBand, RelationError, RelationScore, Side, SideMode, SideSpec, SurroundEvaluation, AGAINST_WALL, ON_WALL,
};
use crate::annotation::{check_quantifier, Quantifier};
use crate::geometry::{closest_surface_distance, derive_seed, sample_points_obb};
use crate::scene::{world_front_vector, ArchElement, ArchKind, ObjectInstance, RoomRegion, SceneInstance};

/// Sample count and base seed for box sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleContext {
    pub count: usize,
    pub seed: u64,
}

impl Default for SampleContext {
    fn default() -> Self {
        Self { count: 1000, seed: 0 }
    }
}

/// Uniform samples in the object's box. The stream depends on the object id only, and
/// points are drawn in box coordinates, so they move rigidly with the object.
pub fn box_samples(obj: &ObjectInstance, ctx: &SampleContext) -> Vec<Point3<f64>> {
    sample_points_obb(&obj.obb, ctx.count, derive_seed(ctx.seed, &format!("box:{}", obj.id))).points
}

fn fraction(samples: &[Point3<f64>], pred: impl Fn(&Point3<f64>) -> bool) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().filter(|p| pred(p)).count() as f64 / samples.len() as f64
}

fn gaussian(x: f64, sigma: f64) -> f64 {
    (-(x * x) / (2.0 * sigma * sigma)).exp()
}

fn xy(p: &Point3<f64>) -> Point2<f64> {
    Point2::new(p.x, p.y)
}

pub fn score_distance_band(d: f64, band: DistanceBand) -> RelationScore {
    if d >= band.lo && d <= band.hi {
        return RelationScore::new(1.0);
    }
    let delta = (band.lo - d).max(d - band.hi);
    RelationScore::new(gaussian(delta, band.sigma))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContainmentMode {
    Inside,
    Outside,
}

/// Fraction of target-box samples inside (or outside) the anchor box.
pub fn score_containment(
    samples: &[Point3<f64>],
    anchor: &crate::geometry::Obb,
    mode: ContainmentMode,
) -> RelationScore {
    let inside = fraction(samples, |p| anchor.contains(p, 0.0));
    RelationScore::new(match mode {
        ContainmentMode::Inside => inside,
        ContainmentMode::Outside => 1.0 - inside,
    })
}

/// Linear falloff from 1 at 0° to 0 at the maximum angle.
pub fn face_falloff(theta_deg: f64) -> f64 {
    (1.0 - theta_deg / FACE_MAX_ANGLE_DEG).clamp(0.0, 1.0)
}

/// Whether `target` faces `anchor`: rays from the target-box samples along the
/// target's front; the horizontal angle to the mean hit point sets the score.
pub fn score_face(
    target: &ObjectInstance,
    anchor: &ObjectInstance,
    samples: &[Point3<f64>],
) -> Result<RelationScore, RelationError> {
    let front = world_front_vector(target).map_err(|_| RelationError::NoFrontVector(target.id.clone()))?;
    let mut sum = Vector3::zeros();
    let mut hits = 0usize;
    for p in samples {
        if let Some((t, _)) = anchor.world_mesh().raycast(p, &front, 0.0, f64::INFINITY) {
            sum += (p + front * t).coords;
            hits += 1;
        }
    }
    if hits == 0 {
        return Ok(RelationScore::new(0.0));
    }
    let mean = Point3::from(sum / hits as f64);
    let f2 = Vector2::new(front.x, front.y);
    let v2 = xy(&mean) - xy(&target.centroid());
    if f2.norm() < 1e-9 {
        return Ok(RelationScore::new(0.0));
    }
    let theta = if v2.norm() < 1e-12 {
        0.0
    } else {
        f2.angle(&v2).to_degrees()
    };
    Ok(RelationScore::new(face_falloff(theta)))
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Box axis index and direction sign of a lateral or vertical side of the anchor.
/// Box axis index and sign pointing toward `side` of `anchor`.
pub fn side_axis(anchor: &ObjectInstance, side: Side) -> Result<(usize, f64), RelationError> {
    let obb = &anchor.obb;
    let up = obb.vertical_axis();
    let up_sign = sign(obb.axis(up).z);
    match side {
        Side::Top => return Ok((up, up_sign)),
        Side::Bottom => return Ok((up, -up_sign)),
        _ => {}
    }
    let front = world_front_vector(anchor).map_err(|_| RelationError::NoFrontVector(anchor.id.clone()))?;
    let horiz: Vec<usize> = (0..3).filter(|&i| i != up).collect();
    let (fi, fs) = {
        let d0 = obb.axis(horiz[0]).dot(&front);
        let d1 = obb.axis(horiz[1]).dot(&front);
        if d0.abs() >= d1.abs() {
            (horiz[0], sign(d0))
        } else {
            (horiz[1], sign(d1))
        }
    };
    let ri = if fi == horiz[0] { horiz[1] } else { horiz[0] };
    let right = (obb.axis(fi) * fs).cross(&(obb.axis(up) * up_sign));
    let rs = sign(obb.axis(ri).dot(&right));
    Ok(match side {
        Side::Front => (fi, fs),
        Side::Back => (fi, -fs),
        Side::Right => (ri, rs),
        Side::Left => (ri, -rs),
        _ => unreachable!(),
    })
}

/// Region test for a side relation of `anchor`, in the anchor's box frame.
pub fn side_membership(
    anchor: &ObjectInstance,
    spec: SideSpec,
) -> Result<impl Fn(&Point3<f64>) -> bool + '_, RelationError> {
    let obb = anchor.obb;
    let h = obb.half_extents;
    let up = obb.vertical_axis();
    let faces: Vec<(usize, f64)> = match spec.mode {
        SideMode::LongShort => {
            let horiz: Vec<usize> = (0..3).filter(|&i| i != up).collect();
            let (long_ax, short_ax) = if h[horiz[0]] >= h[horiz[1]] {
                (horiz[0], horiz[1])
            } else {
                (horiz[1], horiz[0])
            };
            // Long sides are the faces normal to the short axis.
            let axis = if spec.side == Side::Long { short_ax } else { long_ax };
            vec![(axis, 1.0), (axis, -1.0)]
        }
        _ => vec![side_axis(anchor, spec.side)?],
    };
    let lateral = 1.0 + spec.extension();
    let mode = spec.mode;
    Ok(move |p: &Point3<f64>| {
        let q = obb.to_local(p);
        faces.iter().any(|&(k, s)| {
            let beyond = match mode {
                SideMode::SideRegion => s * q[k] > 0.0,
                _ => s * q[k] > h[k],
            };
            beyond && (0..3).filter(|&j| j != k).all(|j| q[j].abs() <= lateral * h[j])
        })
    })
}

/// Fraction of target-box samples in the anchor's side region.
pub fn score_side_family(
    samples: &[Point3<f64>],
    anchor: &ObjectInstance,
    spec: SideSpec,
) -> Result<RelationScore, RelationError> {
    let inside = side_membership(anchor, spec)?;
    Ok(RelationScore::new(fraction(samples, inside)))
}

pub fn score_middle_of(target: &ObjectInstance, anchor: &ObjectInstance) -> RelationScore {
    let d = (xy(&target.centroid()) - xy(&anchor.centroid())).norm();
    RelationScore::new(gaussian(d, MIDDLE_OF_SIGMA))
}

fn wrap_angle(a: f64) -> f64 {
    let r = (a + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Surround score of 2D target positions around an anchor. Angle deviations are taken
/// against the uniform layout rotated to best fit the targets.
pub fn surround_from_points(
    anchor: Point2<f64>,
    targets: &[Point2<f64>],
) -> Result<SurroundEvaluation, RelationError> {
    let n = targets.len();
    if n < 2 {
        return Err(RelationError::TooFewTargets(n));
    }
    let ideal = TAU / n as f64;
    let rel: Vec<Vector2<f64>> = targets.iter().map(|t| t - anchor).collect();
    let radii: Vec<f64> = rel.iter().map(|v| v.norm()).collect();
    let mean = radii.iter().sum::<f64>() / n as f64;
    let distance_deviations: Vec<f64> = radii
        .iter()
        .map(|r| {
            if mean > 1e-12 {
                ((r - mean).abs() / mean).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let angles: Vec<f64> = rel.iter().map(|v| v.y.atan2(v.x)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| angles[a].total_cmp(&angles[b]).then(a.cmp(&b)));
    // Slot k of the ideal ring sits at phase + k·A; the best phase is one of the
    // offsets that aligns a target exactly.
    let offsets: Vec<f64> = order
        .iter()
        .enumerate()
        .map(|(k, &i)| angles[i] - k as f64 * ideal)
        .collect();
    // Even counts leave a flat optimum between two candidates; ties go to the phase
    // with the higher angular term so the result does not depend on input order.
    let candidates: Vec<(f64, f64, Vec<f64>)> = offsets
        .iter()
        .map(|&phase| {
            let devs: Vec<f64> = offsets.iter().map(|o| wrap_angle(o - phase).abs()).collect();
            let total: f64 = devs.iter().sum();
            let fit: f64 = devs.iter().map(|d| (1.0 - (d / ideal).min(1.0)).powi(2)).sum();
            (total, fit, devs)
        })
        .collect();
    let min_total = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let sorted_devs = candidates
        .into_iter()
        .filter(|c| c.0 <= min_total + 1e-9)
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least two targets")
        .2;
    let mut angle_deviations = vec![0.0; n];
    for (k, &i) in order.iter().enumerate() {
        angle_deviations[i] = (sorted_devs[k] / ideal).clamp(0.0, 1.0);
    }
    let s = (0..n)
        .map(|i| (1.0 - distance_deviations[i]).powi(2) + (1.0 - angle_deviations[i]).powi(2))
        .sum::<f64>()
        / (2.0 * n as f64);
    Ok(SurroundEvaluation {
        n,
        ideal_angle: ideal,
        mean_distance: mean,
        distance_deviations,
        angle_deviations,
        s,
    })
}

pub fn score_surround(
    anchor: &ObjectInstance,
    targets: &[&ObjectInstance],
) -> Result<(RelationScore, SurroundEvaluation), RelationError> {
    let pts: Vec<Point2<f64>> = targets.iter().map(|t| xy(&t.centroid())).collect();
    let eval = surround_from_points(xy(&anchor.centroid()), &pts)?;
    Ok((RelationScore::new(eval.s), eval))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoomRelationKind {
    Inside,
    Middle,
    Corner,
}

/// Middle-of-room sigma for object size `o` and room size `r`, and whether it was clamped.
pub fn middle_room_sigma(o: f64, r: f64) -> (f64, bool) {
    let sigma = o / 2.0 + (1.0 - o / r);
    if sigma < MIDDLE_ROOM_MIN_SIGMA {
        (MIDDLE_ROOM_MIN_SIGMA, true)
    } else {
        (sigma, false)
    }
}

pub fn score_room_relation(
    target: &ObjectInstance,
    samples: &[Point3<f64>],
    room: &RoomRegion,
    kind: RoomRelationKind,
    scene: &SceneInstance,
) -> Result<RelationScore, RelationError> {
    match kind {
        RoomRelationKind::Inside => {
            let floors: Vec<&ArchElement> = scene.room_floors(room).collect();
            let down = -Vector3::z();
            Ok(RelationScore::new(fraction(samples, |p| {
                floors
                    .iter()
                    .any(|f| f.geometry().raycast(p, &down, 0.0, f64::INFINITY).is_some())
            })))
        }
        RoomRelationKind::Middle => {
            let d = (xy(&target.centroid()) - room.centroid_2d).norm();
            let (sigma, clamped) = middle_room_sigma(target.footprint.longer_side_o, room.mean_dimension_r);
            if clamped {
                log::warn!("middle-of-room sigma clamped for '{}' in room '{}'", target.id, room.id);
            }
            Ok(RelationScore::new(gaussian(d, sigma)))
        }
        RoomRelationKind::Corner => {
            let walls: Vec<&ArchElement> = scene.room_walls(room).collect();
            if walls.len() < 2 {
                return Err(RelationError::MissingWalls(room.id.clone()));
            }
            let dists: Vec<f64> = walls
                .iter()
                .map(|w| closest_surface_distance(target.world_mesh(), w.geometry()))
                .collect();
            let mut best = 0.0f64;
            for i in 0..walls.len() {
                for j in i + 1..walls.len() {
                    let (Some(a), Some(b)) = (walls[i].front_normal, walls[j].front_normal) else {
                        continue;
                    };
                    if a.dot(&b).abs() > PERPENDICULAR_DOT_TOL {
                        continue;
                    }
                    let s = score_distance_band(dists[i], CORNER_WALL).value
                        * score_distance_band(dists[j], CORNER_WALL).value;
                    best = best.max(s);
                }
            }
            Ok(RelationScore::new(best))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WallRelationKind {
    OnWall,
    AgainstWall,
    HangCeiling,
}

/// Wall relations: share of samples in front of the wall times the distance band
/// score. Ceiling hanging: distance band score only.
pub fn score_wall_relation(
    target: &ObjectInstance,
    samples: &[Point3<f64>],
    element: &ArchElement,
    kind: WallRelationKind,
) -> Result<RelationScore, RelationError> {
    let mismatch = || RelationError::KindMismatch {
        relation: format!("{kind:?}"),
        target: element.kind.to_string(),
    };
    let d = closest_surface_distance(target.world_mesh(), element.geometry());
    match kind {
        WallRelationKind::HangCeiling => {
            if element.kind != ArchKind::Ceiling {
                return Err(mismatch());
            }
            Ok(score_distance_band(d, HANG_CEILING))
        }
        WallRelationKind::OnWall | WallRelationKind::AgainstWall => {
            if element.kind != ArchKind::Wall {
                return Err(mismatch());
            }
            let n = element.front_normal.ok_or_else(mismatch)?;
            let origin = element.geometry().triangles()[0].a;
            let s_f = fraction(samples, |p| (p - origin).dot(&n) >= 0.0);
            let band = if kind == WallRelationKind::OnWall {
                ON_WALL
            } else {
                AGAINST_WALL
            };
            Ok(RelationScore::new(s_f * score_distance_band(d, band).value))
        }
    }
}

/// Counts tuples whose scores are all positive and applies the quantifier. No
/// candidate tuples at all fails the spec.
pub fn count_satisfied(quantifier: Quantifier, quantity: u32, tuples: &[Vec<RelationScore>]) -> (u32, bool) {
    let n = tuples
        .iter()
        .filter(|scores| !scores.is_empty() && scores.iter().all(|s| s.positive))
        .count() as u32;
    if tuples.is_empty() {
        return (0, false);
    }
    (n, check_quantifier(quantifier, quantity, n))
}

/// Pairwise object–object relation (all but surround).
pub fn score_oo(
    relation: OORelation,
    side: Option<Side>,
    target: &ObjectInstance,
    anchor: &ObjectInstance,
    ctx: &SampleContext,
) -> Result<RelationScore, RelationError> {
    let need_side = |mode: SideMode| -> Result<SideSpec, RelationError> {
        let side = side.ok_or_else(|| RelationError::InvalidSide {
            relation: relation.name().into(),
            side: "none".into(),
        })?;
        SideSpec::new(side, mode)
    };
    match relation {
        OORelation::Inside | OORelation::Outside => {
            let mode = if relation == OORelation::Inside {
                ContainmentMode::Inside
            } else {
                ContainmentMode::Outside
            };
            Ok(score_containment(&box_samples(target, ctx), &anchor.obb, mode))
        }
        OORelation::Face => score_face(target, anchor, &box_samples(target, ctx)),
        OORelation::SideOf => score_side_family(&box_samples(target, ctx), anchor, need_side(SideMode::SideOf)?),
        OORelation::SideRegion => {
            score_side_family(&box_samples(target, ctx), anchor, need_side(SideMode::SideRegion)?)
        }
        OORelation::LongShortSide => {
            score_side_family(&box_samples(target, ctx), anchor, need_side(SideMode::LongShort)?)
        }
        OORelation::OnTop => score_side_family(
            &box_samples(target, ctx),
            anchor,
            SideSpec::new(Side::Top, SideMode::OnTop)?,
        ),
        OORelation::Middle => Ok(score_middle_of(target, anchor)),
        OORelation::Surround => score_surround(anchor, &[target]).map(|(s, _)| s),
        OORelation::NextTo | OORelation::Near | OORelation::Across | OORelation::Far => {
            let d = closest_surface_distance(target.world_mesh(), anchor.world_mesh());
            Ok(score_distance_band(d, relation.band().expect("distance relation")))
        }
    }
}

/// Architectural reference of an object–architecture relation.
#[derive(Clone, Copy, Debug)]
pub enum ArchTarget<'a> {
    Element(&'a ArchElement),
    Room(&'a RoomRegion),
}

impl ArchTarget<'_> {
    pub fn id(&self) -> &str {
        match self {
            ArchTarget::Element(e) => &e.id,
            ArchTarget::Room(r) => &r.id,
        }
    }
}

/// Object–architecture relation. Distance relations against a room use its walls,
/// or its floors when it has none.
pub fn score_oa(
    relation: OARelation,
    target: &ObjectInstance,
    arch: ArchTarget<'_>,
    scene: &SceneInstance,
    ctx: &SampleContext,
) -> Result<RelationScore, RelationError> {
    let mismatch = |what: &str| RelationError::KindMismatch {
        relation: relation.name().into(),
        target: what.into(),
    };
    match relation {
        OARelation::NextTo | OARelation::Near | OARelation::Across | OARelation::Far => {
            let band = relation.band().expect("distance relation");
            let d = match arch {
                ArchTarget::Element(e) => closest_surface_distance(target.world_mesh(), e.geometry()),
                ArchTarget::Room(r) => {
                    let walls: Vec<&ArchElement> = scene.room_walls(r).collect();
                    let elems: Vec<&ArchElement> = if walls.is_empty() {
                        scene.room_floors(r).collect()
                    } else {
                        walls
                    };
                    elems
                        .iter()
                        .map(|e| closest_surface_distance(target.world_mesh(), e.geometry()))
                        .fold(f64::INFINITY, f64::min)
                }
            };
            Ok(score_distance_band(d, band))
        }
        OARelation::InsideRoom | OARelation::MiddleRoom | OARelation::CornerRoom => {
            let ArchTarget::Room(room) = arch else {
                return Err(mismatch("element"));
            };
            let kind = match relation {
                OARelation::InsideRoom => RoomRelationKind::Inside,
                OARelation::MiddleRoom => RoomRelationKind::Middle,
                _ => RoomRelationKind::Corner,
            };
            score_room_relation(target, &box_samples(target, ctx), room, kind, scene)
        }
        OARelation::OnWall | OARelation::AgainstWall | OARelation::HangCeiling => {
            let ArchTarget::Element(e) = arch else {
                return Err(mismatch("room"));
            };
            let kind = match relation {
                OARelation::OnWall => WallRelationKind::OnWall,
                OARelation::AgainstWall => WallRelationKind::AgainstWall,
                _ => WallRelationKind::HangCeiling,
            };
            score_wall_relation(target, &box_samples(target, ctx), e, kind)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{RigidTransform, TriMesh};
    use crate::relations::{NEXT_TO, FAR};
    use crate::scene::DEFAULT_FRONT_AXIS;
    use proptest::prelude::*;

    fn boxed(id: &str, half: [f64; 3], center: [f64; 3], yaw: f64) -> ObjectInstance {
        let mesh = TriMesh::cuboid(Vector3::from(half));
        let t = RigidTransform::from_yaw(yaw, Vector3::from(center));
        ObjectInstance::new(id, id, mesh, t, Some(DEFAULT_FRONT_AXIS)).unwrap()
    }

    #[test]
    fn band_values() {
        assert_eq!(score_distance_band(0.3, NEXT_TO).value, 1.0);
        assert!((score_distance_band(0.75, NEXT_TO).value - (-0.5f64).exp()).abs() < 1e-12);
        assert_eq!(score_distance_band(5.0, FAR).value, 1.0);
        assert!((score_distance_band(3.75, FAR).value - (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn containment_half_straddle() {
        let ctx = SampleContext::default();
        let big = boxed("big", [1.0, 1.0, 1.0], [0.0, 0.0, 0.0], 0.0);
        let small = boxed("small", [0.2, 0.2, 0.2], [0.0, 0.0, 0.0], 0.0);
        let straddle = boxed("s", [0.5, 0.5, 0.5], [1.0, 0.0, 0.0], 0.0);
        let far = boxed("f", [0.5, 0.5, 0.5], [5.0, 0.0, 0.0], 0.0);
        let inside = |t: &ObjectInstance| score_containment(&box_samples(t, &ctx), &big.obb, ContainmentMode::Inside);
        assert_eq!(inside(&small).value, 1.0);
        assert_eq!(inside(&far).value, 0.0);
        assert!((inside(&straddle).value - 0.5).abs() <= 0.05);
    }

    #[test]
    fn face_direct_and_away() {
        let ctx = SampleContext::default();
        let tv = boxed("tv", [0.6, 0.1, 0.4], [0.0, 3.0, 0.4], 0.0);
        let sofa = boxed("sofa", [1.0, 0.4, 0.4], [0.0, 0.0, 0.4], 0.0);
        let s = score_face(&sofa, &tv, &box_samples(&sofa, &ctx)).unwrap();
        assert!(s.value > 0.99, "{s:?}");
        let turned = boxed("sofa", [1.0, 0.4, 0.4], [0.0, 0.0, 0.4], PI);
        assert_eq!(score_face(&turned, &tv, &box_samples(&turned, &ctx)).unwrap().value, 0.0);
        assert_eq!(face_falloff(0.0), 1.0);
        assert_eq!(face_falloff(30.0), 0.0);
        assert_eq!(face_falloff(45.0), 0.0);
        assert!((face_falloff(15.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn nightstand_left_of_bed() {
        let ctx = SampleContext::default();
        // Bed faces +Y; its own left is −X.
        let bed = boxed("bed", [0.8, 1.0, 0.3], [0.0, 0.0, 0.3], 0.0);
        let ns = boxed("ns", [0.25, 0.25, 0.3], [-1.1, 0.5, 0.3], 0.0);
        let left = SideSpec::new(Side::Left, SideMode::SideOf).unwrap();
        let right = SideSpec::new(Side::Right, SideMode::SideOf).unwrap();
        let samples = box_samples(&ns, &ctx);
        assert_eq!(score_side_family(&samples, &bed, left).unwrap().value, 1.0);
        assert_eq!(score_side_family(&samples, &bed, right).unwrap().value, 0.0);
        // Rotating the whole pair keeps the relation.
        let t = RigidTransform::from_yaw(1.1, Vector3::new(2.0, 1.0, 0.0));
        let (bed2, ns2) = (bed.transformed(&t), ns.transformed(&t));
        assert_eq!(score_side_family(&box_samples(&ns2, &ctx), &bed2, left).unwrap().value, 1.0);
    }

    #[test]
    fn book_on_table_top() {
        let ctx = SampleContext::default();
        let table = boxed("table", [0.6, 0.4, 0.375], [0.0, 0.0, 0.375], 0.3);
        let book = boxed("book", [0.1, 0.15, 0.02], [0.0, 0.0, 0.77], 0.3);
        let spec = SideSpec::new(Side::Top, SideMode::OnTop).unwrap();
        assert_eq!(score_side_family(&box_samples(&book, &ctx), &table, spec).unwrap().value, 1.0);
    }

    #[test]
    fn long_and_short_sides() {
        let ctx = SampleContext::default();
        let table = boxed("table", [1.0, 0.5, 0.375], [0.0, 0.0, 0.375], 0.0);
        let at_long = boxed("chair", [0.2, 0.2, 0.4], [0.0, -0.8, 0.4], 0.0);
        let at_short = boxed("chair", [0.2, 0.2, 0.4], [1.3, 0.0, 0.4], 0.0);
        let long = SideSpec::new(Side::Long, SideMode::LongShort).unwrap();
        assert!(score_side_family(&box_samples(&at_long, &ctx), &table, long).unwrap().positive);
        assert!(!score_side_family(&box_samples(&at_short, &ctx), &table, long).unwrap().positive);
        assert!(SideSpec::new(Side::Left, SideMode::LongShort).is_err());
    }

    #[test]
    fn frontless_anchor_has_no_lateral_sides() {
        let mesh = TriMesh::cuboid(Vector3::repeat(0.5));
        let a = ObjectInstance::new("a", "", mesh, RigidTransform::identity(), None).unwrap();
        let spec = SideSpec::new(Side::Left, SideMode::SideOf).unwrap();
        assert!(matches!(score_side_family(&[], &a, spec), Err(RelationError::NoFrontVector(_))));
        let top = SideSpec::new(Side::Top, SideMode::SideOf).unwrap();
        assert!(score_side_family(&[], &a, top).is_ok());
    }

    #[test]
    fn middle_of_values() {
        let a = boxed("a", [1.0, 1.0, 0.3], [0.0, 0.0, 0.3], 0.0);
        let at = |d: f64| score_middle_of(&boxed("t", [0.1, 0.1, 0.1], [d, 0.0, 0.7], 0.0), &a).value;
        assert!((at(0.0) - 1.0).abs() < 1e-15);
        assert!((at(0.25) - (-0.5f64).exp()).abs() < 1e-12);
        assert!((at(1.0) - (-8.0f64).exp()).abs() < 1e-15);
    }

    fn ring(n: usize, r: f64, phase: f64) -> Vec<Point2<f64>> {
        (0..n)
            .map(|k| {
                let a = phase + TAU * k as f64 / n as f64;
                Point2::new(r * a.cos(), r * a.sin())
            })
            .collect()
    }

    #[test]
    fn surround_rings_and_collapse() {
        for n in [3, 4, 6] {
            let e = surround_from_points(Point2::origin(), &ring(n, 1.3, 0.4)).unwrap();
            assert!((e.s - 1.0).abs() < 1e-9, "n={n}: {}", e.s);
        }
        let collapsed: Vec<Point2<f64>> = [1.0, 2.0, 3.0, 4.0].iter().map(|&r| Point2::new(r, 0.0)).collect();
        let e = surround_from_points(Point2::origin(), &collapsed).unwrap();
        assert!((e.s - 0.325).abs() < 1e-12, "{}", e.s);
        assert!(surround_from_points(Point2::origin(), &[Point2::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn counting() {
        let pos = RelationScore::new(0.9);
        let neg = RelationScore::new(0.1);
        assert_eq!(count_satisfied(Quantifier::Eq, 1, &[vec![pos], vec![neg]]), (1, true));
        assert_eq!(count_satisfied(Quantifier::Eq, 1, &[vec![pos], vec![pos]]), (2, false));
        assert_eq!(count_satisfied(Quantifier::Ge, 2, &[]), (0, false));
        assert_eq!(count_satisfied(Quantifier::Eq, 1, &[vec![pos, neg]]), (0, false));
    }

    proptest! {
        #[test]
        fn surround_is_motion_invariant(
            pts in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..7),
            yaw in -PI..PI, tx in -10.0f64..10.0, ty in -10.0f64..10.0,
        ) {
            let pts: Vec<Point2<f64>> = pts.into_iter().map(|(x, y)| Point2::new(x, y)).collect();
            prop_assume!(pts.iter().all(|p| p.coords.norm() > 1e-3));
            let before = surround_from_points(Point2::origin(), &pts).unwrap().s;
            let rot = nalgebra::Rotation2::new(yaw);
            let shift = Vector2::new(tx, ty);
            let moved: Vec<Point2<f64>> = pts.iter().map(|p| rot * p + shift).collect();
            let after = surround_from_points(Point2::from(shift), &moved).unwrap().s;
            prop_assert!((before - after).abs() <= 1e-9, "{} vs {}", before, after);
            prop_assert!((0.0..=1.0).contains(&before));
        }

        #[test]
        fn band_is_monotone_outside(d1 in 0.0f64..10.0, d2 in 0.0f64..10.0) {
            let (a, b) = (d1.min(d2), d1.max(d2));
            // Above the band, farther is never better.
            if a >= NEXT_TO.hi {
                prop_assert!(score_distance_band(b, NEXT_TO).value <= score_distance_band(a, NEXT_TO).value);
            }
            let s = score_distance_band(d1, NEXT_TO);
            prop_assert!(s.positive == (s.value >= 0.5));
        }

        #[test]
        fn left_right_mirror(x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let ctx = SampleContext { count: 200, seed: 7 };
            let anchor = boxed("a", [0.8, 0.5, 0.4], [0.0, 0.0, 0.4], 0.0);
            let t = boxed("t", [0.2, 0.2, 0.2], [x, y, 0.4], 0.0);
            let samples = box_samples(&t, &ctx);
            let mirrored: Vec<Point3<f64>> = samples.iter().map(|p| Point3::new(-p.x, p.y, p.z)).collect();
            for side in [Side::Left, Side::Right] {
                let a = score_side_family(&samples, &anchor, SideSpec::new(side, SideMode::SideOf).unwrap()).unwrap();
                let b = score_side_family(&mirrored, &anchor, SideSpec::new(side.mirrored(), SideMode::SideOf).unwrap()).unwrap();
                prop_assert_eq!(a.value, b.value);
            }
        }
    }
}
