use nalgebra::{Point2, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::{MetricError, MetricsConfig};
use crate::geometry::{
    derive_seed, flood_components, mesh_pair_intersects, raycast_within, sample_points_surface, support_hull_check,
    OccupancyMask, WorldMesh,
};
use crate::judge::{Judge, JudgeRequest, JudgeResponse, SupportType};
use crate::relations::{side_axis, Side};
use crate::scene::{ObjectInstance, SceneInstance, SceneOccupancy};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    /// Percent of objects in at least one collision.
    pub col_ob: f64,
    /// Whether any pair collides.
    pub col_sc: bool,
    pub objects_in_collision: Vec<String>,
    pub colliding_pairs: Vec<(String, String)>,
}

pub fn eval_collision(scene: &SceneInstance) -> CollisionReport {
    let objs = &scene.objects;
    let boxes: Vec<_> = objs.iter().map(|o| o.world_mesh().aabb()).collect();
    let mut hit = vec![false; objs.len()];
    let mut pairs = Vec::new();
    for i in 0..objs.len() {
        for j in i + 1..objs.len() {
            if !boxes[i].overlaps(&boxes[j], 1e-9) {
                continue;
            }
            if mesh_pair_intersects(objs[i].world_mesh(), objs[j].world_mesh()) {
                hit[i] = true;
                hit[j] = true;
                pairs.push((objs[i].id.clone(), objs[j].id.clone()));
            }
        }
    }
    let n = hit.iter().filter(|&&h| h).count();
    CollisionReport {
        col_ob: if objs.is_empty() {
            0.0
        } else {
            100.0 * n as f64 / objs.len() as f64
        },
        col_sc: !pairs.is_empty(),
        objects_in_collision: objs.iter().zip(&hit).filter(|(_, &h)| h).map(|(o, _)| o.id.clone()).collect(),
        colliding_pairs: pairs,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportVerdict {
    pub id: String,
    pub support_type: SupportType,
    pub contacts: usize,
    pub supported: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    /// Percent of objects supported; `None` without objects.
    pub sup: Option<f64>,
    pub objects: Vec<SupportVerdict>,
}

/// Lattice subdivisions per support-facing triangle edge, at most.
const SUPPORT_LATTICE: usize = 16;
const SUPPORT_LATTICE_STEP: f64 = 0.02;
const SUPPORT_BISECTIONS: usize = 30;

/// Points of `mesh` facing `dir` that have other geometry within `tol` along `dir`.
/// Rays start from every vertex within `tol` of the extreme along `dir` and from a
/// lattice on the triangles that face `dir` there; contact boundaries between lattice
/// points are located by bisection.
pub fn support_contacts(mesh: &WorldMesh, others: &[(&str, &WorldMesh)], dir: &Vector3<f64>, tol: f64) -> Vec<Point3<f64>> {
    let d = dir.normalize();
    let Some(extreme) = mesh.vertices().map(|v| v.coords.dot(&d)).reduce(f64::max) else {
        return Vec::new();
    };
    let reach = mesh.aabb();
    let near: Vec<(&str, &WorldMesh)> = others
        .iter()
        .filter(|(_, m)| m.aabb().overlaps(&reach, 2.0 * tol))
        .copied()
        .collect();
    let touches = |p: &Point3<f64>| raycast_within(&(p - d * tol), &d, 2.0 * tol, near.iter().copied()).is_some();
    let mut out = Vec::new();
    if near.is_empty() {
        return out;
    }
    for v in mesh.vertices() {
        if v.coords.dot(&d) >= extreme - tol && touches(&v) {
            out.push(v);
        }
    }
    for tri in mesh.triangles() {
        let n = tri.normal();
        if n.dot(&d).abs() < 0.5 || tri.vertices().iter().any(|v| v.coords.dot(&d) < extreme - tol) {
            continue;
        }
        let longest = [(tri.b - tri.a).norm(), (tri.c - tri.b).norm(), (tri.a - tri.c).norm()]
            .into_iter()
            .fold(0.0, f64::max);
        let k = ((longest / SUPPORT_LATTICE_STEP).ceil() as usize).clamp(1, SUPPORT_LATTICE);
        let at = |i: usize, j: usize| {
            let (u, w) = (i as f64 / k as f64, j as f64 / k as f64);
            tri.a + (tri.b - tri.a) * u + (tri.c - tri.a) * w
        };
        let mut status = vec![vec![false; k + 1]; k + 1];
        for i in 0..=k {
            for j in 0..=k - i {
                let p = at(i, j);
                status[i][j] = touches(&p);
                if status[i][j] {
                    out.push(p);
                }
            }
        }
        let mut refine = |p: Point3<f64>, q: Point3<f64>| {
            // p touches, q does not
            let (mut lo, mut hi) = (p, q);
            for _ in 0..SUPPORT_BISECTIONS {
                let mid = Point3::from((lo.coords + hi.coords) * 0.5);
                if touches(&mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(lo);
        };
        for i in 0..=k {
            for j in 0..=k - i {
                let mut neighbors = Vec::new();
                if i + j < k {
                    neighbors.push((i + 1, j));
                    neighbors.push((i, j + 1));
                }
                if i > 0 && j < k {
                    neighbors.push((i - 1, j + 1));
                }
                for (a, b) in neighbors {
                    match (status[i][j], status[a][b]) {
                        (true, false) => refine(at(i, j), at(a, b)),
                        (false, true) => refine(at(a, b), at(i, j)),
                        _ => {}
                    }
                }
            }
        }
    }
    out
}

fn support_directions(obj: &ObjectInstance, kind: SupportType) -> Vec<Vector3<f64>> {
    match kind {
        SupportType::Ground | SupportType::Object => vec![-Vector3::z()],
        SupportType::Ceiling => vec![Vector3::z()],
        SupportType::Wall => match crate::scene::world_front_vector(obj) {
            Ok(f) => vec![-f],
            Err(_) => {
                let up = obj.obb.vertical_axis();
                (0..3)
                    .filter(|&i| i != up)
                    .flat_map(|i| [obj.obb.axis(i), -obj.obb.axis(i)])
                    .collect()
            }
        },
    }
}

/// Whether the object at `index` is held up as `kind` says, with the number of contacts.
pub fn check_support(scene: &SceneInstance, index: usize, kind: SupportType, tol: f64) -> (bool, usize) {
    let obj = &scene.objects[index];
    let others: Vec<(&str, &WorldMesh)> = scene
        .objects
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != index)
        .map(|(_, o)| (o.id.as_str(), o.world_mesh()))
        .chain(scene.architecture.iter().map(|a| (a.id.as_str(), a.geometry())))
        .collect();
    let mut contacts = Vec::new();
    for d in support_directions(obj, kind) {
        contacts.extend(support_contacts(obj.world_mesh(), &others, &d, tol));
    }
    let supported = match kind {
        SupportType::Wall | SupportType::Ceiling => !contacts.is_empty(),
        SupportType::Ground | SupportType::Object => {
            let pts: Vec<Point2<f64>> = contacts.iter().map(|p| Point2::new(p.x, p.y)).collect();
            let c = obj.centroid();
            support_hull_check(&pts, &Point2::new(c.x, c.y))
        }
    };
    (supported, contacts.len())
}

pub fn support_type_of(obj: &ObjectInstance, judge: &dyn Judge) -> Result<SupportType, MetricError> {
    match judge
        .judge(&JudgeRequest::support_type(obj))
        .map_err(|e| MetricError::judge(format!("support type of '{}'", obj.id), e))?
    {
        JudgeResponse::Support { support_type, .. } => Ok(support_type),
        other => Err(MetricError::unexpected("support_type", &other)),
    }
}

pub fn eval_support(scene: &SceneInstance, judge: &dyn Judge, config: &MetricsConfig) -> Result<SupportReport, MetricError> {
    let mut objects = Vec::new();
    for (i, obj) in scene.objects.iter().enumerate() {
        let kind = support_type_of(obj, judge)?;
        let (supported, contacts) = check_support(scene, i, kind, config.support_tolerance);
        objects.push(SupportVerdict {
            id: obj.id.clone(),
            support_type: kind,
            contacts,
            supported,
        });
    }
    let n = objects.iter().filter(|v| v.supported).count();
    Ok(SupportReport {
        sup: (!objects.is_empty()).then(|| 100.0 * n as f64 / objects.len() as f64),
        objects,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NavReport {
    /// Largest free component over all free cells, in [0, 1].
    pub nav: f64,
    pub free_cells: usize,
    pub largest_component: usize,
    pub components: usize,
    /// Set when the floor has no free cell and `nav` is 0 by convention.
    pub no_free_space: bool,
}

pub fn navigability_of(mask: &OccupancyMask) -> NavReport {
    let comps = flood_components(mask);
    let free: usize = comps.iter().sum();
    let largest = comps.first().copied().unwrap_or(0);
    NavReport {
        nav: if free == 0 { 0.0 } else { largest as f64 / free as f64 },
        free_cells: free,
        largest_component: largest,
        components: comps.len(),
        no_free_space: free == 0,
    }
}

pub fn eval_navigability(occupancy: &SceneOccupancy) -> NavReport {
    navigability_of(&occupancy.mask())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideAccess {
    pub side: Side,
    pub band_cells: usize,
    pub free_cells: usize,
    /// `None` when the band covers no grid cell.
    pub score: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectAccess {
    pub id: String,
    pub sides: Vec<SideAccess>,
    /// Best side score; `None` without functional sides.
    pub best: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessReport {
    pub objects: Vec<ObjectAccess>,
    /// Mean of the object scores that exist.
    pub mean: Option<f64>,
}

/// Box axis and sign for a lateral side. Objects without a front vector use their
/// first horizontal box axis as front.
fn lateral_axis(obj: &ObjectInstance, side: Side) -> (usize, f64) {
    if let Ok(a) = side_axis(obj, side) {
        return a;
    }
    let up = obj.obb.vertical_axis();
    let horiz: Vec<usize> = (0..3).filter(|&i| i != up).collect();
    let up_sign = obj.obb.axis(up).z.signum();
    let right = obj.obb.axis(horiz[0]).cross(&(obj.obb.axis(up) * up_sign));
    let rs = obj.obb.axis(horiz[1]).dot(&right).signum();
    match side {
        Side::Back => (horiz[0], -1.0),
        Side::Right => (horiz[1], rs),
        Side::Left => (horiz[1], -rs),
        _ => (horiz[0], 1.0),
    }
}

/// Grid cells whose centers lie in the `depth`-deep strip outside one side of the
/// object's box footprint.
pub fn side_band_cells(occupancy: &SceneOccupancy, obj: &ObjectInstance, side: Side, depth: f64) -> Vec<usize> {
    let (k, s) = lateral_axis(obj, side);
    let up = obj.obb.vertical_axis();
    let j = (0..3).find(|&i| i != up && i != k).expect("three axes");
    let out_dir = obj.obb.axis(k) * s;
    let along = obj.obb.axis(j);
    let c = obj.obb.center;
    let hk = obj.obb.half_extents[k];
    let hj = obj.obb.half_extents[j];
    let corner = |o: f64, a: f64| {
        let p = c + out_dir * o + along * a;
        occupancy.frame.to_frame(&Point2::new(p.x, p.y))
    };
    let poly = [corner(hk, -hj), corner(hk + depth, -hj), corner(hk + depth, hj), corner(hk, hj)];
    occupancy.frame.cells_with_center_in(&poly)
}

pub fn functional_sides_of(obj: &ObjectInstance, judge: &dyn Judge) -> Result<Vec<Side>, MetricError> {
    match judge
        .judge(&JudgeRequest::functional_sides(obj))
        .map_err(|e| MetricError::judge(format!("functional sides of '{}'", obj.id), e))?
    {
        JudgeResponse::Sides(s) => Ok(s.sides),
        other => Err(MetricError::unexpected("functional_sides", &other)),
    }
}

/// Accessibility of one object's sides against the scene without that object.
pub fn access_of(occupancy: &SceneOccupancy, scene: &SceneInstance, index: usize, sides: &[Side], depth: f64) -> ObjectAccess {
    let obj = &scene.objects[index];
    let mask = occupancy.mask_excluding(Some(index));
    let sides: Vec<SideAccess> = sides
        .iter()
        .map(|&side| {
            let cells = side_band_cells(occupancy, obj, side, depth);
            let free = cells.iter().filter(|&&c| !mask.grid[c]).count();
            SideAccess {
                side,
                band_cells: cells.len(),
                free_cells: free,
                score: (!cells.is_empty()).then(|| free as f64 / cells.len() as f64),
            }
        })
        .collect();
    let best = sides.iter().filter_map(|s| s.score).reduce(f64::max);
    ObjectAccess {
        id: obj.id.clone(),
        sides,
        best,
    }
}

pub fn eval_accessibility(
    scene: &SceneInstance,
    occupancy: &SceneOccupancy,
    judge: &dyn Judge,
    config: &MetricsConfig,
) -> Result<AccessReport, MetricError> {
    let mut objects = Vec::new();
    for (i, obj) in scene.objects.iter().enumerate() {
        let sides = functional_sides_of(obj, judge)?;
        objects.push(access_of(occupancy, scene, i, &sides, config.accessibility_depth));
    }
    let scores: Vec<f64> = objects.iter().filter_map(|o| o.best).collect();
    let mean = (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64);
    Ok(AccessReport { objects, mean })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OobObject {
    pub id: String,
    pub hit_fraction: f64,
    pub out_of_bounds: bool,
    /// Left out of the metric by the wall/ceiling exemption.
    pub exempt: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OobReport {
    /// Percent of tested objects out of bounds; `None` when none were tested.
    pub oob: Option<f64>,
    pub objects: Vec<OobObject>,
}

/// Lift applied to ray origins so points lying on the floor still hit it (m).
const OOB_RAY_LIFT: f64 = 1e-4;

/// Number of points whose downward ray meets a floor.
pub fn floor_hits(points: &[Point3<f64>], floors: &[(&str, &WorldMesh)]) -> usize {
    let down = -Vector3::z();
    points
        .iter()
        .filter(|p| {
            let o = *p + Vector3::z() * OOB_RAY_LIFT;
            raycast_within(&o, &down, f64::INFINITY, floors.iter().copied()).is_some()
        })
        .count()
}

/// Out of bounds when fewer than 99% of the points hit the floor.
pub fn is_out_of_bounds(hits: usize, total: usize) -> bool {
    hits * 100 < 99 * total
}

pub fn eval_oob(scene: &SceneInstance, config: &MetricsConfig, support: Option<&SupportReport>) -> OobReport {
    let floors: Vec<(&str, &WorldMesh)> = scene.floors().map(|f| (f.id.as_str(), f.geometry())).collect();
    let objects: Vec<OobObject> = scene
        .objects
        .iter()
        .map(|obj| {
            let pts = sample_points_surface(
                &obj.mesh,
                &obj.transform,
                config.oob_samples,
                derive_seed(config.seed, &format!("oob:{}", obj.id)),
            )
            .points;
            let hits = floor_hits(&pts, &floors);
            let exempt = config.oob_exempt_wall_ceiling
                && support
                    .and_then(|s| s.objects.iter().find(|v| v.id == obj.id))
                    .is_some_and(|v| matches!(v.support_type, SupportType::Wall | SupportType::Ceiling));
            OobObject {
                id: obj.id.clone(),
                hit_fraction: if pts.is_empty() { 0.0 } else { hits as f64 / pts.len() as f64 },
                out_of_bounds: is_out_of_bounds(hits, pts.len()),
                exempt,
            }
        })
        .collect();
    let tested: Vec<&OobObject> = objects.iter().filter(|o| !o.exempt).collect();
    let n = tested.iter().filter(|o| o.out_of_bounds).count();
    OobReport {
        oob: (!tested.is_empty()).then(|| 100.0 * n as f64 / tested.len() as f64),
        objects,
    }
}
