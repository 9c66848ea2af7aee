use std::ops::ControlFlow;

use nalgebra::{Point2, Point3, Vector3};

use super::{Triangle, WorldMesh};

/// Plane-distance snapping tolerance for triangle/triangle tests (m).
const PLANE_EPS: f64 = 1e-10;
/// Offset of the interior probes placed around a contact (m). Penetrations thinner
/// than this are reported as touching.
const PROBE_OFFSET: f64 = 1e-7;
/// Minimum overlap area for coplanar triangles to count as overlapping (m²).
const COPLANAR_AREA_EPS: f64 = 1e-14;

/// How two triangles meet.
#[derive(Clone, Debug, PartialEq)]
pub enum TriangleContact {
    Disjoint,
    /// Non-coplanar triangles meeting along a segment (possibly a single point).
    Crossing { p0: Point3<f64>, p1: Point3<f64> },
    /// Coplanar triangles overlapping with positive area.
    CoplanarOverlap { centroid: Point3<f64> },
    /// Coplanar triangles sharing only an edge or a vertex.
    CoplanarTouch,
}

impl TriangleContact {
    pub fn is_contact(&self) -> bool {
        !matches!(self, TriangleContact::Disjoint)
    }
}

pub fn triangle_contact(ta: &Triangle, tb: &Triangle) -> TriangleContact {
    let na = ta.normal();
    let nb = tb.normal();
    let snap = |d: f64| if d.abs() <= PLANE_EPS { 0.0 } else { d };
    let db = tb.vertices().map(|v| snap((v - ta.a).dot(&na)));
    let da = ta.vertices().map(|v| snap((v - tb.a).dot(&nb)));
    if one_sided(&db) || one_sided(&da) {
        return TriangleContact::Disjoint;
    }
    let dir = na.cross(&nb);
    if db.iter().all(|&d| d == 0.0) || da.iter().all(|&d| d == 0.0) || dir.norm() < 1e-12 {
        return coplanar_contact(ta, tb, &na);
    }
    let sa = plane_section(ta, &da);
    let sb = plane_section(tb, &db);
    let (a0, a1) = extent_along(&sa, &dir);
    let (b0, b1) = extent_along(&sb, &dir);
    let lo = a0.0.max(b0.0);
    let hi = a1.0.min(b1.0);
    let tol = PLANE_EPS * dir.norm();
    if hi < lo - tol {
        return TriangleContact::Disjoint;
    }
    // Recover 3D endpoints on the section of triangle A.
    let at = |s: f64| -> Point3<f64> {
        if (a1.0 - a0.0).abs() < f64::EPSILON {
            a0.1
        } else {
            let k = ((s - a0.0) / (a1.0 - a0.0)).clamp(0.0, 1.0);
            a0.1 + (a1.1 - a0.1) * k
        }
    };
    let (lo, hi) = if hi < lo { (lo, lo) } else { (lo, hi) };
    TriangleContact::Crossing {
        p0: at(lo),
        p1: at(hi),
    }
}

fn one_sided(d: &[f64; 3]) -> bool {
    d.iter().all(|&x| x > 0.0) || d.iter().all(|&x| x < 0.0)
}

/// Points of a triangle lying on the other triangle's plane, given snapped signed distances.
fn plane_section(t: &Triangle, d: &[f64; 3]) -> Vec<Point3<f64>> {
    let v = t.vertices();
    let mut out = Vec::with_capacity(3);
    for i in 0..3 {
        if d[i] == 0.0 {
            out.push(v[i]);
        }
        let j = (i + 1) % 3;
        if d[i] * d[j] < 0.0 {
            let k = d[i] / (d[i] - d[j]);
            out.push(v[i] + (v[j] - v[i]) * k);
        }
    }
    out
}

type Param = (f64, Point3<f64>);

fn extent_along(points: &[Point3<f64>], dir: &Vector3<f64>) -> (Param, Param) {
    let mut lo = (f64::INFINITY, Point3::origin());
    let mut hi = (f64::NEG_INFINITY, Point3::origin());
    for p in points {
        let s = p.coords.dot(dir);
        if s < lo.0 {
            lo = (s, *p);
        }
        if s > hi.0 {
            hi = (s, *p);
        }
    }
    (lo, hi)
}

fn coplanar_contact(ta: &Triangle, tb: &Triangle, n: &Vector3<f64>) -> TriangleContact {
    // Drop the dominant normal axis.
    let drop = n.iamax();
    let proj = |p: &Point3<f64>| -> Point2<f64> {
        match drop {
            0 => Point2::new(p.y, p.z),
            1 => Point2::new(p.z, p.x),
            _ => Point2::new(p.x, p.y),
        }
    };
    let a2: Vec<Point2<f64>> = ta.vertices().iter().map(proj).collect();
    let b2: Vec<Point2<f64>> = tb.vertices().iter().map(proj).collect();
    let clipped = clip_convex(&a2, &b2);
    if clipped.is_empty() {
        return TriangleContact::Disjoint;
    }
    let area = polygon_area(&clipped).abs();
    if area <= COPLANAR_AREA_EPS {
        return TriangleContact::CoplanarTouch;
    }
    let c2 = clipped.iter().fold(nalgebra::Vector2::zeros(), |acc, p| acc + p.coords)
        / clipped.len() as f64;
    // Lift the 2D centroid back onto triangle A's plane.
    let c2 = Point2::from(c2);
    let centroid = lift(ta, &a2, &c2);
    TriangleContact::CoplanarOverlap { centroid }
}

/// Maps a 2D point in the projection of triangle `t` back to 3D via barycentric coordinates.
fn lift(t: &Triangle, t2: &[Point2<f64>], p: &Point2<f64>) -> Point3<f64> {
    let v0 = t2[1] - t2[0];
    let v1 = t2[2] - t2[0];
    let v2 = p - t2[0];
    let den = v0.x * v1.y - v1.x * v0.y;
    let b = (v2.x * v1.y - v1.x * v2.y) / den;
    let c = (v0.x * v2.y - v2.x * v0.y) / den;
    t.a + (t.b - t.a) * b + (t.c - t.a) * c
}

pub(crate) fn polygon_area(poly: &[Point2<f64>]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
}

/// Sutherland–Hodgman clip of `subject` by convex `clip`; boundary contact is kept.
fn clip_convex(subject: &[Point2<f64>], clip: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let orient = polygon_area(clip).signum();
    let mut output = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let (c0, c1) = (clip[i], clip[(i + 1) % n]);
        let edge = c1 - c0;
        let scale = edge.norm().max(1e-300);
        let side = |p: &Point2<f64>| orient * (edge.x * (p.y - c0.y) - edge.y * (p.x - c0.x)) / scale;
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let (sc, sp) = (side(&cur), side(&prev));
            let inside_c = sc >= -PLANE_EPS;
            let inside_p = sp >= -PLANE_EPS;
            if inside_c {
                if !inside_p {
                    output.push(prev + (cur - prev) * (sp / (sp - sc)));
                }
                output.push(cur);
            } else if inside_p {
                output.push(prev + (cur - prev) * (sp / (sp - sc)));
            }
        }
    }
    output
}

/// True iff the meshes interpenetrate with positive depth, or one encloses the other.
/// Meshes that only touch along faces, edges or vertices do not intersect.
pub fn mesh_pair_intersects(a: &WorldMesh, b: &WorldMesh) -> bool {
    if a.is_empty() || b.is_empty() || !a.aabb().overlaps(&b.aabb(), PLANE_EPS) {
        return false;
    }
    let mut any_contact = false;
    let penetrating = a.visit_overlapping_pairs(b, PLANE_EPS, |i, j| {
        let (ta, tb) = (&a.triangles()[i], &b.triangles()[j]);
        let probes: Vec<Point3<f64>> = match triangle_contact(ta, tb) {
            TriangleContact::Disjoint => return ControlFlow::Continue(()),
            TriangleContact::CoplanarTouch => {
                any_contact = true;
                return ControlFlow::Continue(());
            }
            TriangleContact::Crossing { p0, p1 } => [0.5, 0.25, 0.75]
                .iter()
                .map(|&k| p0 + (p1 - p0) * k)
                .collect(),
            TriangleContact::CoplanarOverlap { centroid } => vec![centroid],
        };
        any_contact = true;
        let (na, nb) = (ta.normal(), tb.normal());
        let mut dirs = vec![na, nb];
        for s in [na + nb, na - nb] {
            if s.norm() > 1e-9 {
                dirs.push(s.normalize());
            }
        }
        for p in &probes {
            for d in &dirs {
                for sign in [-1.0, 1.0] {
                    let q = p + d * (sign * PROBE_OFFSET);
                    if a.contains_point(&q) && b.contains_point(&q) {
                        return ControlFlow::Break(());
                    }
                }
            }
        }
        ControlFlow::Continue(())
    });
    if penetrating.is_some() {
        return true;
    }
    if any_contact {
        return false;
    }
    // No surface contact at all: either disjoint or one mesh lies wholly inside the other.
    let first = |m: &WorldMesh| m.triangles()[0].a;
    b.contains_point(&first(a)) || a.contains_point(&first(b))
}
