use nalgebra::Point3;

use super::intersect::{mesh_pair_intersects, triangle_contact};
use super::{Triangle, WorldMesh};

/// Closest point on a triangle (Ericson, Real-Time Collision Detection §5.1.5).
pub fn closest_point_on_triangle(p: &Point3<f64>, t: &Triangle) -> Point3<f64> {
    let (a, b, c) = (t.a, t.b, t.c);
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

/// Squared distance between segments `p1q1` and `p2q2`.
pub fn segment_segment_distance_sq(
    p1: &Point3<f64>,
    q1: &Point3<f64>,
    p2: &Point3<f64>,
    q2: &Point3<f64>,
) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let eps = 1e-300;
    let (s, t);
    if a <= eps && e <= eps {
        return r.norm_squared();
    }
    if a <= eps {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= eps {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c1 - c2).norm_squared()
}

/// Euclidean distance between two triangles (0 when they touch or cross).
pub fn triangle_distance(ta: &Triangle, tb: &Triangle) -> f64 {
    if triangle_contact(ta, tb).is_contact() {
        return 0.0;
    }
    let va = ta.vertices();
    let vb = tb.vertices();
    let mut best = f64::INFINITY;
    for i in 0..3 {
        for j in 0..3 {
            best = best.min(segment_segment_distance_sq(
                &va[i],
                &va[(i + 1) % 3],
                &vb[j],
                &vb[(j + 1) % 3],
            ));
        }
    }
    for p in &va {
        best = best.min((closest_point_on_triangle(p, tb) - p).norm_squared());
    }
    for p in &vb {
        best = best.min((closest_point_on_triangle(p, ta) - p).norm_squared());
    }
    best.sqrt()
}

/// Minimum distance between the two surfaces; 0 when they touch, intersect or nest.
pub fn closest_surface_distance(a: &WorldMesh, b: &WorldMesh) -> f64 {
    if mesh_pair_intersects(a, b) {
        return 0.0;
    }
    a.min_pair_distance(b, triangle_distance)
}

/// Distance from a point to the nearest triangle of `mesh`.
pub fn point_mesh_distance(p: &Point3<f64>, mesh: &WorldMesh) -> f64 {
    mesh.triangles()
        .iter()
        .map(|t| (closest_point_on_triangle(p, t) - p).norm())
        .fold(f64::INFINITY, f64::min)
}
