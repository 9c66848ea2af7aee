use nalgebra::Point2;

/// Distance within which a centroid counts as lying on a degenerate (point or segment) support.
pub const DEGENERATE_SUPPORT_TOL: f64 = 1e-6;
const BOUNDARY_TOL: f64 = 1e-9;

fn cross(o: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise convex hull (Andrew's monotone chain); collinear points dropped.
pub fn convex_hull_2d(points: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut pts: Vec<Point2<f64>> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2<f64>> = Vec::with_capacity(pts.len() * 2);
    for p in &pts {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    hull
}

fn point_segment_distance(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Whether `centroid` lies inside or on the convex hull of the contact points.
/// Degenerate supports (a point or collinear contacts) only hold a centroid within
/// [`DEGENERATE_SUPPORT_TOL`] of them.
pub fn support_hull_check(contacts: &[Point2<f64>], centroid: &Point2<f64>) -> bool {
    let hull = convex_hull_2d(contacts);
    match hull.len() {
        0 => false,
        1 => (centroid - hull[0]).norm() <= DEGENERATE_SUPPORT_TOL,
        2 => point_segment_distance(centroid, &hull[0], &hull[1]) <= DEGENERATE_SUPPORT_TOL,
        n => (0..n).all(|i| {
            let (a, b) = (&hull[i], &hull[(i + 1) % n]);
            cross(a, b, centroid) >= -BOUNDARY_TOL * (b - a).norm()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn square_hull_drops_interior_and_collinear() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(0.5, 0.0), p(1.0, 1.0), p(0.0, 1.0), p(0.5, 0.5)];
        let hull = convex_hull_2d(&pts);
        assert_eq!(hull.len(), 4);
    }

    #[test]
    fn box_corners_hold_center() {
        let corners = [p(-1.0, -1.0), p(1.0, -1.0), p(1.0, 1.0), p(-1.0, 1.0)];
        assert!(support_hull_check(&corners, &p(0.0, 0.0)));
        assert!(support_hull_check(&corners, &p(1.0, 0.0)));
        assert!(!support_hull_check(&corners, &p(1.01, 0.0)));
    }

    #[test]
    fn overhang_on_one_edge() {
        let edge = [p(0.0, -0.5), p(0.0, 0.5), p(0.1, -0.5), p(0.1, 0.5)];
        assert!(!support_hull_check(&edge, &p(0.5, 0.0)));
    }

    #[test]
    fn degenerate_supports() {
        assert!(!support_hull_check(&[], &p(0.0, 0.0)));
        assert!(support_hull_check(&[p(0.0, 0.0)], &p(0.0, 5e-7)));
        assert!(!support_hull_check(&[p(0.0, 0.0)], &p(0.0, 1e-3)));
        let seg = [p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.0)];
        assert!(support_hull_check(&seg, &p(1.5, 0.0)));
        assert!(!support_hull_check(&seg, &p(1.5, 0.01)));
    }
}
