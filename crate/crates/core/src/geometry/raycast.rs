use nalgebra::{Point3, Vector3};

use super::WorldMesh;

#[derive(Clone, Debug, PartialEq)]
pub struct RayHit<'a> {
    pub point: Point3<f64>,
    pub id: &'a str,
    pub distance: f64,
}

/// Nearest intersection of a ray with any of the named meshes. `direction` is expected
/// to be unit length so that `distance` is in meters. Hits at the origin count.
pub fn raycast_first_hit<'a, I>(origin: &Point3<f64>, direction: &Vector3<f64>, targets: I) -> Option<RayHit<'a>>
where
    I: IntoIterator<Item = (&'a str, &'a WorldMesh)>,
{
    raycast_within(origin, direction, f64::INFINITY, targets)
}

/// As [`raycast_first_hit`], limited to hits no farther than `max_distance`.
pub fn raycast_within<'a, I>(
    origin: &Point3<f64>,
    direction: &Vector3<f64>,
    max_distance: f64,
    targets: I,
) -> Option<RayHit<'a>>
where
    I: IntoIterator<Item = (&'a str, &'a WorldMesh)>,
{
    let mut best: Option<RayHit<'a>> = None;
    for (id, mesh) in targets {
        let limit = best.as_ref().map_or(max_distance, |b| b.distance);
        if let Some((t, _)) = mesh.raycast(origin, direction, 0.0, limit) {
            if best.as_ref().is_none_or(|b| t < b.distance) {
                best = Some(RayHit {
                    point: origin + direction * t,
                    id,
                    distance: t,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Triangle, ray_triangle};

    fn floor_at(z: f64) -> WorldMesh {
        WorldMesh::new(vec![
            Triangle::new(Point3::new(-5.0, -5.0, z), Point3::new(5.0, -5.0, z), Point3::new(5.0, 5.0, z)),
            Triangle::new(Point3::new(-5.0, -5.0, z), Point3::new(5.0, 5.0, z), Point3::new(-5.0, 5.0, z)),
        ])
    }

    #[test]
    fn hits_floor_plane() {
        let floor = floor_at(0.0);
        let hit = raycast_first_hit(&Point3::new(0.0, 0.0, 1.0), &-Vector3::z(), [("floor", &floor)]).unwrap();
        assert_eq!(hit.point, Point3::new(0.0, 0.0, 0.0));
        assert_eq!(hit.distance, 1.0);
        assert_eq!(hit.id, "floor");
        assert!(raycast_first_hit(&Point3::new(0.0, 0.0, 1.0), &Vector3::z(), [("floor", &floor)]).is_none());
    }

    #[test]
    fn stacked_floors_report_nearer() {
        let lower = floor_at(0.0);
        let upper = floor_at(3.0);
        let origin = Point3::new(0.3, -0.2, 5.0);
        let dir = -Vector3::z();
        let hit = raycast_first_hit(&origin, &dir, [("lower", &lower), ("upper", &upper)]).unwrap();
        // Brute force over every triangle of both meshes.
        let brute = lower
            .triangles()
            .iter()
            .chain(upper.triangles())
            .filter_map(|t| ray_triangle(&origin, &dir, t))
            .filter(|t| *t >= 0.0)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(hit.id, "upper");
        assert_eq!(hit.distance, brute);
    }
}
