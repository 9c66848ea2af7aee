//! Geometric primitives shared by the relation scorers and the metrics: meshes and
//! boxes, seeded sampling, ray casting, mesh intersection and distance, occupancy
//! rasterization with flood fill, and convex-hull support tests.
//!
//! Conventions: meters, Z-up, gravity along −Z.

mod bvh;
mod distance;
mod hull;
mod intersect;
mod mesh;
mod obb;
mod occupancy;
mod raycast;
mod sampling;
mod transform;

use thiserror::Error;

pub use bvh::{ray_triangle, WorldMesh};
pub use distance::{
    closest_point_on_triangle, closest_surface_distance, point_mesh_distance, segment_segment_distance_sq,
    triangle_distance,
};
pub use hull::{convex_hull_2d, support_hull_check, DEGENERATE_SUPPORT_TOL};
pub use intersect::{mesh_pair_intersects, triangle_contact, TriangleContact};
pub use mesh::{Aabb, TriMesh, Triangle, MIN_TRIANGLE_AREA};
pub use obb::Obb;
pub use occupancy::{flood_components, GridFrame, OccupancyMask};
pub use raycast::{raycast_first_hit, raycast_within, RayHit};
pub use sampling::{derive_seed, sample_points_obb, sample_points_surface, SampledPoints};
pub use transform::RigidTransform;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
}

/// Area-weighted polygon normal (Newell's method); length is twice the area.
pub fn newell_normal(points: &[nalgebra::Point3<f64>]) -> nalgebra::Vector3<f64> {
    let mut n = nalgebra::Vector3::<f64>::zeros();
    for i in 0..points.len() {
        let (a, b) = (points[i], points[(i + 1) % points.len()]);
        n.x += (a.y - b.y) * (a.z + b.z);
        n.y += (a.z - b.z) * (a.x + b.x);
        n.z += (a.x - b.x) * (a.y + b.y);
    }
    n
}

/// Triangulates a simple 3D polygon (given in order) via its projection on the
/// plane of largest extent.
pub fn triangulate_polygon(points: &[nalgebra::Point3<f64>]) -> Result<Vec<Triangle>, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::InvalidPolygon(format!("{} vertices", points.len())));
    }
    let n = newell_normal(points);
    if n.norm() < 1e-12 {
        return Err(GeometryError::InvalidPolygon("zero area".into()));
    }
    let drop = n.iamax();
    let flat: Vec<f64> = points
        .iter()
        .flat_map(|p| match drop {
            0 => [p.y, p.z],
            1 => [p.z, p.x],
            _ => [p.x, p.y],
        })
        .collect();
    let indices = earcutr::earcut(&flat, &[], 2).map_err(|e| GeometryError::InvalidPolygon(format!("{e:?}")))?;
    let tris: Vec<Triangle> = indices
        .chunks_exact(3)
        .map(|c| Triangle::new(points[c[0]], points[c[1]], points[c[2]]))
        .filter(|t| t.area() > MIN_TRIANGLE_AREA)
        .collect();
    if tris.is_empty() {
        return Err(GeometryError::InvalidPolygon("triangulation produced no triangles".into()));
    }
    Ok(tris)
}

/// Largest distance of any vertex from the plane through the vertex centroid with the
/// Newell normal.
pub fn polygon_planarity(points: &[nalgebra::Point3<f64>]) -> f64 {
    let n = newell_normal(points);
    if n.norm() < 1e-15 || points.is_empty() {
        return 0.0;
    }
    let n = n.normalize();
    let c = points.iter().fold(nalgebra::Vector3::zeros(), |acc, p| acc + p.coords) / points.len() as f64;
    points.iter().map(|p| (p.coords - c).dot(&n).abs()).fold(0.0, f64::max)
}
