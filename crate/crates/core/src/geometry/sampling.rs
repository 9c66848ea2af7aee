use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use super::{Obb, RigidTransform, TriMesh};

/// Point sample set together with the seed that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPoints {
    pub points: Vec<Point3<f64>>,
    pub seed: u64,
}

impl SampledPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Fraction of points satisfying `pred` (0 for an empty set).
    pub fn fraction(&self, pred: impl Fn(&Point3<f64>) -> bool) -> f64 {
        if self.points.is_empty() {
            return 0.0;
        }
        self.points.iter().filter(|p| pred(p)).count() as f64 / self.points.len() as f64
    }
}

/// Mixes a run seed with a textual tag (object id, purpose) into an independent stream seed.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(base.to_le_bytes());
    h.update(tag.as_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Uniform samples in the box volume. Points are drawn in box coordinates, so the
/// set moves rigidly with the box.
pub fn sample_points_obb(obb: &Obb, count: usize, seed: u64) -> SampledPoints {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..count)
        .map(|_| {
            let u = Vector3::new(
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
                rng.random_range(-1.0..=1.0),
            );
            obb.to_world(&u.component_mul(&obb.half_extents))
        })
        .collect();
    SampledPoints { points, seed }
}

/// Area-weighted uniform samples on the surface of a local-frame mesh, placed in world frame.
pub fn sample_points_surface(
    mesh: &TriMesh,
    placement: &RigidTransform,
    count: usize,
    seed: u64,
) -> SampledPoints {
    let mut cumulative = Vec::with_capacity(mesh.triangle_count());
    let mut total = 0.0;
    for t in mesh.triangles() {
        total += t.area();
        cumulative.push(total);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    if total <= 0.0 {
        return SampledPoints { points, seed };
    }
    for _ in 0..count {
        let pick = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c <= pick).min(cumulative.len() - 1);
        let tri = mesh.triangle(idx);
        let r1: f64 = rng.random::<f64>().sqrt();
        let r2: f64 = rng.random();
        let p = tri.a.coords * (1.0 - r1) + tri.b.coords * (r1 * (1.0 - r2)) + tri.c.coords * (r1 * r2);
        points.push(placement.apply_point(&Point3::from(p)));
    }
    SampledPoints { points, seed }
}
