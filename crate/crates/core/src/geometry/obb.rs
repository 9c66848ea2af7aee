use nalgebra::{Point3, Rotation3, Vector3};

use super::{Aabb, RigidTransform};

/// Oriented bounding box; the columns of `rotation` are the box axes in world frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Obb {
    pub center: Point3<f64>,
    pub half_extents: Vector3<f64>,
    pub rotation: Rotation3<f64>,
}

impl Obb {
    pub fn new(center: Point3<f64>, half_extents: Vector3<f64>, rotation: Rotation3<f64>) -> Self {
        Self {
            center,
            half_extents,
            rotation,
        }
    }

    pub fn axis_aligned(center: Point3<f64>, half_extents: Vector3<f64>) -> Self {
        Self::new(center, half_extents, Rotation3::identity())
    }

    /// Box of a local axis-aligned extent carried into world frame by a rigid placement.
    pub fn from_local_aabb(local: &Aabb, placement: &RigidTransform) -> Self {
        Self {
            center: placement.apply_point(&local.center()),
            half_extents: local.extents() / 2.0,
            rotation: placement.rotation,
        }
    }

    pub fn axis(&self, i: usize) -> Vector3<f64> {
        self.rotation.matrix().column(i).into_owned()
    }

    /// World point → coordinates relative to the center along the box axes.
    pub fn to_local(&self, p: &Point3<f64>) -> Vector3<f64> {
        self.rotation.inverse() * (p - self.center)
    }

    pub fn to_world(&self, local: &Vector3<f64>) -> Point3<f64> {
        self.center + self.rotation * local
    }

    pub fn contains(&self, p: &Point3<f64>, tol: f64) -> bool {
        let q = self.to_local(p);
        (0..3).all(|i| q[i].abs() <= self.half_extents[i] + tol)
    }

    /// Same center and axes, every dimension multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Obb {
        Obb {
            half_extents: self.half_extents * factor,
            ..*self
        }
    }

    pub fn corners(&self) -> [Point3<f64>; 8] {
        let mut out = [Point3::origin(); 8];
        for (k, c) in out.iter_mut().enumerate() {
            let s = Vector3::new(
                if k & 1 == 0 { -1.0 } else { 1.0 },
                if k & 2 == 0 { -1.0 } else { 1.0 },
                if k & 4 == 0 { -1.0 } else { 1.0 },
            );
            *c = self.to_world(&s.component_mul(&self.half_extents));
        }
        out
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents.x * self.half_extents.y * self.half_extents.z
    }

    pub fn transformed(&self, t: &RigidTransform) -> Obb {
        Obb {
            center: t.apply_point(&self.center),
            half_extents: self.half_extents,
            rotation: t.rotation * self.rotation,
        }
    }

    /// Index of the box axis closest to world vertical.
    pub fn vertical_axis(&self) -> usize {
        (0..3)
            .max_by(|&a, &b| self.axis(a).z.abs().total_cmp(&self.axis(b).z.abs()))
            .unwrap_or(2)
    }
}
