use nalgebra::{Matrix3, Point3, Rotation3, Vector3};

use super::GeometryError;

/// Rigid placement: world = rotation * local + translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidTransform {
    pub rotation: Rotation3<f64>,
    pub translation: Vector3<f64>,
}

/// Tolerance on `R^T R = I` when accepting a rotation from a manifest.
const ORTHONORMAL_TOL: f64 = 1e-6;

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Rotation3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Rotation3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self::new(Rotation3::identity(), Vector3::new(x, y, z))
    }

    /// Rotation about +Z by `angle` radians, followed by a translation.
    pub fn from_yaw(angle: f64, translation: Vector3<f64>) -> Self {
        Self::new(Rotation3::from_axis_angle(&Vector3::z_axis(), angle), translation)
    }

    /// Parses the 12-value row-major `[R | t]` layout used by scene manifests.
    pub fn from_row_major(values: &[f64; 12]) -> Result<Self, GeometryError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidTransform("non-finite entry".into()));
        }
        let m = Matrix3::new(
            values[0], values[1], values[2], values[4], values[5], values[6], values[8],
            values[9], values[10],
        );
        let deviation = (m.transpose() * m - Matrix3::identity()).abs().max();
        if deviation > ORTHONORMAL_TOL {
            return Err(GeometryError::InvalidTransform(format!(
                "rotation block is not orthonormal (max deviation {deviation:.3e})"
            )));
        }
        if m.determinant() <= 0.0 {
            return Err(GeometryError::InvalidTransform(
                "rotation block has negative determinant".into(),
            ));
        }
        Ok(Self::new(
            Rotation3::from_matrix_unchecked(m),
            Vector3::new(values[3], values[7], values[11]),
        ))
    }

    pub fn to_row_major(&self) -> [f64; 12] {
        let m = self.rotation.matrix();
        let t = &self.translation;
        [
            m[(0, 0)], m[(0, 1)], m[(0, 2)], t.x,
            m[(1, 0)], m[(1, 1)], m[(1, 2)], t.y,
            m[(2, 0)], m[(2, 1)], m[(2, 2)], t.z,
        ]
    }

    pub fn apply_point(&self, p: &Point3<f64>) -> Point3<f64> {
        self.rotation * p + self.translation
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    /// `self` applied after `inner`.
    pub fn compose(&self, inner: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * inner.rotation,
            translation: self.rotation * inner.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let inv = self.rotation.inverse();
        RigidTransform {
            rotation: inv,
            translation: -(inv * self.translation),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn row_major_round_trip() {
        let t = RigidTransform::from_yaw(0.3, Vector3::new(1.0, -2.0, 0.5));
        let back = RigidTransform::from_row_major(&t.to_row_major()).unwrap();
        assert!((back.rotation.matrix() - t.rotation.matrix()).abs().max() < 1e-15);
        assert_eq!(back.translation, t.translation);
    }

    #[test]
    fn rejects_scaled_rotation() {
        let mut v = RigidTransform::identity().to_row_major();
        v[0] = 2.0;
        assert!(RigidTransform::from_row_major(&v).is_err());
    }

    #[test]
    fn rejects_reflection() {
        let mut v = RigidTransform::identity().to_row_major();
        v[0] = -1.0;
        assert!(RigidTransform::from_row_major(&v).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let a = RigidTransform::from_yaw(FRAC_PI_2, Vector3::new(1.0, 0.0, 0.0));
        let b = RigidTransform::from_translation(0.0, 2.0, 0.0);
        let p = Point3::new(0.5, 0.25, 1.0);
        let composed = a.compose(&b).apply_point(&p);
        let stepwise = a.apply_point(&b.apply_point(&p));
        assert!((composed - stepwise).norm() < 1e-12);
        let back = a.inverse().apply_point(&a.apply_point(&p));
        assert!((back - p).norm() < 1e-12);
    }
}
