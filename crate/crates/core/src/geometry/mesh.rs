use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::{GeometryError, RigidTransform};

/// Triangles with area at or below this are treated as degenerate (m²).
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Self {
            min: Point3::from([f64::INFINITY; 3]),
            max: Point3::from([f64::NEG_INFINITY; 3]),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3<f64>>) -> Self {
        let mut b = Self::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: &Point3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn center(&self) -> Point3<f64> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn extents(&self) -> Vector3<f64> {
        self.max - self.min
    }

    /// Closed-interval overlap test, expanded by `margin` on every side.
    pub fn overlaps(&self, other: &Aabb, margin: f64) -> bool {
        (0..3).all(|i| {
            self.min[i] - margin <= other.max[i] && other.min[i] - margin <= self.max[i]
        })
    }

    /// Euclidean gap between the boxes (0 when they overlap).
    pub fn distance(&self, other: &Aabb) -> f64 {
        let mut sq = 0.0;
        for i in 0..3 {
            let gap = (other.min[i] - self.max[i]).max(self.min[i] - other.max[i]);
            if gap > 0.0 {
                sq += gap * gap;
            }
        }
        sq.sqrt()
    }

    /// Slab test; returns the parametric entry distance when the ray meets the box in `[0, t_max]`.
    pub fn ray_entry(&self, origin: &Point3<f64>, inv_dir: &Vector3<f64>, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for i in 0..3 {
            let mut a = (self.min[i] - origin[i]) * inv_dir[i];
            let mut b = (self.max[i] - origin[i]) * inv_dir[i];
            if a.is_nan() || b.is_nan() {
                // Ray parallel to the slab with the origin on its boundary plane.
                if origin[i] < self.min[i] || origin[i] > self.max[i] {
                    return None;
                }
                continue;
            }
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub a: Point3<f64>,
    pub b: Point3<f64>,
    pub c: Point3<f64>,
}

impl Triangle {
    pub fn new(a: Point3<f64>, b: Point3<f64>, c: Point3<f64>) -> Self {
        Self { a, b, c }
    }

    pub fn vertices(&self) -> [Point3<f64>; 3] {
        [self.a, self.b, self.c]
    }

    /// Unnormalized normal; its length is twice the area.
    pub fn scaled_normal(&self) -> Vector3<f64> {
        (self.b - self.a).cross(&(self.c - self.a))
    }

    pub fn normal(&self) -> Vector3<f64> {
        self.scaled_normal().normalize()
    }

    pub fn area(&self) -> f64 {
        0.5 * self.scaled_normal().norm()
    }

    pub fn centroid(&self) -> Point3<f64> {
        Point3::from((self.a.coords + self.b.coords + self.c.coords) / 3.0)
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&[self.a, self.b, self.c])
    }

    pub fn transformed(&self, t: &RigidTransform) -> Triangle {
        Triangle::new(t.apply_point(&self.a), t.apply_point(&self.b), t.apply_point(&self.c))
    }
}

/// Indexed triangle mesh (meters).
#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3<f64>>, triangles: Vec<[u32; 3]>) -> Result<Self, GeometryError> {
        if triangles.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        let n = vertices.len() as u32;
        if let Some(bad) = triangles.iter().flatten().find(|&&i| i >= n) {
            return Err(GeometryError::InvalidMesh(format!(
                "triangle index {bad} out of range for {n} vertices"
            )));
        }
        if vertices.iter().any(|v| !v.coords.iter().all(|c| c.is_finite())) {
            return Err(GeometryError::InvalidMesh("non-finite vertex".into()));
        }
        Ok(Self {
            vertices,
            triangles,
        })
    }

    /// Axis-aligned box centered at the origin, outward-facing counter-clockwise winding.
    pub fn cuboid(half_extents: Vector3<f64>) -> Self {
        let (x, y, z) = (half_extents.x, half_extents.y, half_extents.z);
        let vertices = vec![
            Point3::new(-x, -y, -z),
            Point3::new(x, -y, -z),
            Point3::new(x, y, -z),
            Point3::new(-x, y, -z),
            Point3::new(-x, -y, z),
            Point3::new(x, -y, z),
            Point3::new(x, y, z),
            Point3::new(-x, y, z),
        ];
        let triangles = vec![
            [0, 2, 1], [0, 3, 2], // bottom
            [4, 5, 6], [4, 6, 7], // top
            [0, 1, 5], [0, 5, 4], // -y
            [2, 3, 7], [2, 7, 6], // +y
            [1, 2, 6], [1, 6, 5], // +x
            [3, 0, 4], [3, 4, 7], // -x
        ];
        Self {
            vertices,
            triangles,
        }
    }

    /// Box spanning `[min, max]`.
    pub fn cuboid_between(min: Point3<f64>, max: Point3<f64>) -> Self {
        let center = nalgebra::center(&min, &max);
        let mut mesh = Self::cuboid((max - min) / 2.0);
        for v in &mut mesh.vertices {
            *v += center.coords;
        }
        mesh
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn indices(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle(&self, i: usize) -> Triangle {
        let [a, b, c] = self.triangles[i];
        Triangle::new(
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        )
    }

    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        (0..self.triangles.len()).map(move |i| self.triangle(i))
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles().map(|t| t.area()).sum()
    }

    pub fn transformed(&self, t: &RigidTransform) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| t.apply_point(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Drops triangles with area ≤ [`MIN_TRIANGLE_AREA`]; returns how many were removed.
    pub fn remove_degenerate(&mut self) -> usize {
        let before = self.triangles.len();
        let vertices = &self.vertices;
        self.triangles.retain(|&[a, b, c]| {
            Triangle::new(vertices[a as usize], vertices[b as usize], vertices[c as usize]).area()
                > MIN_TRIANGLE_AREA
        });
        before - self.triangles.len()
    }

    /// Number of undirected edges not shared by exactly two triangles.
    pub fn non_manifold_edge_count(&self) -> usize {
        let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        edges.values().filter(|&&n| n != 2).count()
    }

    /// Appends another mesh, re-indexing its triangles.
    pub fn merge(&mut self, other: &TriMesh) {
        let offset = self.vertices.len() as u32;
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]));
    }
}
