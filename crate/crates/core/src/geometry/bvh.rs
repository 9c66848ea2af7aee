use std::ops::ControlFlow;

use nalgebra::{Point3, Vector3};

use super::{Aabb, RigidTransform, TriMesh, Triangle};

const LEAF_SIZE: usize = 4;
const ON_SURFACE_TOL: f64 = 1e-12;

/// Barycentric slack for ray/triangle hits, so rays through shared edges are never lost.
const BARY_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
struct Node {
    bounds: Aabb,
    /// Range into `order` for leaves; child indices for interior nodes.
    start: u32,
    count: u32,
    children: Option<(u32, u32)>,
}

/// World-space triangle set with a bounding volume hierarchy for ray, overlap and
/// distance queries.
#[derive(Clone, Debug)]
pub struct WorldMesh {
    triangles: Vec<Triangle>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

impl WorldMesh {
    pub fn new(triangles: Vec<Triangle>) -> Self {
        let mut order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::new();
        if !triangles.is_empty() {
            let centroids: Vec<Point3<f64>> = triangles.iter().map(Triangle::centroid).collect();
            build(&triangles, &centroids, &mut order, 0, triangles.len(), &mut nodes);
        }
        Self {
            triangles,
            order,
            nodes,
        }
    }

    pub fn from_mesh(mesh: &TriMesh, placement: &RigidTransform) -> Self {
        Self::new(mesh.triangles().map(|t| t.transformed(placement)).collect())
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn aabb(&self) -> Aabb {
        self.nodes.first().map(|n| n.bounds).unwrap_or_else(Aabb::empty)
    }

    pub fn transformed(&self, t: &RigidTransform) -> WorldMesh {
        WorldMesh::new(self.triangles.iter().map(|tri| tri.transformed(t)).collect())
    }

    pub fn vertices(&self) -> impl Iterator<Item = Point3<f64>> + '_ {
        self.triangles.iter().flat_map(|t| t.vertices())
    }

    /// Nearest hit with parameter in `[t_min, t_max]`; `direction` need not be unit length.
    pub fn raycast(
        &self,
        origin: &Point3<f64>,
        direction: &Vector3<f64>,
        t_min: f64,
        t_max: f64,
    ) -> Option<(f64, usize)> {
        if self.nodes.is_empty() {
            return None;
        }
        let inv = direction.map(|c| 1.0 / c);
        // Boxes are tested from an origin pulled back to t_min so negative t_min still works.
        let shifted = origin + direction * t_min.min(0.0);
        let offset = t_min.min(0.0);
        let mut best: Option<(f64, usize)> = None;
        let mut stack = vec![0u32];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            let limit = best.map_or(t_max, |b| b.0) - offset;
            if node.bounds.ray_entry(&shifted, &inv, limit + 1e-9).is_none() {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                None => {
                    for &ti in &self.order[node.start as usize..(node.start + node.count) as usize] {
                        let tri = &self.triangles[ti as usize];
                        if let Some(t) = ray_triangle(origin, direction, tri) {
                            let better = best.is_none_or(|b| t < b.0 || (t == b.0 && (ti as usize) < b.1));
                            if t >= t_min && t <= t_max && better {
                                best = Some((t, ti as usize));
                            }
                        }
                    }
                }
            }
        }
        best
    }

    /// Visits triangle index pairs whose boxes overlap (closed, expanded by `margin`).
    pub fn visit_overlapping_pairs<B>(
        &self,
        other: &WorldMesh,
        margin: f64,
        mut f: impl FnMut(usize, usize) -> ControlFlow<B>,
    ) -> Option<B> {
        if self.nodes.is_empty() || other.nodes.is_empty() {
            return None;
        }
        let mut stack = vec![(0u32, 0u32)];
        while let Some((ia, ib)) = stack.pop() {
            let (na, nb) = (&self.nodes[ia as usize], &other.nodes[ib as usize]);
            if !na.bounds.overlaps(&nb.bounds, margin) {
                continue;
            }
            match (na.children, nb.children) {
                (None, None) => {
                    for &ta in self.leaf(na) {
                        let ba = self.triangles[ta as usize].aabb();
                        for &tb in other.leaf(nb) {
                            if !ba.overlaps(&other.triangles[tb as usize].aabb(), margin) {
                                continue;
                            }
                            if let ControlFlow::Break(b) = f(ta as usize, tb as usize) {
                                return Some(b);
                            }
                        }
                    }
                }
                (Some((l, r)), None) => {
                    stack.push((l, ib));
                    stack.push((r, ib));
                }
                (None, Some((l, r))) => {
                    stack.push((ia, l));
                    stack.push((ia, r));
                }
                (Some((al, ar)), Some((bl, br))) => {
                    // Descend the larger node first.
                    if na.bounds.extents().norm_squared() >= nb.bounds.extents().norm_squared() {
                        stack.push((al, ib));
                        stack.push((ar, ib));
                    } else {
                        stack.push((ia, bl));
                        stack.push((ia, br));
                    }
                }
            }
        }
        None
    }

    /// Branch-and-bound minimum of `pair_distance` over triangle pairs.
    pub(crate) fn min_pair_distance(
        &self,
        other: &WorldMesh,
        pair_distance: impl Fn(&Triangle, &Triangle) -> f64,
    ) -> f64 {
        if self.nodes.is_empty() || other.nodes.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        let mut stack = vec![(0u32, 0u32)];
        while let Some((ia, ib)) = stack.pop() {
            let (na, nb) = (&self.nodes[ia as usize], &other.nodes[ib as usize]);
            if na.bounds.distance(&nb.bounds) >= best {
                continue;
            }
            match (na.children, nb.children) {
                (None, None) => {
                    for &ta in self.leaf(na) {
                        for &tb in other.leaf(nb) {
                            let d = pair_distance(&self.triangles[ta as usize], &other.triangles[tb as usize]);
                            if d < best {
                                best = d;
                                if best == 0.0 {
                                    return 0.0;
                                }
                            }
                        }
                    }
                }
                (Some((l, r)), None) => {
                    stack.push((l, ib));
                    stack.push((r, ib));
                }
                (None, Some((l, r))) => {
                    stack.push((ia, l));
                    stack.push((ia, r));
                }
                (Some((al, ar)), Some((bl, br))) => {
                    if na.bounds.extents().norm_squared() >= nb.bounds.extents().norm_squared() {
                        stack.push((al, ib));
                        stack.push((ar, ib));
                    } else {
                        stack.push((ia, bl));
                        stack.push((ia, br));
                    }
                }
            }
        }
        best
    }

    /// Generalized winding number of `p`; ≈1 inside a closed mesh, ≈0 outside.
    /// Sign-normalized so inward-wound meshes behave the same.
    pub fn winding_number(&self, p: &Point3<f64>) -> f64 {
        let total: f64 = self.triangles.iter().map(|t| solid_angle(t, p)).sum();
        (total / (4.0 * std::f64::consts::PI)).abs()
    }

    /// Strict interior test: points on (or within 1e-12 m of) the surface are outside.
    pub fn contains_point(&self, p: &Point3<f64>) -> bool {
        let mut total = 0.0;
        for t in &self.triangles {
            let a = t.a - p;
            let b = t.b - p;
            let c = t.c - p;
            let scale = a.norm() * b.norm() * c.norm();
            if a.dot(&b.cross(&c)).abs() <= 1e-9 * scale
                && (super::closest_point_on_triangle(p, t) - p).norm() <= ON_SURFACE_TOL
            {
                return false;
            }
            total += solid_angle(t, p);
        }
        (total / (4.0 * std::f64::consts::PI)).abs() > 0.5
    }

    fn leaf(&self, node: &Node) -> &[u32] {
        &self.order[node.start as usize..(node.start + node.count) as usize]
    }
}

fn build(
    triangles: &[Triangle],
    centroids: &[Point3<f64>],
    order: &mut [u32],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> u32 {
    let slice = &mut order[start..end];
    let mut bounds = Aabb::empty();
    let mut cbounds = Aabb::empty();
    for &i in slice.iter() {
        bounds = bounds.union(&triangles[i as usize].aabb());
        cbounds.grow(&centroids[i as usize]);
    }
    let idx = nodes.len() as u32;
    nodes.push(Node {
        bounds,
        start: start as u32,
        count: (end - start) as u32,
        children: None,
    });
    if end - start <= LEAF_SIZE {
        return idx;
    }
    let ext = cbounds.extents();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = (end - start) / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis].total_cmp(&centroids[b as usize][axis]).then(a.cmp(&b))
    });
    let left = build(triangles, centroids, order, start, start + mid, nodes);
    let right = build(triangles, centroids, order, start + mid, end, nodes);
    nodes[idx as usize].children = Some((left, right));
    idx
}

/// Möller–Trumbore with slack on the barycentric bounds; returns the ray parameter.
pub fn ray_triangle(origin: &Point3<f64>, dir: &Vector3<f64>, tri: &Triangle) -> Option<f64> {
    let e1 = tri.b - tri.a;
    let e2 = tri.c - tri.a;
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    if det.abs() <= 1e-14 * e1.norm() * e2.norm() * dir.norm() {
        return None;
    }
    let inv = 1.0 / det;
    let tvec = origin - tri.a;
    let u = tvec.dot(&pvec) * inv;
    if !(-BARY_EPS..=1.0 + BARY_EPS).contains(&u) {
        return None;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv;
    if v < -BARY_EPS || u + v > 1.0 + BARY_EPS {
        return None;
    }
    Some(e2.dot(&qvec) * inv)
}

/// Signed solid angle subtended by a triangle at `p`.
fn solid_angle(t: &Triangle, p: &Point3<f64>) -> f64 {
    let a = t.a - p;
    let b = t.b - p;
    let c = t.c - p;
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(&b.cross(&c));
    let den = la * lb * lc + a.dot(&b) * lc + a.dot(&c) * lb + b.dot(&c) * la;
    2.0 * num.atan2(den)
}
