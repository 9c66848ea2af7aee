use std::collections::VecDeque;

use nalgebra::{Point2, Rotation2, Vector2};

use super::Triangle;

/// Strictness slack for cell/shape overlap tests (m). Shapes that only touch a cell
/// edge within this distance do not occupy it.
const OVERLAP_TOL: f64 = 1e-9;
/// Projected triangles below this area are treated as segments (m²).
const FLAT_AREA: f64 = 1e-12;

/// Placement of the occupancy grid: a 2D frame rotated by `yaw` about world +Z.
/// Cell `(i, j)` covers `[origin.x + i·res, origin.x + (i+1)·res] × [origin.y + j·res, …]`
/// in frame coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridFrame {
    pub yaw: f64,
    pub origin: Point2<f64>,
    pub resolution: f64,
    pub width: usize,
    pub height: usize,
}

impl GridFrame {
    /// Frame covering `points` (world xy) plus a one-cell margin on every side.
    pub fn covering(points: &[Point2<f64>], yaw: f64, resolution: f64) -> Self {
        assert!(resolution > 0.0, "occupancy resolution must be positive");
        let rot = Rotation2::new(-yaw);
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            let q = rot * p;
            min = min.inf(&q);
            max = max.sup(&q);
        }
        if points.is_empty() {
            min = Point2::origin();
            max = Point2::origin();
        }
        let cells = |span: f64| ((span / resolution) - 1e-9).ceil().max(0.0) as usize + 2;
        Self {
            yaw,
            origin: min - Vector2::repeat(resolution),
            resolution,
            width: cells(max.x - min.x),
            height: cells(max.y - min.y),
        }
    }

    pub fn to_frame(&self, world: &Point2<f64>) -> Point2<f64> {
        Rotation2::new(-self.yaw) * world
    }

    pub fn to_world(&self, frame: &Point2<f64>) -> Point2<f64> {
        Rotation2::new(self.yaw) * frame
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point2<f64> {
        Point2::new(
            self.origin.x + (i as f64 + 0.5) * self.resolution,
            self.origin.y + (j as f64 + 0.5) * self.resolution,
        )
    }

    /// Inclusive range of cell indices whose extent can intersect `[lo, hi]` (frame coords).
    fn cell_range(&self, lo: f64, hi: f64, origin: f64, n: usize) -> Option<(usize, usize)> {
        let a = ((lo - origin) / self.resolution).floor() - 1.0;
        let b = ((hi - origin) / self.resolution).floor() + 1.0;
        if b < 0.0 || a > (n as f64 - 1.0) || n == 0 {
            return None;
        }
        Some((a.max(0.0) as usize, (b as usize).min(n - 1)))
    }

    /// Cells overlapped by a world-space triangle's vertical projection. Projections
    /// with area require positive-area overlap; flat ones (vertical faces) are kept
    /// only if `include_flat`, and then count any contact.
    pub fn cells_under_triangle(&self, tri: &Triangle, include_flat: bool) -> Vec<usize> {
        let pts = tri.vertices().map(|v| self.to_frame(&Point2::new(v.x, v.y)));
        let area = super::intersect::polygon_area(&pts).abs();
        let strict = area > FLAT_AREA;
        if !strict && !include_flat {
            return Vec::new();
        }
        self.cells_under_polygon(&pts, strict)
    }

    /// Cells overlapped by a convex frame-space polygon.
    pub fn cells_under_polygon(&self, pts: &[Point2<f64>], strict: bool) -> Vec<usize> {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in pts {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let Some((i0, i1)) = self.cell_range(lo.x, hi.x, self.origin.x, self.width) else {
            return Vec::new();
        };
        let Some((j0, j1)) = self.cell_range(lo.y, hi.y, self.origin.y, self.height) else {
            return Vec::new();
        };
        let mut axes: Vec<Vector2<f64>> = vec![Vector2::x(), Vector2::y()];
        for k in 0..pts.len() {
            let e = pts[(k + 1) % pts.len()] - pts[k];
            if e.norm() > 1e-15 {
                axes.push(Vector2::new(-e.y, e.x).normalize());
            }
        }
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let x0 = self.origin.x + i as f64 * self.resolution;
                let y0 = self.origin.y + j as f64 * self.resolution;
                let rect = [
                    Point2::new(x0, y0),
                    Point2::new(x0 + self.resolution, y0),
                    Point2::new(x0 + self.resolution, y0 + self.resolution),
                    Point2::new(x0, y0 + self.resolution),
                ];
                if polygons_overlap(pts, &rect, &axes, strict) {
                    out.push(self.index(i, j));
                }
            }
        }
        out
    }

    /// Cells whose centers fall inside the frame-space convex polygon (closed).
    pub fn cells_with_center_in(&self, pts: &[Point2<f64>]) -> Vec<usize> {
        let (mut lo, mut hi) = (pts[0], pts[0]);
        for p in pts {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let Some((i0, i1)) = self.cell_range(lo.x, hi.x, self.origin.x, self.width) else {
            return Vec::new();
        };
        let Some((j0, j1)) = self.cell_range(lo.y, hi.y, self.origin.y, self.height) else {
            return Vec::new();
        };
        let orient = super::intersect::polygon_area(pts).signum();
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = self.cell_center(i, j);
                let inside = (0..pts.len()).all(|k| {
                    let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
                    let e = b - a;
                    orient * (e.x * (c.y - a.y) - e.y * (c.x - a.x)) >= -OVERLAP_TOL * e.norm()
                });
                if inside {
                    out.push(self.index(i, j));
                }
            }
        }
        out
    }
}

fn polygons_overlap(a: &[Point2<f64>], b: &[Point2<f64>], axes: &[Vector2<f64>], strict: bool) -> bool {
    for axis in axes {
        let (amin, amax) = project(a, axis);
        let (bmin, bmax) = project(b, axis);
        let overlap = amax.min(bmax) - amin.max(bmin);
        if strict && overlap <= OVERLAP_TOL {
            return false;
        }
        if !strict && overlap < -OVERLAP_TOL {
            return false;
        }
    }
    true
}

fn project(pts: &[Point2<f64>], axis: &Vector2<f64>) -> (f64, f64) {
    pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let s = p.coords.dot(axis);
        (lo.min(s), hi.max(s))
    })
}

/// 2D occupancy grid over the floor plan; `true` marks a non-free cell.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyMask {
    pub frame: GridFrame,
    pub grid: Vec<bool>,
}

impl OccupancyMask {
    /// Axis-aligned mask from a row-major grid, mostly for tests.
    pub fn from_grid(width: usize, height: usize, resolution: f64, grid: Vec<bool>) -> Self {
        assert_eq!(grid.len(), width * height);
        Self {
            frame: GridFrame {
                yaw: 0.0,
                origin: Point2::origin(),
                resolution,
                width,
                height,
            },
            grid,
        }
    }

    pub fn resolution(&self) -> f64 {
        self.frame.resolution
    }

    /// World xy of the outer corner of cell (0, 0).
    pub fn origin(&self) -> Point2<f64> {
        self.frame.to_world(&self.frame.origin)
    }

    pub fn width(&self) -> usize {
        self.frame.width
    }

    pub fn height(&self) -> usize {
        self.frame.height
    }

    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.grid[self.frame.index(i, j)]
    }

    pub fn occupied_count(&self) -> usize {
        self.grid.iter().filter(|&&c| c).count()
    }

    pub fn free_count(&self) -> usize {
        self.grid.len() - self.occupied_count()
    }
}

/// Sizes of the 4-connected components of free cells, largest first.
pub fn flood_components(mask: &OccupancyMask) -> Vec<usize> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; w * h];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if mask.grid[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut size = 0;
        while let Some(idx) = queue.pop_front() {
            size += 1;
            let (i, j) = (idx % w, idx / w);
            let mut visit = |n: usize| {
                if !mask.grid[n] && !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            if i > 0 {
                visit(idx - 1);
            }
            if i + 1 < w {
                visit(idx + 1);
            }
            if j > 0 {
                visit(idx - w);
            }
            if j + 1 < h {
                visit(idx + w);
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Point3;

    #[test]
    fn all_free_single_component() {
        let mask = OccupancyMask::from_grid(10, 10, 1.0, vec![false; 100]);
        assert_eq!(flood_components(&mask), vec![100]);
    }

    #[test]
    fn column_split_sixty_forty() {
        // 11 columns: 6 free, 1 wall, 4 free; 10 rows.
        let grid = (0..110).map(|k| k % 11 == 6).collect();
        let mask = OccupancyMask::from_grid(11, 10, 1.0, grid);
        assert_eq!(flood_components(&mask), vec![60, 40]);
    }

    #[test]
    fn diagonal_gap_is_not_connected() {
        let grid = vec![false, true, true, false];
        let mask = OccupancyMask::from_grid(2, 2, 1.0, grid);
        assert_eq!(flood_components(&mask), vec![1, 1]);
    }

    #[test]
    fn square_occupies_exact_cells_when_aligned() {
        let frame = GridFrame::covering(&[Point2::new(-3.0, -3.0), Point2::new(3.0, 3.0)], 0.0, 0.05);
        assert_eq!((frame.width, frame.height), (122, 122));
        let t1 = Triangle::new(Point3::new(-0.5, -0.5, 1.0), Point3::new(0.5, -0.5, 1.0), Point3::new(0.5, 0.5, 1.0));
        let t2 = Triangle::new(Point3::new(-0.5, -0.5, 1.0), Point3::new(0.5, 0.5, 1.0), Point3::new(-0.5, 0.5, 1.0));
        let mut cells: Vec<usize> = frame.cells_under_triangle(&t1, false);
        cells.extend(frame.cells_under_triangle(&t2, false));
        cells.sort_unstable();
        cells.dedup();
        assert_eq!(cells.len(), 400);
    }

    #[test]
    fn flat_projection_only_when_requested() {
        let frame = GridFrame::covering(&[Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)], 0.0, 0.1);
        let wall = Triangle::new(Point3::new(0.25, 0.0, 0.0), Point3::new(0.25, 1.0, 0.0), Point3::new(0.25, 1.0, 2.0));
        assert!(frame.cells_under_triangle(&wall, false).is_empty());
        assert_eq!(frame.cells_under_triangle(&wall, true).len(), 12);
    }
}
