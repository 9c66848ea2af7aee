use nalgebra::Point2;

use super::{ArchKind, SceneInstance};
use crate::geometry::{GridFrame, OccupancyMask};

/// Occupancy split into a static layer (walls and off-floor cells) and one cell list
/// per object, so masks can be rebuilt with individual objects left out.
#[derive(Clone, Debug)]
pub struct SceneOccupancy {
    pub frame: GridFrame,
    pub static_layer: Vec<bool>,
    pub object_cells: Vec<Vec<usize>>,
}

impl SceneOccupancy {
    /// Grid aligned with the first floor edge, covering every floor plus one cell.
    /// Floor cells are those whose center lies on a floor; walls occupy every cell
    /// they touch; objects occupy cells their non-vertical faces overlap with area.
    pub fn build(scene: &SceneInstance, resolution: f64) -> Self {
        let floor_pts: Vec<Point2<f64>> = scene
            .floors()
            .flat_map(|f| f.geometry().vertices())
            .map(|v| Point2::new(v.x, v.y))
            .collect();
        let frame = GridFrame::covering(&floor_pts, scene.grid_yaw(), resolution);
        let mut on_floor = vec![false; frame.len()];
        for f in scene.floors() {
            for t in f.geometry().triangles() {
                let pts = t.vertices().map(|v| frame.to_frame(&Point2::new(v.x, v.y)));
                for c in frame.cells_with_center_in(&pts) {
                    on_floor[c] = true;
                }
            }
        }
        let mut static_layer: Vec<bool> = on_floor.iter().map(|f| !f).collect();
        for w in scene.elements_of(ArchKind::Wall) {
            for t in w.geometry().triangles() {
                for c in frame.cells_under_triangle(t, true) {
                    static_layer[c] = true;
                }
            }
        }
        let object_cells = scene
            .objects
            .iter()
            .map(|o| {
                let mut cells: Vec<usize> = o
                    .world_mesh()
                    .triangles()
                    .iter()
                    .flat_map(|t| frame.cells_under_triangle(t, false))
                    .collect();
                cells.sort_unstable();
                cells.dedup();
                cells
            })
            .collect();
        Self {
            frame,
            static_layer,
            object_cells,
        }
    }

    pub fn mask(&self) -> OccupancyMask {
        self.mask_excluding(None)
    }

    /// Full mask, optionally leaving out the object at index `skip`.
    pub fn mask_excluding(&self, skip: Option<usize>) -> OccupancyMask {
        let mut grid = self.static_layer.clone();
        for (i, cells) in self.object_cells.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            for &c in cells {
                grid[c] = true;
            }
        }
        OccupancyMask {
            frame: self.frame,
            grid,
        }
    }
}

pub fn rasterize_occupancy(scene: &SceneInstance, resolution: f64) -> OccupancyMask {
    SceneOccupancy::build(scene, resolution).mask()
}

#[cfg(test)]
mod tests {
    use nalgebra::{Point3, Vector3};

    use super::*;
    use crate::geometry::{flood_components, RigidTransform, TriMesh};
    use crate::scene::{ArchElement, ObjectInstance};

    fn room(size: f64, objects: Vec<ObjectInstance>, walls: Vec<ArchElement>) -> SceneInstance {
        let floor = ArchElement::from_polygon(
            "floor",
            ArchKind::Floor,
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(size, 0.0, 0.0),
                Point3::new(size, size, 0.0),
                Point3::new(0.0, size, 0.0),
            ],
            None,
        )
        .unwrap();
        let mut arch = vec![floor];
        arch.extend(walls);
        SceneInstance::new("s", objects, arch, vec![]).unwrap()
    }

    fn is_interior(mask: &OccupancyMask, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < mask.width() && j + 1 < mask.height()
    }

    #[test]
    fn empty_room_has_free_interior() {
        let mask = rasterize_occupancy(&room(6.0, vec![], vec![]), 0.05);
        assert_eq!(mask.width(), 122);
        let mut occupied_interior = 0;
        for j in 0..mask.height() {
            for i in 0..mask.width() {
                if is_interior(&mask, i, j) && mask.is_occupied(i, j) {
                    occupied_interior += 1;
                }
            }
        }
        assert_eq!(occupied_interior, 0);
        assert_eq!(mask.free_count(), 120 * 120);
    }

    #[test]
    fn centered_box_occupies_its_area() {
        let mesh = TriMesh::cuboid(Vector3::new(0.5, 0.5, 0.4));
        let obj = ObjectInstance::new("b", "", mesh, RigidTransform::from_translation(3.0, 3.0, 0.4), None).unwrap();
        let mask = rasterize_occupancy(&room(6.0, vec![obj], vec![]), 0.05);
        let interior_occupied = 120 * 120 - mask.free_count();
        assert!((interior_occupied as i64 - 400).abs() <= 4 * 21, "{interior_occupied}");
    }

    #[test]
    fn spanning_wall_splits_room() {
        let wall = ArchElement::from_polygon(
            "w",
            ArchKind::Wall,
            vec![
                Point3::new(2.4, 0.0, 0.0),
                Point3::new(2.4, 4.0, 0.0),
                Point3::new(2.4, 4.0, 2.5),
                Point3::new(2.4, 0.0, 2.5),
            ],
            Some(Vector3::x()),
        )
        .unwrap();
        let mask = rasterize_occupancy(&room(4.0, vec![], vec![wall]), 0.1);
        let comps = flood_components(&mask);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps.iter().sum::<usize>(), mask.free_count());
        // A zero-thickness wall on a cell boundary blocks the two cells it touches.
        assert_eq!(40 * 40 - mask.free_count(), 2 * 40);
    }

    #[test]
    fn excluding_an_object_frees_its_cells() {
        let mesh = TriMesh::cuboid(Vector3::new(0.5, 0.5, 0.4));
        let obj = ObjectInstance::new("b", "", mesh, RigidTransform::from_translation(2.0, 2.0, 0.4), None).unwrap();
        let occ = SceneOccupancy::build(&room(4.0, vec![obj], vec![]), 0.1);
        assert_eq!(occ.mask_excluding(Some(0)).free_count(), 40 * 40);
        assert_eq!(occ.mask().free_count(), 40 * 40 - 100);
    }
}
