//! Scene data model: objects placed by rigid transforms, architectural elements in
//! world frame, and room regions. Loaded from a JSON manifest plus OBJ / glb meshes.

mod manifest;
mod mesh_io;
mod occupancy;

use std::collections::HashSet;
use std::path::PathBuf;

use nalgebra::{Point2, Point3, Rotation2, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    polygon_planarity, triangulate_polygon, GeometryError, Obb, RigidTransform, TriMesh, Triangle, WorldMesh,
};

pub use manifest::{load_scene, ArchEntry, ImageRefs, ObjectEntry, RoomEntry, SceneManifest};
pub use mesh_io::{load_mesh, LoadedMesh};
pub use occupancy::{rasterize_occupancy, SceneOccupancy};

/// Local front used when a manifest does not give one.
pub const DEFAULT_FRONT_AXIS: Vector3<f64> = Vector3::new(0.0, 1.0, 0.0);
/// Allowed out-of-plane deviation for floor polygons (m).
pub const FLOOR_PLANARITY_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("missing file: {0}")]
    MissingFile(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("unknown architecture kind '{0}'")]
    UnknownArchKind(String),
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("invalid element '{id}': {message}")]
    InvalidElement { id: String, message: String },
    #[error("invalid room '{id}': {message}")]
    InvalidRoom { id: String, message: String },
    #[error("mesh error in {path}: {message}")]
    Mesh { path: PathBuf, message: String },
    #[error("object '{0}' has no front vector")]
    NoFrontVector(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchKind {
    Wall,
    Floor,
    Ceiling,
    Window,
    Door,
}

impl ArchKind {
    pub const ALL: [ArchKind; 5] = [
        ArchKind::Wall,
        ArchKind::Floor,
        ArchKind::Ceiling,
        ArchKind::Window,
        ArchKind::Door,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ArchKind::Wall => "wall",
            ArchKind::Floor => "floor",
            ArchKind::Ceiling => "ceiling",
            ArchKind::Window => "window",
            ArchKind::Door => "door",
        }
    }
}

impl std::str::FromStr for ArchKind {
    type Err = SceneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArchKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| SceneError::UnknownArchKind(s.to_string()))
    }
}

impl std::fmt::Display for ArchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Longer and shorter horizontal side of an object's box (m).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectFootprint {
    pub longer_side_o: f64,
    pub shorter_side: f64,
}

impl ObjectFootprint {
    /// Horizontal extents of the box, taken along its two non-vertical axes.
    pub fn of_obb(obb: &Obb) -> Self {
        let up = obb.vertical_axis();
        let sides: Vec<f64> = (0..3).filter(|&i| i != up).map(|i| 2.0 * obb.half_extents[i]).collect();
        Self {
            longer_side_o: sides[0].max(sides[1]),
            shorter_side: sides[0].min(sides[1]),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ObjectInstance {
    pub id: String,
    pub description: String,
    /// Local-frame mesh (m).
    pub mesh: TriMesh,
    pub transform: RigidTransform,
    pub obb: Obb,
    /// Unit local-frame front; `None` for frontless objects.
    pub front_axis: Option<Vector3<f64>>,
    pub image_refs: ImageRefs,
    pub footprint: ObjectFootprint,
    world: WorldMesh,
}

impl ObjectInstance {
    pub fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        mut mesh: TriMesh,
        transform: RigidTransform,
        front_axis: Option<Vector3<f64>>,
    ) -> Result<Self, SceneError> {
        let id = id.into();
        let removed = mesh.remove_degenerate();
        if removed > 0 {
            log::warn!("object '{id}': dropped {removed} degenerate triangles");
        }
        if mesh.triangle_count() == 0 {
            return Err(SceneError::InvalidElement {
                id,
                message: "mesh has no non-degenerate triangles".into(),
            });
        }
        let front_axis = match front_axis {
            Some(f) => {
                let n = f.norm();
                if !n.is_finite() || n < 1e-9 {
                    return Err(SceneError::InvalidElement {
                        id,
                        message: "front axis has zero length".into(),
                    });
                }
                Some(f / n)
            }
            None => None,
        };
        let obb = Obb::from_local_aabb(&mesh.aabb(), &transform);
        let world = WorldMesh::from_mesh(&mesh, &transform);
        Ok(Self {
            id,
            description: description.into(),
            footprint: ObjectFootprint::of_obb(&obb),
            mesh,
            transform,
            obb,
            front_axis,
            image_refs: ImageRefs::default(),
            world,
        })
    }

    pub fn with_images(mut self, image_refs: ImageRefs) -> Self {
        self.image_refs = image_refs;
        self
    }

    /// Triangles in world frame with a BVH.
    pub fn world_mesh(&self) -> &WorldMesh {
        &self.world
    }

    pub fn centroid(&self) -> Point3<f64> {
        self.obb.center
    }

    pub fn transformed(&self, t: &RigidTransform) -> ObjectInstance {
        let transform = t.compose(&self.transform);
        ObjectInstance {
            id: self.id.clone(),
            description: self.description.clone(),
            mesh: self.mesh.clone(),
            obb: Obb::from_local_aabb(&self.mesh.aabb(), &transform),
            world: self.world.transformed(t),
            transform,
            front_axis: self.front_axis,
            image_refs: self.image_refs.clone(),
            footprint: self.footprint,
        }
    }
}

/// The object's front direction in world frame.
pub fn world_front_vector(obj: &ObjectInstance) -> Result<Vector3<f64>, SceneError> {
    let f = obj.front_axis.ok_or_else(|| SceneError::NoFrontVector(obj.id.clone()))?;
    Ok(obj.transform.apply_vector(&f).normalize())
}

#[derive(Clone, Debug)]
pub struct ArchElement {
    pub id: String,
    pub kind: ArchKind,
    /// Boundary polygon when the element was declared as one.
    pub polygon: Option<Vec<Point3<f64>>>,
    /// Unit normal pointing into the room (walls).
    pub front_normal: Option<Vector3<f64>>,
    geometry: WorldMesh,
}

impl ArchElement {
    pub fn from_polygon(
        id: impl Into<String>,
        kind: ArchKind,
        polygon: Vec<Point3<f64>>,
        front_normal: Option<Vector3<f64>>,
    ) -> Result<Self, SceneError> {
        let id = id.into();
        if kind == ArchKind::Floor {
            let dev = polygon_planarity(&polygon);
            if dev > FLOOR_PLANARITY_TOL {
                return Err(SceneError::InvalidElement {
                    id,
                    message: format!("floor polygon deviates {dev:.3e} m from its plane"),
                });
            }
        }
        let tris = triangulate_polygon(&polygon).map_err(|e| SceneError::InvalidElement {
            id: id.clone(),
            message: e.to_string(),
        })?;
        Self::build(id, kind, tris, Some(polygon), front_normal)
    }

    pub fn from_triangles(
        id: impl Into<String>,
        kind: ArchKind,
        triangles: Vec<Triangle>,
        front_normal: Option<Vector3<f64>>,
    ) -> Result<Self, SceneError> {
        Self::build(id.into(), kind, triangles, None, front_normal)
    }

    fn build(
        id: String,
        kind: ArchKind,
        triangles: Vec<Triangle>,
        polygon: Option<Vec<Point3<f64>>>,
        front_normal: Option<Vector3<f64>>,
    ) -> Result<Self, SceneError> {
        if triangles.is_empty() {
            return Err(SceneError::InvalidElement {
                id,
                message: "no geometry".into(),
            });
        }
        let front_normal = match front_normal {
            Some(n) if n.norm() > 1e-9 => Some(n.normalize()),
            Some(_) => {
                return Err(SceneError::InvalidElement {
                    id,
                    message: "front normal has zero length".into(),
                })
            }
            None if kind == ArchKind::Wall => {
                return Err(SceneError::InvalidElement {
                    id,
                    message: "wall without front normal".into(),
                })
            }
            None => None,
        };
        Ok(Self {
            id,
            kind,
            polygon,
            front_normal,
            geometry: WorldMesh::new(triangles),
        })
    }

    pub fn geometry(&self) -> &WorldMesh {
        &self.geometry
    }

    /// Yaw of the first boundary edge projected on the floor plane (radians).
    pub fn footprint_yaw(&self) -> f64 {
        let (a, b) = match &self.polygon {
            Some(p) => (p[0], p[1]),
            None => {
                let t = &self.geometry.triangles()[0];
                (t.a, t.b)
            }
        };
        (b.y - a.y).atan2(b.x - a.x)
    }

    pub fn transformed(&self, t: &RigidTransform) -> ArchElement {
        ArchElement {
            id: self.id.clone(),
            kind: self.kind,
            polygon: self
                .polygon
                .as_ref()
                .map(|p| p.iter().map(|v| t.apply_point(v)).collect()),
            front_normal: self.front_normal.map(|n| t.apply_vector(&n)),
            geometry: self.geometry.transformed(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoomRegion {
    pub id: String,
    pub room_type: String,
    pub floor_ids: Vec<String>,
    /// Walls bounding the room; all scene walls when the manifest gives none.
    pub wall_ids: Vec<String>,
    pub centroid_2d: Point2<f64>,
    pub mean_dimension_r: f64,
}

impl RoomRegion {
    /// Derives the centroid (area-weighted over floor triangles) and the mean 2D
    /// extent, measured in the frame of the first floor's first edge.
    pub fn derive(
        id: impl Into<String>,
        room_type: impl Into<String>,
        floor_ids: Vec<String>,
        wall_ids: Vec<String>,
        architecture: &[ArchElement],
    ) -> Result<Self, SceneError> {
        let id = id.into();
        let invalid = |message: String| SceneError::InvalidRoom {
            id: id.clone(),
            message,
        };
        if floor_ids.is_empty() {
            return Err(invalid("no floors".into()));
        }
        let mut floors = Vec::new();
        for fid in &floor_ids {
            match architecture.iter().find(|a| &a.id == fid) {
                Some(a) if a.kind == ArchKind::Floor => floors.push(a),
                Some(_) => return Err(invalid(format!("'{fid}' is not a floor"))),
                None => return Err(invalid(format!("unknown floor '{fid}'"))),
            }
        }
        for wid in &wall_ids {
            match architecture.iter().find(|a| &a.id == wid) {
                Some(a) if a.kind == ArchKind::Wall => {}
                Some(_) => return Err(invalid(format!("'{wid}' is not a wall"))),
                None => return Err(invalid(format!("unknown wall '{wid}'"))),
            }
        }
        let rot = Rotation2::new(-floors[0].footprint_yaw());
        let (mut area, mut acc) = (0.0, nalgebra::Vector2::zeros());
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for f in &floors {
            for t in f.geometry.triangles() {
                let pts = t.vertices().map(|v| Point2::new(v.x, v.y));
                let a = ((pts[1] - pts[0]).perp(&(pts[2] - pts[0])) / 2.0).abs();
                area += a;
                acc += (pts[0].coords + pts[1].coords + pts[2].coords) / 3.0 * a;
                for p in pts {
                    let q = rot * p;
                    lo = lo.inf(&q);
                    hi = hi.sup(&q);
                }
            }
        }
        if area <= 0.0 {
            return Err(invalid("floors have no horizontal area".into()));
        }
        let r = ((hi.x - lo.x) + (hi.y - lo.y)) / 2.0;
        Ok(Self {
            id: id.clone(),
            room_type: room_type.into(),
            floor_ids,
            wall_ids,
            centroid_2d: Point2::from(acc / area),
            mean_dimension_r: r,
        })
    }
}

/// Lowercase with spaces and hyphens folded to underscores.
pub fn normalize_room_type(s: &str) -> String {
    s.trim()
        .to_lowercase()
        .chars()
        .map(|c| if c == ' ' || c == '-' { '_' } else { c })
        .collect()
}

/// Room declaration before derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoomDecl {
    pub id: String,
    pub room_type: String,
    pub floor_ids: Vec<String>,
    pub wall_ids: Option<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct SceneInstance {
    pub id: String,
    pub objects: Vec<ObjectInstance>,
    pub architecture: Vec<ArchElement>,
    pub rooms: Vec<RoomRegion>,
    decls: Vec<RoomDecl>,
}

impl SceneInstance {
    /// Validates ids and derives rooms. Without declared rooms but with floors, one room
    /// of type "room" spanning every floor and wall is created.
    pub fn new(
        id: impl Into<String>,
        objects: Vec<ObjectInstance>,
        architecture: Vec<ArchElement>,
        rooms: Vec<RoomDecl>,
    ) -> Result<Self, SceneError> {
        let mut seen = HashSet::new();
        for o in &objects {
            if !seen.insert(o.id.as_str()) {
                return Err(SceneError::DuplicateId(o.id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for a in &architecture {
            if !seen.insert(a.id.as_str()) {
                return Err(SceneError::DuplicateId(a.id.clone()));
            }
        }
        let all_walls: Vec<String> = architecture
            .iter()
            .filter(|a| a.kind == ArchKind::Wall)
            .map(|a| a.id.clone())
            .collect();
        let decls = if rooms.is_empty() {
            let floors: Vec<String> = architecture
                .iter()
                .filter(|a| a.kind == ArchKind::Floor)
                .map(|a| a.id.clone())
                .collect();
            if floors.is_empty() {
                Vec::new()
            } else {
                vec![RoomDecl {
                    id: "room".into(),
                    room_type: "room".into(),
                    floor_ids: floors,
                    wall_ids: None,
                }]
            }
        } else {
            rooms
        };
        let mut regions = Vec::with_capacity(decls.len());
        for d in &decls {
            let walls = d.wall_ids.clone().unwrap_or_else(|| all_walls.clone());
            regions.push(RoomRegion::derive(
                d.id.clone(),
                d.room_type.clone(),
                d.floor_ids.clone(),
                walls,
                &architecture,
            )?);
        }
        Ok(Self {
            id: id.into(),
            objects,
            architecture,
            rooms: regions,
            decls,
        })
    }

    pub fn object(&self, id: &str) -> Option<&ObjectInstance> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn object_index(&self, id: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.id == id)
    }

    pub fn element(&self, id: &str) -> Option<&ArchElement> {
        self.architecture.iter().find(|a| a.id == id)
    }

    pub fn elements_of(&self, kind: ArchKind) -> impl Iterator<Item = &ArchElement> + '_ {
        self.architecture.iter().filter(move |a| a.kind == kind)
    }

    pub fn floors(&self) -> impl Iterator<Item = &ArchElement> + '_ {
        self.elements_of(ArchKind::Floor)
    }

    pub fn walls(&self) -> impl Iterator<Item = &ArchElement> + '_ {
        self.elements_of(ArchKind::Wall)
    }

    pub fn room_walls<'a>(&'a self, room: &'a RoomRegion) -> impl Iterator<Item = &'a ArchElement> + 'a {
        room.wall_ids.iter().filter_map(move |w| self.element(w))
    }

    pub fn room_floors<'a>(&'a self, room: &'a RoomRegion) -> impl Iterator<Item = &'a ArchElement> + 'a {
        room.floor_ids.iter().filter_map(move |f| self.element(f))
    }

    /// Rooms whose type matches `room_type` after normalization.
    pub fn rooms_of_type<'a>(&'a self, room_type: &str) -> impl Iterator<Item = &'a RoomRegion> + 'a {
        let wanted = normalize_room_type(room_type);
        self.rooms
            .iter()
            .filter(move |r| normalize_room_type(&r.room_type) == wanted)
    }

    /// Yaw used to align occupancy grids: the first floor's first edge, or 0.
    pub fn grid_yaw(&self) -> f64 {
        self.floors().next().map_or(0.0, |f| f.footprint_yaw())
    }

    /// The whole scene (objects, architecture, rooms) moved by one rigid motion.
    pub fn transformed(&self, t: &RigidTransform) -> SceneInstance {
        let architecture: Vec<ArchElement> = self.architecture.iter().map(|a| a.transformed(t)).collect();
        let objects = self.objects.iter().map(|o| o.transformed(t)).collect();
        Self::new(self.id.clone(), objects, architecture, self.decls.clone())
            .expect("rigid motion preserves scene validity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_cube(id: &str, t: RigidTransform) -> ObjectInstance {
        let mesh = TriMesh::cuboid_between(Point3::new(-0.5, -0.5, 0.0), Point3::new(0.5, 0.5, 1.0));
        ObjectInstance::new(id, "cube", mesh, t, Some(DEFAULT_FRONT_AXIS)).unwrap()
    }

    fn square_floor(id: &str, s: f64) -> ArchElement {
        let poly = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(s, 0.0, 0.0),
            Point3::new(s, s, 0.0),
            Point3::new(0.0, s, 0.0),
        ];
        ArchElement::from_polygon(id, ArchKind::Floor, poly, None).unwrap()
    }

    #[test]
    fn front_vector_follows_yaw() {
        let cases = [(0.0, Vector3::y()), (PI / 2.0, -Vector3::x()), (PI, -Vector3::y())];
        for (yaw, want) in cases {
            let obj = unit_cube("a", RigidTransform::from_yaw(yaw, Vector3::zeros()));
            let f = world_front_vector(&obj).unwrap();
            assert!((f - want).norm() < 1e-12, "yaw {yaw}: {f:?}");
        }
    }

    #[test]
    fn frontless_object_errors() {
        let mesh = TriMesh::cuboid(Vector3::repeat(0.5));
        let obj = ObjectInstance::new("a", "", mesh, RigidTransform::identity(), None).unwrap();
        assert!(matches!(world_front_vector(&obj), Err(SceneError::NoFrontVector(_))));
    }

    #[test]
    fn obb_of_translated_cube() {
        let obj = unit_cube("a", RigidTransform::from_translation(1.0, 2.0, 0.0));
        assert!((obj.obb.center - Point3::new(1.0, 2.0, 0.5)).norm() < 1e-12);
        assert!((obj.obb.half_extents - Vector3::repeat(0.5)).norm() < 1e-12);
        for v in obj.world_mesh().vertices() {
            assert!(obj.obb.contains(&v, 1e-9));
        }
    }

    #[test]
    fn footprint_orders_sides() {
        let mesh = TriMesh::cuboid(Vector3::new(0.3, 1.0, 0.4));
        let obj = ObjectInstance::new("t", "", mesh, RigidTransform::from_yaw(0.7, Vector3::zeros()), None).unwrap();
        assert!((obj.footprint.longer_side_o - 2.0).abs() < 1e-12);
        assert!((obj.footprint.shorter_side - 0.6).abs() < 1e-12);
    }

    #[test]
    fn wall_requires_front_normal() {
        let poly = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(4.0, 0.0, 0.0),
            Point3::new(4.0, 0.0, 2.5),
            Point3::new(0.0, 0.0, 2.5),
        ];
        assert!(ArchElement::from_polygon("w", ArchKind::Wall, poly.clone(), None).is_err());
        assert!(ArchElement::from_polygon("w", ArchKind::Wall, poly, Some(Vector3::y())).is_ok());
    }

    #[test]
    fn warped_floor_is_rejected() {
        let poly = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(4.0, 0.0, 0.0),
            Point3::new(4.0, 4.0, 0.01),
            Point3::new(0.0, 4.0, 0.0),
        ];
        assert!(ArchElement::from_polygon("f", ArchKind::Floor, poly, None).is_err());
    }

    #[test]
    fn room_derivation() {
        let arch = vec![square_floor("f", 4.0)];
        let room = RoomRegion::derive("r", "bedroom", vec!["f".into()], vec![], &arch).unwrap();
        assert!((room.centroid_2d - Point2::new(2.0, 2.0)).norm() < 1e-12);
        assert!((room.mean_dimension_r - 4.0).abs() < 1e-12);
        assert!(RoomRegion::derive("r", "x", vec![], vec![], &arch).is_err());
        assert!(RoomRegion::derive("r", "x", vec!["nope".into()], vec![], &arch).is_err());
    }

    #[test]
    fn default_room_and_duplicates() {
        let scene = SceneInstance::new("s", vec![], vec![square_floor("f", 3.0)], vec![]).unwrap();
        assert_eq!(scene.rooms.len(), 1);
        assert_eq!(scene.rooms[0].floor_ids, vec!["f".to_string()]);
        let objs = vec![
            unit_cube("a", RigidTransform::identity()),
            unit_cube("a", RigidTransform::identity()),
        ];
        assert!(matches!(
            SceneInstance::new("s", objs, vec![], vec![]),
            Err(SceneError::DuplicateId(_))
        ));
    }

    #[test]
    fn room_type_matching_is_normalized() {
        let decl = RoomDecl {
            id: "r".into(),
            room_type: "Living Room".into(),
            floor_ids: vec!["f".into()],
            wall_ids: None,
        };
        let scene = SceneInstance::new("s", vec![], vec![square_floor("f", 3.0)], vec![decl]).unwrap();
        assert_eq!(scene.rooms_of_type("living_room").count(), 1);
        assert_eq!(scene.rooms_of_type("kitchen").count(), 0);
    }

    #[test]
    fn whole_scene_motion_moves_rooms() {
        let scene = SceneInstance::new(
            "s",
            vec![unit_cube("a", RigidTransform::from_translation(1.0, 1.0, 0.0))],
            vec![square_floor("f", 4.0)],
            vec![],
        )
        .unwrap();
        let t = RigidTransform::from_yaw(0.4, Vector3::new(3.0, -1.0, 0.0));
        let moved = scene.transformed(&t);
        let c = t.apply_point(&Point3::new(2.0, 2.0, 0.0));
        assert!((moved.rooms[0].centroid_2d - Point2::new(c.x, c.y)).norm() < 1e-9);
        assert!((moved.rooms[0].mean_dimension_r - 4.0).abs() < 1e-9);
        let o = t.apply_point(&scene.objects[0].obb.center);
        assert!((moved.objects[0].obb.center - o).norm() < 1e-12);
    }
}
