use std::collections::HashMap;
use std::path::{Path, PathBuf};

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::mesh_io::load_mesh;
use super::{ArchElement, ArchKind, ObjectInstance, RoomDecl, SceneError, SceneInstance, DEFAULT_FRONT_AXIS};
use crate::geometry::{RigidTransform, TriMesh};

/// Optional pre-rendered views of an object handed to the judge.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRefs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<PathBuf>,
}

impl ImageRefs {
    fn resolved(&self, base: &Path) -> ImageRefs {
        let r = |p: &Option<PathBuf>| p.as_ref().map(|p| base.join(p));
        ImageRefs {
            front: r(&self.front),
            scale: r(&self.scale),
            context: r(&self.context),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectEntry {
    pub id: String,
    pub mesh: PathBuf,
    /// Row-major `[R | t]`, local to world.
    pub transform: [f64; 12],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub frontless: bool,
    #[serde(default)]
    pub description: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images: Option<ImageRefs>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchEntry {
    pub id: String,
    pub kind: String,
    /// World-frame boundary polygon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 3]>>,
    /// World-frame mesh file, used when no polygon is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_normal: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoomEntry {
    pub id: String,
    pub room_type: String,
    pub floor_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ids: Option<Vec<String>>,
}

/// On-disk scene description. Relative paths resolve against the manifest's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneManifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub objects: Vec<ObjectEntry>,
    #[serde(default)]
    pub architecture: Vec<ArchEntry>,
    #[serde(default)]
    pub rooms: Vec<RoomEntry>,
}

impl SceneManifest {
    pub fn load(path: &Path) -> Result<Self, SceneError> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        serde_json::from_str(&text).map_err(|e| SceneError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), SceneError> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(path, text).map_err(|e| io_error(path, e))
    }

    /// Copy with every relative file reference joined onto `base`.
    pub fn with_base(&self, base: &Path) -> SceneManifest {
        let mut out = self.clone();
        for o in &mut out.objects {
            o.mesh = base.join(&o.mesh);
            o.images = o.images.as_ref().map(|i| i.resolved(base));
        }
        for a in &mut out.architecture {
            a.mesh = a.mesh.as_ref().map(|m| base.join(m));
        }
        out
    }

    /// Loads meshes and builds the scene. Relative paths resolve against `base`.
    pub fn build(&self, base: &Path, fallback_id: &str) -> Result<SceneInstance, SceneError> {
        let mut meshes: HashMap<PathBuf, TriMesh> = HashMap::new();
        let mut objects = Vec::with_capacity(self.objects.len());
        for entry in &self.objects {
            let path = base.join(&entry.mesh);
            let mesh = match meshes.get(&path) {
                Some(m) => m.clone(),
                None => {
                    let loaded = load_mesh(&path)?;
                    for w in &loaded.warnings {
                        log::warn!("{}: {w}", path.display());
                    }
                    meshes.insert(path.clone(), loaded.mesh.clone());
                    loaded.mesh
                }
            };
            let transform = RigidTransform::from_row_major(&entry.transform).map_err(|e| {
                SceneError::InvalidElement {
                    id: entry.id.clone(),
                    message: e.to_string(),
                }
            })?;
            let front = if entry.frontless {
                None
            } else {
                Some(entry.front_axis.map_or(DEFAULT_FRONT_AXIS, Vector3::from))
            };
            let obj = ObjectInstance::new(entry.id.clone(), entry.description.clone(), mesh, transform, front)?;
            let images = entry.images.as_ref().map(|i| i.resolved(base)).unwrap_or_default();
            objects.push(obj.with_images(images));
        }
        let mut architecture = Vec::with_capacity(self.architecture.len());
        for entry in &self.architecture {
            let kind: ArchKind = entry.kind.parse()?;
            let normal = entry.front_normal.map(Vector3::from);
            let element = match (&entry.polygon, &entry.mesh) {
                (Some(poly), _) => {
                    let pts = poly.iter().map(|p| Point3::from(*p)).collect();
                    ArchElement::from_polygon(entry.id.clone(), kind, pts, normal)?
                }
                (None, Some(mesh)) => {
                    let path = base.join(mesh);
                    let loaded = load_mesh(&path)?;
                    for w in &loaded.warnings {
                        log::warn!("{}: {w}", path.display());
                    }
                    ArchElement::from_triangles(entry.id.clone(), kind, loaded.mesh.triangles().collect(), normal)?
                }
                (None, None) => {
                    return Err(SceneError::InvalidElement {
                        id: entry.id.clone(),
                        message: "neither polygon nor mesh given".into(),
                    })
                }
            };
            architecture.push(element);
        }
        let rooms = self
            .rooms
            .iter()
            .map(|r| RoomDecl {
                id: r.id.clone(),
                room_type: r.room_type.clone(),
                floor_ids: r.floor_ids.clone(),
                wall_ids: r.wall_ids.clone(),
            })
            .collect();
        let id = self.id.clone().unwrap_or_else(|| fallback_id.to_string());
        SceneInstance::new(id, objects, architecture, rooms)
    }
}

/// Reads a manifest and every mesh it references. The scene id defaults to the name of
/// the manifest's parent directory.
pub fn load_scene(manifest_path: &Path) -> Result<SceneInstance, SceneError> {
    if !manifest_path.is_file() {
        return Err(SceneError::MissingFile(manifest_path.to_path_buf()));
    }
    let manifest = SceneManifest::load(manifest_path)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let fallback = base
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scene".into());
    manifest.build(base, &fallback)
}

fn io_error(path: &Path, e: std::io::Error) -> SceneError {
    if e.kind() == std::io::ErrorKind::NotFound {
        SceneError::MissingFile(path.to_path_buf())
    } else {
        SceneError::Io {
            path: path.to_path_buf(),
            source: e,
        }
    }
}
