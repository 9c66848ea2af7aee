use std::path::Path;

use nalgebra::{Matrix4, Point3};

use super::SceneError;
use crate::geometry::TriMesh;

/// A mesh plus non-fatal problems found while loading it.
#[derive(Clone, Debug)]
pub struct LoadedMesh {
    pub mesh: TriMesh,
    pub warnings: Vec<String>,
}

/// Loads an OBJ or binary glTF file. OBJ coordinates are taken as Z-up; glTF's Y-up
/// axes are rotated to Z-up. Degenerate triangles are dropped with a warning.
pub fn load_mesh(path: &Path) -> Result<LoadedMesh, SceneError> {
    if !path.is_file() {
        return Err(SceneError::MissingFile(path.to_path_buf()));
    }
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    let mut mesh = match ext.as_str() {
        "obj" => load_obj(path)?,
        "glb" | "gltf" => load_gltf(path)?,
        _ => return Err(mesh_error(path, format!("unsupported mesh format '{ext}'"))),
    };
    let mut warnings = Vec::new();
    let removed = mesh.remove_degenerate();
    if removed > 0 {
        warnings.push(format!("dropped {removed} degenerate triangles"));
    }
    if mesh.triangle_count() == 0 {
        return Err(mesh_error(path, "no non-degenerate triangles".into()));
    }
    let open = mesh.non_manifold_edge_count();
    if open > 0 {
        warnings.push(format!("{open} non-manifold or boundary edges"));
    }
    Ok(LoadedMesh { mesh, warnings })
}

fn mesh_error(path: &Path, message: String) -> SceneError {
    SceneError::Mesh {
        path: path.to_path_buf(),
        message,
    }
}

fn load_obj(path: &Path) -> Result<TriMesh, SceneError> {
    let options = tobj::LoadOptions {
        single_index: true,
        triangulate: true,
        ignore_points: true,
        ignore_lines: true,
    };
    let (models, _materials) = tobj::load_obj(path, &options).map_err(|e| mesh_error(path, e.to_string()))?;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for m in &models {
        let offset = vertices.len() as u32;
        vertices.extend(
            m.mesh
                .positions
                .chunks_exact(3)
                .map(|p| Point3::new(p[0] as f64, p[1] as f64, p[2] as f64)),
        );
        triangles.extend(
            m.mesh
                .indices
                .chunks_exact(3)
                .map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]),
        );
    }
    TriMesh::new(vertices, triangles).map_err(|e| mesh_error(path, e.to_string()))
}

fn load_gltf(path: &Path) -> Result<TriMesh, SceneError> {
    let (doc, buffers, _images) = gltf::import(path).map_err(|e| mesh_error(path, e.to_string()))?;
    // glTF is Y-up; (x, y, z) -> (x, -z, y).
    #[rustfmt::skip]
    let y_up_to_z_up = Matrix4::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, -1.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
    );
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let scene = doc
        .default_scene()
        .or_else(|| doc.scenes().next())
        .ok_or_else(|| mesh_error(path, "no scene".into()))?;
    let mut stack: Vec<(gltf::Node, Matrix4<f64>)> = scene.nodes().map(|n| (n, y_up_to_z_up)).collect();
    while let Some((node, parent)) = stack.pop() {
        let local = node.transform().matrix();
        let local = Matrix4::from_fn(|r, c| local[c][r] as f64);
        let world = parent * local;
        if let Some(mesh) = node.mesh() {
            for prim in mesh.primitives() {
                if prim.mode() != gltf::mesh::Mode::Triangles {
                    continue;
                }
                let reader = prim.reader(|b| buffers.get(b.index()).map(|d| &d.0[..]));
                let Some(positions) = reader.read_positions() else {
                    continue;
                };
                let offset = vertices.len() as u32;
                let count_before = vertices.len();
                vertices.extend(positions.map(|p| {
                    world.transform_point(&Point3::new(p[0] as f64, p[1] as f64, p[2] as f64))
                }));
                let n = (vertices.len() - count_before) as u32;
                let indices: Vec<u32> = match reader.read_indices() {
                    Some(ix) => ix.into_u32().collect(),
                    None => (0..n).collect(),
                };
                triangles.extend(
                    indices
                        .chunks_exact(3)
                        .map(|t| [t[0] + offset, t[1] + offset, t[2] + offset]),
                );
            }
        }
        stack.extend(node.children().map(|c| (c, world)));
    }
    TriMesh::new(vertices, triangles).map_err(|e| mesh_error(path, e.to_string()))
}
