//! Mesh export: Wavefront OBJ and binary glTF 2.0.

mod gltf;
mod obj;

pub use gltf::write_glb;
pub use obj::write_obj;

use std::path::Path;

/// Output container chosen from a file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Glb,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "obj" => Some(MeshFormat::Obj),
            "glb" => Some(MeshFormat::Glb),
            _ => None,
        }
    }
}

pub fn export_mesh(mesh: &crate::mesh::TriangleMesh, format: MeshFormat) -> Vec<u8> {
    match format {
        MeshFormat::Obj => write_obj(mesh).into_bytes(),
        MeshFormat::Glb => write_glb(mesh),
    }
}
