//! Indexed triangle meshes.

use nalgebra::{Similarity3, Vector3};

use crate::error::{EngineError, Result};

pub type Rgba = [f32; 4];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vector3<f64>>,
    pub normals: Vec<Vector3<f64>>,
    pub colors: Vec<Rgba>,
    pub indices: Vec<u32>,
}

/// Axis-aligned bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn center(&self) -> Vector3<f64> {
        (self.min + self.max) * 0.5
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

impl TriangleMesh {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.indices.len() / 3
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn triangles(&self) -> impl Iterator<Item = [u32; 3]> + '_ {
        self.indices.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    pub fn bounds(&self) -> Option<Aabb> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold(Aabb { min: first, max: first }, |b, v| Aabb {
            min: b.min.inf(v),
            max: b.max.sup(v),
        }))
    }

    /// Checks the structural invariants: matching array lengths, index
    /// range, unit normals, finite data.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len();
        if self.normals.len() != n || self.colors.len() != n {
            return Err(EngineError::InvalidInput("mesh attribute arrays differ in length".into()));
        }
        if !self.indices.len().is_multiple_of(3) {
            return Err(EngineError::InvalidInput("index count is not a multiple of 3".into()));
        }
        if let Some(i) = self.indices.iter().find(|&&i| i as usize >= n) {
            return Err(EngineError::InvalidInput(format!("index {i} out of range for {n} vertices")));
        }
        let finite = self.vertices.iter().chain(&self.normals).all(|v| v.iter().all(|c| c.is_finite()))
            && self.colors.iter().all(|c| c.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(EngineError::InvalidInput("mesh contains non-finite values".into()));
        }
        if self.normals.iter().any(|nrm| (nrm.norm() - 1.0).abs() > 1e-5) {
            return Err(EngineError::InvalidInput("mesh normal is not unit length".into()));
        }
        Ok(())
    }

    /// Applies a similarity transform to positions and rotates normals.
    pub fn transformed(&self, xf: &Similarity3<f64>) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|v| xf.transform_point(&(*v).into()).coords).collect(),
            normals: self.normals.iter().map(|n| xf.isometry.rotation * n).collect(),
            colors: self.colors.clone(),
            indices: self.indices.clone(),
        }
    }
}

/// Concatenates meshes, re-basing each mesh's indices past the vertices
/// that precede it.
pub fn merge_meshes(meshes: &[TriangleMesh]) -> TriangleMesh {
    let mut out = TriangleMesh::default();
    for m in meshes {
        let base = out.vertices.len() as u32;
        out.vertices.extend_from_slice(&m.vertices);
        out.normals.extend_from_slice(&m.normals);
        out.colors.extend_from_slice(&m.colors);
        out.indices.extend(m.indices.iter().map(|i| i + base));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad_strip(verts: usize) -> TriangleMesh {
        let vertices: Vec<_> = (0..verts).map(|i| Vector3::new((i / 2) as f64, (i % 2) as f64, 0.0)).collect();
        let indices = (0..(verts as u32 / 2 - 1))
            .flat_map(|k| [2 * k, 2 * k + 2, 2 * k + 1, 2 * k + 1, 2 * k + 2, 2 * k + 3])
            .collect();
        TriangleMesh {
            normals: vec![Vector3::z(); verts],
            colors: vec![[1.0, 0.0, 0.0, 1.0]; verts],
            vertices,
            indices,
        }
    }

    #[test]
    fn merge_of_nothing_is_empty() {
        assert_eq!(merge_meshes(&[]), TriangleMesh::default());
    }

    #[test]
    fn merge_of_one_is_identity() {
        let m = quad_strip(6);
        assert_eq!(merge_meshes(std::slice::from_ref(&m)), m);
    }

    #[test]
    fn merge_rebases_indices() {
        let (a, b) = (quad_strip(4), quad_strip(6));
        assert_eq!((a.triangle_count(), b.triangle_count()), (2, 4));
        let m = merge_meshes(&[a, b]);
        assert_eq!(m.vertex_count(), 10);
        assert_eq!(m.triangle_count(), 6);
        assert_eq!(m.indices.iter().max(), Some(&9));
        m.validate().unwrap();
    }

    #[test]
    fn validate_catches_bad_index() {
        let mut m = quad_strip(4);
        m.indices[0] = 4;
        assert!(m.validate().is_err());
    }

    #[test]
    fn bounds_of_strip() {
        let b = quad_strip(6).bounds().unwrap();
        assert_eq!(b.min, Vector3::zeros());
        assert_eq!(b.max, Vector3::new(2.0, 1.0, 0.0));
        assert!(TriangleMesh::default().bounds().is_none());
    }
}
