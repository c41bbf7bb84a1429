use std::fmt::Write;

use crate::mesh::TriangleMesh;

/// Writes positions, normals and faces. Per-vertex colors follow the
/// normals as a comment block (`#vc r g b a`, one line per vertex) so plain
/// OBJ readers ignore them.
pub fn write_obj(mesh: &TriangleMesh) -> String {
    let mut out = String::with_capacity(64 * mesh.vertex_count() + 32 * mesh.triangle_count() + 64);
    let _ = writeln!(out, "# gesto mesh");
    let _ = writeln!(out, "# vertices {} triangles {}", mesh.vertex_count(), mesh.triangle_count());
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    for n in &mesh.normals {
        let _ = writeln!(out, "vn {} {} {}", n.x, n.y, n.z);
    }
    if !mesh.colors.is_empty() {
        let _ = writeln!(out, "# vertex-colors rgba");
        for c in &mesh.colors {
            let _ = writeln!(out, "#vc {} {} {} {}", c[0], c[1], c[2], c[3]);
        }
    }
    for [a, b, c] in mesh.triangles() {
        let (a, b, c) = (a + 1, b + 1, c + 1);
        let _ = writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    #[test]
    fn small_mesh_layout() {
        let mesh = TriangleMesh {
            vertices: vec![Vector3::zeros(), Vector3::x(), Vector3::y()],
            normals: vec![Vector3::z(); 3],
            colors: vec![[1.0, 0.5, 0.0, 1.0]; 3],
            indices: vec![0, 1, 2],
        };
        let text = write_obj(&mesh);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[2], "v 0 0 0");
        assert_eq!(lines[5], "vn 0 0 1");
        assert_eq!(lines[9], "#vc 1 0.5 0 1");
        assert_eq!(lines.last(), Some(&"f 1//1 2//2 3//3"));
    }

    #[test]
    fn empty_mesh_is_header_only() {
        assert_eq!(write_obj(&TriangleMesh::default()).lines().count(), 2);
    }
}
