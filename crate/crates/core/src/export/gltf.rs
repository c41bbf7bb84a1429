use serde_json::json;

use crate::mesh::TriangleMesh;

const GLB_MAGIC: u32 = 0x4654_6C67;
const CHUNK_JSON: u32 = 0x4E4F_534A;
const CHUNK_BIN: u32 = 0x004E_4942;
const FLOAT: u32 = 5126;
const UNSIGNED_INT: u32 = 5125;
const ARRAY_BUFFER: u32 = 34962;
const ELEMENT_ARRAY_BUFFER: u32 = 34963;

/// Binary glTF 2.0 with one primitive carrying POSITION, NORMAL and COLOR_0
/// (all float) plus `u32` indices. An empty mesh yields a scene without
/// nodes and no BIN chunk.
pub fn write_glb(mesh: &TriangleMesh) -> Vec<u8> {
    if mesh.vertices.is_empty() || mesh.indices.is_empty() {
        let doc = json!({
            "asset": { "version": "2.0", "generator": "gesto" },
            "scene": 0,
            "scenes": [{ "nodes": [] }],
        });
        return assemble(&doc, &[]);
    }

    let n = mesh.vertex_count();
    let mut bin = Vec::with_capacity(n * 40 + mesh.indices.len() * 4);
    let mut min = [f32::INFINITY; 3];
    let mut max = [f32::NEG_INFINITY; 3];
    for v in &mesh.vertices {
        for k in 0..3 {
            let c = v[k] as f32;
            min[k] = min[k].min(c);
            max[k] = max[k].max(c);
            bin.extend_from_slice(&c.to_le_bytes());
        }
    }
    let normals_at = bin.len();
    for nrm in &mesh.normals {
        for k in 0..3 {
            bin.extend_from_slice(&(nrm[k] as f32).to_le_bytes());
        }
    }
    let colors_at = bin.len();
    for c in &mesh.colors {
        for x in c {
            bin.extend_from_slice(&x.to_le_bytes());
        }
    }
    let indices_at = bin.len();
    for i in &mesh.indices {
        bin.extend_from_slice(&i.to_le_bytes());
    }

    let doc = json!({
        "asset": { "version": "2.0", "generator": "gesto" },
        "scene": 0,
        "scenes": [{ "nodes": [0] }],
        "nodes": [{ "mesh": 0 }],
        "meshes": [{
            "primitives": [{
                "attributes": { "POSITION": 0, "NORMAL": 1, "COLOR_0": 2 },
                "indices": 3,
                "mode": 4,
            }],
        }],
        "buffers": [{ "byteLength": bin.len() }],
        "bufferViews": [
            { "buffer": 0, "byteOffset": 0, "byteLength": normals_at, "target": ARRAY_BUFFER },
            { "buffer": 0, "byteOffset": normals_at, "byteLength": colors_at - normals_at, "target": ARRAY_BUFFER },
            { "buffer": 0, "byteOffset": colors_at, "byteLength": indices_at - colors_at, "target": ARRAY_BUFFER },
            { "buffer": 0, "byteOffset": indices_at, "byteLength": bin.len() - indices_at, "target": ELEMENT_ARRAY_BUFFER },
        ],
        "accessors": [
            { "bufferView": 0, "componentType": FLOAT, "count": n, "type": "VEC3", "min": min, "max": max },
            { "bufferView": 1, "componentType": FLOAT, "count": n, "type": "VEC3" },
            { "bufferView": 2, "componentType": FLOAT, "count": n, "type": "VEC4" },
            { "bufferView": 3, "componentType": UNSIGNED_INT, "count": mesh.indices.len(), "type": "SCALAR" },
        ],
    });
    assemble(&doc, &bin)
}

fn assemble(doc: &serde_json::Value, bin: &[u8]) -> Vec<u8> {
    let mut json = serde_json::to_vec(doc).expect("glTF document serializes");
    while !json.len().is_multiple_of(4) {
        json.push(b' ');
    }
    let mut bin = bin.to_vec();
    while !bin.len().is_multiple_of(4) {
        bin.push(0);
    }
    let bin_chunk = if bin.is_empty() { 0 } else { 8 + bin.len() };
    let total = 12 + 8 + json.len() + bin_chunk;

    let mut out = Vec::with_capacity(total);
    out.extend_from_slice(&GLB_MAGIC.to_le_bytes());
    out.extend_from_slice(&2u32.to_le_bytes());
    out.extend_from_slice(&(total as u32).to_le_bytes());
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&CHUNK_JSON.to_le_bytes());
    out.extend_from_slice(&json);
    if !bin.is_empty() {
        out.extend_from_slice(&(bin.len() as u32).to_le_bytes());
        out.extend_from_slice(&CHUNK_BIN.to_le_bytes());
        out.extend_from_slice(&bin);
    }
    out
}
