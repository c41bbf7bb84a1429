//! Human-readable JSON mirror of the GSTB format. Stroke numbers are written
//! as 32-bit floats and everything else as 64-bit floats, each in shortest
//! round-trip form, so text and binary convert losslessly both ways.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use uuid::Uuid;

use super::{Artwork, PlacementTransform, Stroke};
use crate::brush::BrushParams;
use crate::canvas::{CanvasPlane, DrawMode};
use crate::centerline::Centerline;
use crate::drip::DripSeed;
use crate::pose::Tool;

#[derive(Debug, Error)]
pub enum DebugJsonError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid artwork: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtworkDoc {
    format: String,
    version: u16,
    artwork_id: Uuid,
    author: String,
    title: String,
    created_at: i64,
    canvas: Option<CanvasDoc>,
    strokes: Vec<StrokeDoc>,
    placement: PlacementDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanvasDoc {
    normal: [f64; 3],
    offset: f64,
    u_axis: [f64; 3],
    v_axis: [f64; 3],
    bounds: [f64; 4],
    fit_rms: f64,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum ModeDoc {
    Canvas2d,
    Free3d,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BrushDoc {
    base_width: f32,
    color: [f32; 4],
    spray_cone_half_angle: f32,
    spray_range: f32,
    drip_probability: f32,
    drip_max_length: f32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrokeDoc {
    id: u64,
    tool: Tool,
    mode: ModeDoc,
    brush: BrushDoc,
    points: Vec<[f32; 3]>,
    timestamps: Vec<f32>,
    pressure: Vec<f32>,
    drips: Vec<DripDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DripDoc {
    anchor: [f32; 3],
    length: f32,
    width: f32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlacementDoc {
    translation: [f64; 3],
    rotation: [f64; 4],
    scale: f64,
}

fn v3(v: &Vector3<f64>) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn v3f(v: &Vector3<f64>) -> [f32; 3] {
    [v.x as f32, v.y as f32, v.z as f32]
}

fn from_f32(a: [f32; 3]) -> Vector3<f64> {
    Vector3::new(a[0] as f64, a[1] as f64, a[2] as f64)
}

pub fn to_debug_json(artwork: &Artwork) -> String {
    let doc = ArtworkDoc {
        format: "GSTB".into(),
        version: super::FORMAT_VERSION,
        artwork_id: artwork.artwork_id,
        author: artwork.author().to_owned(),
        title: artwork.title().to_owned(),
        created_at: artwork.created_at(),
        canvas: artwork.canvas().map(|c| CanvasDoc {
            normal: v3(&c.normal),
            offset: c.offset,
            u_axis: v3(&c.u_axis),
            v_axis: v3(&c.v_axis),
            bounds: c.bounds,
            fit_rms: c.fit_rms,
        }),
        strokes: artwork.strokes().iter().map(stroke_doc).collect(),
        placement: PlacementDoc {
            translation: v3(&artwork.placement.translation),
            rotation: artwork.placement.rotation_wxyz(),
            scale: artwork.placement.scale,
        },
    };
    serde_json::to_string_pretty(&doc).expect("artwork documents always serialize")
}

fn stroke_doc(s: &Stroke) -> StrokeDoc {
    let b = s.brush();
    let line = s.centerline();
    StrokeDoc {
        id: s.id(),
        tool: b.tool,
        mode: match s.mode() {
            DrawMode::Canvas2D => ModeDoc::Canvas2d,
            DrawMode::Free3D => ModeDoc::Free3d,
        },
        brush: BrushDoc {
            base_width: b.base_width as f32,
            color: b.color,
            spray_cone_half_angle: b.spray_cone_half_angle as f32,
            spray_range: b.spray_range as f32,
            drip_probability: b.drip_probability as f32,
            drip_max_length: b.drip_max_length as f32,
        },
        points: line.points().iter().map(v3f).collect(),
        timestamps: line.timestamps().iter().map(|&t| t as f32).collect(),
        pressure: line.pressure().iter().map(|&p| p as f32).collect(),
        drips: s
            .drips()
            .iter()
            .map(|d| DripDoc { anchor: v3f(&d.anchor), length: d.length as f32, width: d.width as f32 })
            .collect(),
    }
}

pub fn from_debug_json(text: &str) -> Result<Artwork, DebugJsonError> {
    let doc: ArtworkDoc = serde_json::from_str(text).map_err(|e| DebugJsonError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let invalid = |e: &dyn std::fmt::Display| DebugJsonError::Invalid(e.to_string());
    if doc.format != "GSTB" {
        return Err(DebugJsonError::Invalid(format!("unknown format {:?}", doc.format)));
    }
    if doc.version != super::FORMAT_VERSION {
        return Err(DebugJsonError::Invalid(format!("unsupported version {}", doc.version)));
    }
    let mut artwork = Artwork::new(doc.artwork_id, &doc.author, &doc.title, doc.created_at).map_err(|e| invalid(&e))?;
    let canvas = doc.canvas.map(|c| CanvasPlane {
        normal: Vector3::from(c.normal),
        offset: c.offset,
        u_axis: Vector3::from(c.u_axis),
        v_axis: Vector3::from(c.v_axis),
        bounds: c.bounds,
        fit_rms: c.fit_rms,
    });
    artwork = artwork.with_canvas(canvas).map_err(|e| invalid(&e))?;
    for s in doc.strokes {
        let brush = BrushParams {
            tool: s.tool,
            base_width: s.brush.base_width as f64,
            color: s.brush.color,
            spray_cone_half_angle: s.brush.spray_cone_half_angle as f64,
            spray_range: s.brush.spray_range as f64,
            drip_probability: s.brush.drip_probability as f64,
            drip_max_length: s.brush.drip_max_length as f64,
        };
        let line = Centerline::new(
            s.points.into_iter().map(from_f32).collect(),
            s.timestamps.into_iter().map(f64::from).collect(),
            s.pressure.into_iter().map(f64::from).collect(),
            s.tool,
        )
        .map_err(|e| invalid(&e))?;
        let mode = match s.mode {
            ModeDoc::Canvas2d => DrawMode::Canvas2D,
            ModeDoc::Free3d => DrawMode::Free3D,
        };
        let drips = s
            .drips
            .into_iter()
            .map(|d| DripSeed { anchor: from_f32(d.anchor), length: d.length as f64, width: d.width as f64 })
            .collect();
        let stroke = Stroke::new(s.id, line, brush, mode, drips).map_err(|e| invalid(&e))?;
        artwork = artwork.add_stroke(stroke).map_err(|e| invalid(&e))?;
    }
    let p = doc.placement;
    let placement = PlacementTransform::new(Vector3::from(p.translation), p.rotation, p.scale).map_err(|e| invalid(&e))?;
    Ok(artwork.with_placement(placement))
}

#[cfg(test)]
mod tests {
    use super::super::{decode, encode};
    use super::*;

    fn sample() -> Artwork {
        let line = Centerline::from_points(
            vec![Vector3::new(0.1, 0.2, 0.3), Vector3::new(0.4, 0.5, 0.6)],
            Tool::Spray,
        )
        .unwrap();
        let stroke = Stroke::new(3, line, BrushParams::default(), DrawMode::Free3D, vec![]).unwrap();
        Artwork::new(Uuid::from_u128(99), "zed", "tag", 12).unwrap().add_stroke(stroke).unwrap()
    }

    #[test]
    fn empty_artwork_has_empty_strokes() {
        let a = Artwork::new(Uuid::nil(), "", "", 0).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_debug_json(&a)).unwrap();
        assert_eq!(v["strokes"], serde_json::json!([]));
        assert_eq!(v["canvas"], serde_json::Value::Null);
        assert_eq!(from_debug_json(&to_debug_json(&a)).unwrap(), a);
    }

    #[test]
    fn binary_to_text_to_binary_is_identical() {
        let bytes = encode(&sample());
        let text = to_debug_json(&decode(&bytes).unwrap());
        assert!(text.contains("0.1"));
        assert_eq!(encode(&from_debug_json(&text).unwrap()), bytes);
    }

    #[test]
    fn missing_field_is_named() {
        let text = to_debug_json(&sample()).replace("\"title\"", "\"titel\"");
        let err = from_debug_json(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("title") || msg.contains("titel"), "{msg}");

        let mut v: serde_json::Value = serde_json::from_str(&to_debug_json(&sample())).unwrap();
        v.as_object_mut().unwrap().remove("placement");
        let err = from_debug_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("missing field `placement`"), "{err}");
    }

    #[test]
    fn malformed_text_reports_position() {
        match from_debug_json("{\n  \"format\": \"GSTB\",\n  oops\n}") {
            Err(DebugJsonError::Parse { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }
}
