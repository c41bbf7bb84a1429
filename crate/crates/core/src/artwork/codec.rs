//! The GSTB binary artwork format, version 1.
//!
//! All integers and floats are little-endian.
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `"GSTB"`                          |
//! | 4      | 2    | format version, `u16` = 1               |
//! | 6      | ...  | four sections, each `u32` length + body |
//!
//! Sections, in order:
//!
//! 1. header: artwork id (16 bytes, big-endian UUID), `created_at` `i64`,
//!    author (`u16` byte length + UTF-8), title (`u16` byte length + UTF-8).
//! 2. canvas: empty when absent, otherwise 15 `f64`: normal (3), offset,
//!    u axis (3), v axis (3), bounds (4), fit rms.
//! 3. strokes: `u32` count, then per stroke: id `u64`, tool `u8`, mode `u8`,
//!    9 `f32` brush values (width, color rgba, cone half angle, range, drip
//!    probability, drip max length), `u32` point count followed by
//!    `x y z t pressure` as `f32` per point, `u32` drip count followed by
//!    `x y z length width` as `f32` per drip.
//! 4. placement: 8 `f64`: translation (3), rotation `w x y z`, scale.
//!
//! Nothing may follow the placement section.

use nalgebra::Vector3;
use thiserror::Error;
use uuid::Uuid;

use super::{Artwork, PlacementTransform, Stroke};
use crate::brush::BrushParams;
use crate::canvas::{CanvasPlane, DrawMode};
use crate::centerline::Centerline;
use crate::drip::DripSeed;
use crate::pose::Tool;

pub const MAGIC: &[u8; 4] = b"GSTB";
pub const FORMAT_VERSION: u16 = 1;

const CANVAS_BYTES: usize = 15 * 8;
const PLACEMENT_BYTES: usize = 8 * 8;
const POINT_BYTES: usize = 5 * 4;
const DRIP_BYTES: usize = 5 * 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("format error: bad magic")]
    BadMagic,
    #[error("version error: unsupported format version {0}")]
    UnsupportedVersion(u16),
    #[error("corruption at byte {offset}: {reason}")]
    Corrupt { offset: usize, reason: String },
}

pub fn encode(artwork: &Artwork) -> Vec<u8> {
    let mut out = Vec::with_capacity(256);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());

    section(&mut out, |b| {
        b.extend_from_slice(artwork.artwork_id.as_bytes());
        b.extend_from_slice(&artwork.created_at.to_le_bytes());
        for text in [artwork.author(), artwork.title()] {
            b.extend_from_slice(&(text.len() as u16).to_le_bytes());
            b.extend_from_slice(text.as_bytes());
        }
    });

    section(&mut out, |b| {
        if let Some(c) = artwork.canvas() {
            let values = c
                .normal
                .iter()
                .copied()
                .chain([c.offset])
                .chain(c.u_axis.iter().copied())
                .chain(c.v_axis.iter().copied())
                .chain(c.bounds)
                .chain([c.fit_rms]);
            for v in values {
                b.extend_from_slice(&v.to_le_bytes());
            }
        }
    });

    section(&mut out, |b| {
        b.extend_from_slice(&(artwork.strokes().len() as u32).to_le_bytes());
        for s in artwork.strokes() {
            encode_stroke(b, s);
        }
    });

    section(&mut out, |b| {
        let p = &artwork.placement;
        for v in p.translation.iter().copied().chain(p.rotation_wxyz()).chain([p.scale]) {
            b.extend_from_slice(&v.to_le_bytes());
        }
    });
    out
}

fn section(out: &mut Vec<u8>, body: impl FnOnce(&mut Vec<u8>)) {
    let start = out.len();
    out.extend_from_slice(&[0; 4]);
    body(out);
    let len = (out.len() - start - 4) as u32;
    out[start..start + 4].copy_from_slice(&len.to_le_bytes());
}

fn put_f32(b: &mut Vec<u8>, v: f64) {
    b.extend_from_slice(&(v as f32).to_le_bytes());
}

fn encode_stroke(b: &mut Vec<u8>, s: &Stroke) {
    let brush = s.brush();
    b.extend_from_slice(&s.id().to_le_bytes());
    b.push(brush.tool.code());
    b.push(s.mode().code());
    put_f32(b, brush.base_width);
    for c in brush.color {
        b.extend_from_slice(&c.to_le_bytes());
    }
    for v in [brush.spray_cone_half_angle, brush.spray_range, brush.drip_probability, brush.drip_max_length] {
        put_f32(b, v);
    }
    let line = s.centerline();
    b.extend_from_slice(&(line.len() as u32).to_le_bytes());
    for ((p, t), pr) in line.points().iter().zip(line.timestamps()).zip(line.pressure()) {
        for v in [p.x, p.y, p.z, *t, *pr] {
            put_f32(b, v);
        }
    }
    b.extend_from_slice(&(s.drips().len() as u32).to_le_bytes());
    for d in s.drips() {
        for v in [d.anchor.x, d.anchor.y, d.anchor.z, d.length, d.width] {
            put_f32(b, v);
        }
    }
}

/// Bounds-checked little-endian reader over a byte slice.
struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    end: usize,
}

impl<'a> Reader<'a> {
    fn corrupt<T>(&self, reason: impl Into<String>) -> Result<T, DecodeError> {
        Err(DecodeError::Corrupt { offset: self.pos, reason: reason.into() })
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], DecodeError> {
        if self.end - self.pos < n {
            return self.corrupt(format!("truncated: need {n} bytes, {} remain", self.end - self.pos));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N], DecodeError> {
        let mut a = [0u8; N];
        a.copy_from_slice(self.take(N)?);
        Ok(a)
    }

    fn u8(&mut self) -> Result<u8, DecodeError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, DecodeError> {
        self.array().map(u16::from_le_bytes)
    }

    fn u32(&mut self) -> Result<u32, DecodeError> {
        self.array().map(u32::from_le_bytes)
    }

    fn u64(&mut self) -> Result<u64, DecodeError> {
        self.array().map(u64::from_le_bytes)
    }

    fn i64(&mut self) -> Result<i64, DecodeError> {
        self.array().map(i64::from_le_bytes)
    }

    fn f32(&mut self) -> Result<f64, DecodeError> {
        self.array().map(|a| f32::from_le_bytes(a) as f64)
    }

    fn f32_raw(&mut self) -> Result<f32, DecodeError> {
        self.array().map(f32::from_le_bytes)
    }

    fn f64(&mut self) -> Result<f64, DecodeError> {
        self.array().map(f64::from_le_bytes)
    }

    fn vec3_f32(&mut self) -> Result<Vector3<f64>, DecodeError> {
        Ok(Vector3::new(self.f32()?, self.f32()?, self.f32()?))
    }

    fn vec3_f64(&mut self) -> Result<Vector3<f64>, DecodeError> {
        Ok(Vector3::new(self.f64()?, self.f64()?, self.f64()?))
    }

    fn text(&mut self, what: &str) -> Result<String, DecodeError> {
        let len = self.u16()? as usize;
        let start = self.pos;
        let bytes = self.take(len)?;
        String::from_utf8(bytes.to_vec())
            .map_err(|_| DecodeError::Corrupt { offset: start, reason: format!("{what} is not UTF-8") })
    }

    /// Reads a `u32` length and returns a reader confined to that section.
    fn section(&mut self, name: &str) -> Result<Reader<'a>, DecodeError> {
        let len = self.u32()? as usize;
        if self.end - self.pos < len {
            return self.corrupt(format!("truncated {name} section: declares {len} bytes, {} remain", self.end - self.pos));
        }
        let sub = Reader { bytes: self.bytes, pos: self.pos, end: self.pos + len };
        self.pos += len;
        Ok(sub)
    }

    fn finish(&self, name: &str) -> Result<(), DecodeError> {
        if self.pos != self.end {
            return self.corrupt(format!("{} unread bytes at end of {name}", self.end - self.pos));
        }
        Ok(())
    }

    /// Fails before allocating when `count` records cannot fit.
    fn check_room(&self, count: usize, record: usize, what: &str) -> Result<(), DecodeError> {
        if count.saturating_mul(record) > self.end - self.pos {
            return self.corrupt(format!("truncated: {count} {what} do not fit in the section"));
        }
        Ok(())
    }
}

pub fn decode(bytes: &[u8]) -> Result<Artwork, DecodeError> {
    if bytes.len() < MAGIC.len() {
        return if MAGIC.starts_with(bytes) && !bytes.is_empty() {
            Err(DecodeError::Corrupt { offset: bytes.len(), reason: "truncated magic".into() })
        } else {
            Err(DecodeError::BadMagic)
        };
    }
    if &bytes[..4] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    let mut r = Reader { bytes, pos: 4, end: bytes.len() };
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(DecodeError::UnsupportedVersion(version));
    }

    let mut header = r.section("header")?;
    let header_start = header.pos;
    let id = Uuid::from_bytes(header.array()?);
    let created_at = header.i64()?;
    let author = header.text("author")?;
    let title = header.text("title")?;
    header.finish("header")?;
    let mut artwork = Artwork::new(id, &author, &title, created_at)
        .map_err(|e| DecodeError::Corrupt { offset: header_start, reason: e.to_string() })?;

    let mut canvas = r.section("canvas")?;
    let canvas_start = canvas.pos;
    let plane = match canvas.end - canvas.pos {
        0 => None,
        CANVAS_BYTES => Some(CanvasPlane {
            normal: canvas.vec3_f64()?,
            offset: canvas.f64()?,
            u_axis: canvas.vec3_f64()?,
            v_axis: canvas.vec3_f64()?,
            bounds: [canvas.f64()?, canvas.f64()?, canvas.f64()?, canvas.f64()?],
            fit_rms: canvas.f64()?,
        }),
        n => return canvas.corrupt(format!("canvas section has {n} bytes, expected 0 or {CANVAS_BYTES}")),
    };
    artwork = artwork
        .with_canvas(plane)
        .map_err(|e| DecodeError::Corrupt { offset: canvas_start, reason: e.to_string() })?;

    let mut strokes = r.section("strokes")?;
    let count = strokes.u32()? as usize;
    for _ in 0..count {
        let start = strokes.pos;
        let stroke = decode_stroke(&mut strokes)?;
        artwork = artwork
            .add_stroke(stroke)
            .map_err(|e| DecodeError::Corrupt { offset: start, reason: e.to_string() })?;
    }
    strokes.finish("strokes")?;

    let mut placement = r.section("placement")?;
    let placement_start = placement.pos;
    if placement.end - placement.pos != PLACEMENT_BYTES {
        return placement.corrupt(format!(
            "placement section has {} bytes, expected {PLACEMENT_BYTES}",
            placement.end - placement.pos
        ));
    }
    let translation = placement.vec3_f64()?;
    let rotation = [placement.f64()?, placement.f64()?, placement.f64()?, placement.f64()?];
    let scale = placement.f64()?;
    let transform = PlacementTransform::new(translation, rotation, scale)
        .map_err(|e| DecodeError::Corrupt { offset: placement_start, reason: e.to_string() })?;
    artwork = artwork.with_placement(transform);

    r.finish("payload")?;
    Ok(artwork)
}

fn decode_stroke(r: &mut Reader<'_>) -> Result<Stroke, DecodeError> {
    let start = r.pos;
    let id = r.u64()?;
    let tool_pos = r.pos;
    let tool = Tool::from_code(r.u8()?)
        .ok_or_else(|| DecodeError::Corrupt { offset: tool_pos, reason: "unknown tool code".into() })?;
    let mode = DrawMode::from_code(r.u8()?)
        .ok_or_else(|| DecodeError::Corrupt { offset: tool_pos + 1, reason: "unknown mode code".into() })?;
    let brush = BrushParams {
        tool,
        base_width: r.f32()?,
        color: [r.f32_raw()?, r.f32_raw()?, r.f32_raw()?, r.f32_raw()?],
        spray_cone_half_angle: r.f32()?,
        spray_range: r.f32()?,
        drip_probability: r.f32()?,
        drip_max_length: r.f32()?,
    };

    let n = r.u32()? as usize;
    r.check_room(n, POINT_BYTES, "points")?;
    let (mut points, mut times, mut pressure) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for _ in 0..n {
        points.push(r.vec3_f32()?);
        times.push(r.f32()?);
        pressure.push(r.f32()?);
    }
    let m = r.u32()? as usize;
    r.check_room(m, DRIP_BYTES, "drips")?;
    let mut drips = Vec::with_capacity(m);
    for _ in 0..m {
        drips.push(DripSeed { anchor: r.vec3_f32()?, length: r.f32()?, width: r.f32()? });
    }

    let invalid = |e: String| DecodeError::Corrupt { offset: start, reason: format!("stroke {id}: {e}") };
    let line = Centerline::new(points, times, pressure, tool).map_err(|e| invalid(e.to_string()))?;
    Stroke::new(id, line, brush, mode, drips).map_err(|e| invalid(e.to_string()))
}
