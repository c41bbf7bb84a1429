//! Brush parameters and stroke tessellation: flat ribbons for canvas
//! strokes, swept tubes for free-space strokes, and the spray cone
//! footprint.

use std::f64::consts::{FRAC_PI_4, TAU};

use nalgebra::{UnitQuaternion, Vector3};

use crate::canvas::CanvasPlane;
use crate::centerline::Centerline;
use crate::config::{SPRAY_GRAZING_COS_CLAMP, SPRAY_PARALLEL_EPS};
use crate::error::{EngineError, Result};
use crate::mesh::{Rgba, TriangleMesh};
use crate::pose::Tool;

/// Points closer than this are treated as coincident during tessellation.
const COINCIDENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrushParams {
    pub tool: Tool,
    pub base_width: f64,
    pub color: Rgba,
    pub spray_cone_half_angle: f64,
    pub spray_range: f64,
    pub drip_probability: f64,
    pub drip_max_length: f64,
}

impl BrushParams {
    pub fn spray(base_width: f64, color: Rgba) -> Self {
        Self { tool: Tool::Spray, base_width, color, ..Self::default() }
    }

    pub fn drip(base_width: f64, color: Rgba) -> Self {
        Self { tool: Tool::DripMop, base_width, color, ..Self::default() }
    }

    pub fn with_tool(self, tool: Tool) -> Self {
        Self { tool, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(EngineError::Parameter(what.to_string()));
        if !(self.base_width > 0.0 && self.base_width.is_finite()) {
            return bad("base_width must be positive");
        }
        if !self.color.iter().all(|c| (0.0..=1.0).contains(c)) {
            return bad("color channels must lie in [0, 1]");
        }
        if !(self.spray_cone_half_angle > 0.0 && self.spray_cone_half_angle <= FRAC_PI_4) {
            return bad("spray cone half angle must lie in (0, pi/4]");
        }
        if !(self.spray_range > 0.0 && self.spray_range.is_finite()) {
            return bad("spray_range must be positive");
        }
        if !(0.0..=1.0).contains(&self.drip_probability) {
            return bad("drip_probability must lie in [0, 1]");
        }
        if !(self.drip_max_length >= 0.0 && self.drip_max_length.is_finite()) {
            return bad("drip_max_length must be non-negative");
        }
        Ok(())
    }
}

impl Default for BrushParams {
    fn default() -> Self {
        Self {
            tool: Tool::Spray,
            base_width: 0.05,
            color: [0.9, 0.1, 0.3, 1.0],
            spray_cone_half_angle: 15f64.to_radians(),
            spray_range: 0.5,
            drip_probability: 0.3,
            drip_max_length: 0.2,
        }
    }
}

/// Drops points that coincide with their predecessor, keeping the per-point
/// widths aligned.
fn distinct_points(line: &Centerline, base_width: f64) -> (Vec<Vector3<f64>>, Vec<f64>) {
    let mut pts: Vec<Vector3<f64>> = Vec::with_capacity(line.len());
    let mut widths = Vec::with_capacity(line.len());
    for (p, pressure) in line.points().iter().zip(line.pressure()) {
        if pts.last().is_some_and(|q| (p - q).norm() <= COINCIDENT_EPS) {
            continue;
        }
        pts.push(*p);
        widths.push(base_width * pressure);
    }
    (pts, widths)
}

/// Unit tangents by central differences, one-sided at the ends.
fn tangents(pts: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let n = pts.len();
    (0..n)
        .map(|i| {
            let d = pts[(i + 1).min(n - 1)] - pts[i.saturating_sub(1)];
            // Central differences vanish on exact reversals; fall back to the
            // outgoing segment.
            d.try_normalize(COINCIDENT_EPS)
                .or_else(|| (pts[(i + 1).min(n - 1)] - pts[i]).try_normalize(COINCIDENT_EPS))
                .unwrap_or_else(|| (pts[i] - pts[i.saturating_sub(1)]).normalize())
        })
        .collect()
}

/// Unit vector perpendicular to `v`, built from the coordinate axis least
/// aligned with it.
fn any_perpendicular(v: &Vector3<f64>) -> Vector3<f64> {
    let a = v.abs();
    let axis = if a.x <= a.y && a.x <= a.z {
        Vector3::x()
    } else if a.y <= a.z {
        Vector3::y()
    } else {
        Vector3::z()
    };
    v.cross(&axis).normalize()
}

/// Flat ribbon facing `facing_normal`: two vertices per centerline point at
/// `±width/2` along `normalize(tangent × facing_normal)`, two triangles per
/// segment wound counter-clockwise about the facing normal.
pub fn tessellate_ribbon(line: &Centerline, params: &BrushParams, facing_normal: Vector3<f64>) -> TriangleMesh {
    let (pts, widths) = distinct_points(line, params.base_width);
    if pts.len() < 2 {
        return TriangleMesh::default();
    }
    let facing = facing_normal.normalize();
    let tangents = tangents(&pts);
    let n = pts.len();
    let mut mesh = TriangleMesh {
        vertices: Vec::with_capacity(2 * n),
        normals: vec![facing; 2 * n],
        colors: vec![params.color; 2 * n],
        indices: Vec::with_capacity(6 * (n - 1)),
    };
    let mut prev_side: Option<Vector3<f64>> = None;
    for i in 0..n {
        let side = tangents[i]
            .cross(&facing)
            .try_normalize(COINCIDENT_EPS)
            .or(prev_side)
            .unwrap_or_else(|| any_perpendicular(&facing));
        prev_side = Some(side);
        let half = side * (widths[i] * 0.5);
        mesh.vertices.push(pts[i] + half);
        mesh.vertices.push(pts[i] - half);
    }
    for i in 0..(n as u32 - 1) {
        let (a, b, c, d) = (2 * i, 2 * i + 1, 2 * i + 2, 2 * i + 3);
        mesh.indices.extend_from_slice(&[a, c, b, b, c, d]);
    }
    mesh
}

/// Rotation-minimizing frames: each normal is the previous one carried by
/// the rotation between consecutive tangents.
fn transport_normals(tangents: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let mut normals = Vec::with_capacity(tangents.len());
    let mut current = any_perpendicular(&tangents[0]);
    normals.push(current);
    for w in tangents.windows(2) {
        let (prev, next) = (w[0], w[1]);
        let carried = match UnitQuaternion::rotation_between(&prev, &next) {
            Some(rot) => rot * current,
            // Antiparallel tangents: any rotation by pi about an axis
            // perpendicular to both keeps the frame valid.
            None => -current,
        };
        current = (carried - next * carried.dot(&next))
            .try_normalize(COINCIDENT_EPS)
            .unwrap_or_else(|| any_perpendicular(&next));
        normals.push(current);
    }
    normals
}

/// Sweeps a regular `sides`-gon of diameter `base_width * pressure` along
/// the centerline. Ring `i` occupies vertices `i*sides .. (i+1)*sides`;
/// vertex normals point radially outward. No end caps.
pub fn tessellate_tube(line: &Centerline, params: &BrushParams, sides: usize) -> Result<TriangleMesh> {
    if sides < 3 {
        return Err(EngineError::Parameter(format!("tube needs at least 3 sides, got {sides}")));
    }
    let (pts, widths) = distinct_points(line, params.base_width);
    if pts.len() < 2 {
        return Ok(TriangleMesh::default());
    }
    let tangents = tangents(&pts);
    let normals = transport_normals(&tangents);
    let n = pts.len();
    let total = n * sides;
    let mut mesh = TriangleMesh {
        vertices: Vec::with_capacity(total),
        normals: Vec::with_capacity(total),
        colors: vec![params.color; total],
        indices: Vec::with_capacity(6 * (n - 1) * sides),
    };
    let ring: Vec<(f64, f64)> = (0..sides).map(|k| (TAU * k as f64 / sides as f64).sin_cos()).collect();
    for i in 0..n {
        let normal = normals[i];
        let binormal = tangents[i].cross(&normal);
        let radius = widths[i] * 0.5;
        for &(sin, cos) in &ring {
            let radial = normal * cos + binormal * sin;
            mesh.vertices.push(pts[i] + radial * radius);
            mesh.normals.push(radial);
        }
    }
    let s = sides as u32;
    for i in 0..(n as u32 - 1) {
        for k in 0..s {
            let a = i * s + k;
            let b = i * s + (k + 1) % s;
            let c = a + s;
            let d = b + s;
            mesh.indices.extend_from_slice(&[a, b, d, a, d, c]);
        }
    }
    Ok(mesh)
}

/// Elliptical spray footprint on the canvas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprayFootprint {
    pub center: Vector3<f64>,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub major_axis_dir: Vector3<f64>,
}

/// Intersects the spray axis with the canvas. Returns `None` when the axis
/// is parallel to the plane, hits behind the nib, or lands beyond
/// `spray_range`.
pub fn spray_footprint(
    nib: Vector3<f64>,
    device_forward: Vector3<f64>,
    plane: &CanvasPlane,
    params: &BrushParams,
) -> Option<SprayFootprint> {
    let forward = device_forward.try_normalize(COINCIDENT_EPS)?;
    let denom = plane.normal.dot(&forward);
    if denom.abs() < SPRAY_PARALLEL_EPS {
        return None;
    }
    let d = (plane.offset - plane.normal.dot(&nib)) / denom;
    if d < 0.0 || d > params.spray_range {
        return None;
    }
    let semi_minor = d * params.spray_cone_half_angle.tan();
    let semi_major = semi_minor / denom.abs().max(SPRAY_GRAZING_COS_CLAMP);
    let major_axis_dir = (forward - plane.normal * denom).try_normalize(1e-9).unwrap_or(plane.u_axis);
    Some(SprayFootprint { center: nib + forward * d, semi_major, semi_minor, major_axis_dir })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_x(n: usize, step: f64) -> Centerline {
        Centerline::from_points((0..n).map(|i| Vector3::new(i as f64 * step, 0.0, 0.0)).collect(), Tool::Spray).unwrap()
    }

    fn wall() -> CanvasPlane {
        CanvasPlane::from_normal(Vector3::z(), 0.0, [-2.0, 2.0, -2.0, 2.0]).unwrap()
    }

    #[test]
    fn ribbon_counts() {
        let p = BrushParams::spray(0.1, [1.0; 4]);
        let m = tessellate_ribbon(&line_x(2, 0.1), &p, Vector3::z());
        assert_eq!((m.vertex_count(), m.triangle_count()), (4, 2));
        let m = tessellate_ribbon(&line_x(10, 0.1), &p, Vector3::z());
        assert_eq!((m.vertex_count(), m.triangle_count()), (20, 18));
        m.validate().unwrap();
        assert!(tessellate_ribbon(&line_x(1, 0.1), &p, Vector3::z()).is_empty());
    }

    #[test]
    fn ribbon_side_offsets_along_y() {
        // tangent +x, facing +z: side = x × z = -y, so offsets are ±0.05 in y.
        let p = BrushParams::spray(0.1, [1.0; 4]);
        let m = tessellate_ribbon(&line_x(5, 0.1), &p, Vector3::z());
        for (i, v) in m.vertices.iter().enumerate() {
            let expect = if i % 2 == 0 { -0.05 } else { 0.05 };
            assert!((v.y - expect).abs() < 1e-15, "vertex {i}: {v:?}");
            assert_eq!(v.z, 0.0);
        }
    }

    #[test]
    fn ribbon_faces_the_normal() {
        let p = BrushParams::spray(0.1, [1.0; 4]);
        let m = tessellate_ribbon(&line_x(4, 0.1), &p, Vector3::z());
        for [a, b, c] in m.triangles() {
            let (a, b, c) = (m.vertices[a as usize], m.vertices[b as usize], m.vertices[c as usize]);
            assert!((b - a).cross(&(c - a)).z > 0.0);
        }
    }

    #[test]
    fn ribbon_skips_duplicate_points() {
        let pts = vec![Vector3::zeros(), Vector3::zeros(), Vector3::x()];
        let line = Centerline::from_points(pts, Tool::Spray).unwrap();
        let m = tessellate_ribbon(&line, &BrushParams::default(), Vector3::z());
        assert_eq!(m.vertex_count(), 4);
        m.validate().unwrap();
    }

    #[test]
    fn ribbon_handles_tangent_along_normal() {
        let pts = vec![Vector3::zeros(), Vector3::new(0.0, 0.0, 0.1), Vector3::new(0.1, 0.0, 0.1)];
        let line = Centerline::from_points(pts, Tool::Spray).unwrap();
        let m = tessellate_ribbon(&line, &BrushParams::default(), Vector3::z());
        m.validate().unwrap();
    }

    #[test]
    fn tube_counts() {
        let p = BrushParams::default();
        let m = tessellate_tube(&line_x(2, 0.1), &p, 6).unwrap();
        assert_eq!((m.vertex_count(), m.triangle_count()), (12, 12));
        let m = tessellate_tube(&line_x(5, 0.1), &p, 3).unwrap();
        assert_eq!((m.vertex_count(), m.triangle_count()), (15, 24));
        m.validate().unwrap();
        assert!(matches!(tessellate_tube(&line_x(5, 0.1), &p, 2), Err(EngineError::Parameter(_))));
    }

    #[test]
    fn tube_ring_is_a_circle() {
        let pts = (0..6).map(|i| Vector3::new(0.0, 0.0, i as f64 * 0.05)).collect();
        let line = Centerline::from_points(pts, Tool::Spray).unwrap();
        let m = tessellate_tube(&line, &BrushParams::spray(0.1, [1.0; 4]), 8).unwrap();
        for v in &m.vertices {
            assert!(((v.x * v.x + v.y * v.y).sqrt() - 0.05).abs() < 1e-9);
        }
    }

    #[test]
    fn tube_normals_point_outward() {
        let pts = (0..20)
            .map(|i| {
                let a = i as f64 * 0.3;
                Vector3::new(a.cos() * 0.2, a.sin() * 0.2, i as f64 * 0.02)
            })
            .collect();
        let line = Centerline::from_points(pts, Tool::Spray).unwrap();
        let m = tessellate_tube(&line, &BrushParams::default(), 8).unwrap();
        m.validate().unwrap();
        for [a, b, c] in m.triangles() {
            let (pa, pb, pc) = (m.vertices[a as usize], m.vertices[b as usize], m.vertices[c as usize]);
            let face = (pb - pa).cross(&(pc - pa));
            let avg = m.normals[a as usize] + m.normals[b as usize] + m.normals[c as usize];
            assert!(face.dot(&avg) > 0.0);
        }
    }

    #[test]
    fn tube_survives_reversal() {
        let pts = vec![Vector3::zeros(), Vector3::x(), Vector3::zeros()];
        let line = Centerline::from_points(pts, Tool::Spray).unwrap();
        let m = tessellate_tube(&line, &BrushParams::default(), 5).unwrap();
        m.validate().unwrap();
    }

    #[test]
    fn footprint_at_normal_incidence() {
        let p = BrushParams { spray_range: 1.0, ..BrushParams::default() };
        let nib = Vector3::new(0.0, 0.0, 0.5);
        let f = spray_footprint(nib, -Vector3::z(), &wall(), &p).unwrap();
        // 0.5 * tan(15 deg), evaluated from the half-angle identity
        // tan(15) = 2 - sqrt(3).
        let expect = 0.5 * (2.0 - 3f64.sqrt());
        assert!((f.semi_minor - expect).abs() < 1e-12);
        assert!((f.semi_major - expect).abs() < 1e-12);
        assert!((expect - 0.133975).abs() < 1e-6);
        assert!(f.center.norm() < 1e-12);

        let far = spray_footprint(Vector3::new(0.0, 0.0, 1.0), -Vector3::z(), &wall(), &p).unwrap();
        assert_eq!(far.semi_minor, 2.0 * f.semi_minor);
    }

    #[test]
    fn footprint_misses() {
        let p = BrushParams::default();
        let nib = Vector3::new(0.0, 0.0, 0.3);
        assert!(spray_footprint(nib, Vector3::x(), &wall(), &p).is_none());
        assert!(spray_footprint(nib, Vector3::z(), &wall(), &p).is_none());
        assert!(spray_footprint(Vector3::new(0.0, 0.0, 0.6), -Vector3::z(), &wall(), &p).is_none());
    }

    #[test]
    fn footprint_stretches_at_oblique_incidence() {
        let p = BrushParams::default();
        let dir = Vector3::new(1.0, 0.0, -1.0).normalize();
        let f = spray_footprint(Vector3::new(0.0, 0.0, 0.2), dir, &wall(), &p).unwrap();
        assert!((f.semi_major - f.semi_minor * 2f64.sqrt()).abs() < 1e-12);
        assert!((f.major_axis_dir - Vector3::x()).norm() < 1e-12);

        let grazing = Vector3::new(1.0, 0.0, -0.01).normalize();
        let g = spray_footprint(Vector3::new(0.0, 0.0, 0.001), grazing, &wall(), &p).unwrap();
        assert!((g.semi_major - g.semi_minor / 0.1).abs() < 1e-12);
    }

    #[test]
    fn params_validation() {
        BrushParams::default().validate().unwrap();
        assert!(BrushParams { base_width: 0.0, ..Default::default() }.validate().is_err());
        assert!(BrushParams { color: [1.2, 0.0, 0.0, 1.0], ..Default::default() }.validate().is_err());
        assert!(BrushParams { spray_cone_half_angle: 1.0, ..Default::default() }.validate().is_err());
        assert!(BrushParams { drip_probability: -0.1, ..Default::default() }.validate().is_err());
    }
}
