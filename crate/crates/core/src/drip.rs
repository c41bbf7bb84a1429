//! Drip-mop simulation: stochastic gravity-aligned drips hanging off a
//! canvas stroke.
//!
//! Candidates are every `DRIP.seed_stride`-th centerline point starting at
//! index 0. For each candidate, in order, one uniform draw `u` decides
//! acceptance (`u < drip_probability`); an accepted candidate takes a second
//! draw `r` and gets length `(min_frac + (1 - min_frac) * r) * drip_max_length`.
//! Draws come from [`XorShift64Star`] seeded with the caller's seed.

use nalgebra::Vector3;

use crate::brush::{tessellate_ribbon, BrushParams};
use crate::canvas::{project_to_canvas, CanvasPlane};
use crate::centerline::Centerline;
use crate::config::{DRIP, DRIP_PLANE_TOLERANCE, GRAVITY};
use crate::error::{EngineError, Result};
use crate::mesh::TriangleMesh;
use crate::pose::Tool;
use crate::rng::XorShift64Star;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DripSeed {
    /// On the canvas plane.
    pub anchor: Vector3<f64>,
    pub length: f64,
    /// Width at the anchor.
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Drip {
    pub seed: DripSeed,
    pub centerline: Centerline,
}

/// Unit in-plane direction of gravity, or `None` when the plane is
/// horizontal.
pub fn drip_direction(plane: &CanvasPlane) -> Option<Vector3<f64>> {
    let g = Vector3::from(GRAVITY);
    let projected = g - plane.normal * g.dot(&plane.normal);
    (projected.norm() > DRIP.min_gravity_projection).then(|| projected.normalize())
}

/// Two-point tapered drip path: anchor to anchor + direction * length, with
/// pressures carrying the start and end width fractions. `lift` shifts both
/// points along the plane normal.
pub fn drip_centerline(seed: &DripSeed, direction: Vector3<f64>, plane: &CanvasPlane, lift: f64, t: f64) -> Result<Centerline> {
    let base = seed.anchor + plane.normal * lift;
    Centerline::new(
        vec![base, base + direction * seed.length],
        vec![t, t],
        vec![DRIP.start_width_frac, DRIP.end_width_frac],
        Tool::DripMop,
    )
}

pub fn drip_simulate(line: &Centerline, plane: &CanvasPlane, params: &BrushParams, rng_seed: u64) -> Result<Vec<Drip>> {
    if params.tool != Tool::DripMop {
        return Err(EngineError::Parameter("drip simulation needs the drip-mop tool".into()));
    }
    if let Some(p) = line.points().iter().find(|p| plane.signed_distance(p).abs() > DRIP_PLANE_TOLERANCE) {
        return Err(EngineError::InvalidInput(format!(
            "point {p:?} lies {} m off the canvas",
            plane.signed_distance(p).abs()
        )));
    }
    let Some(direction) = drip_direction(plane) else {
        return Ok(Vec::new());
    };

    let mut rng = XorShift64Star::new(rng_seed);
    let mut drips = Vec::new();
    for i in (0..line.len()).step_by(DRIP.seed_stride) {
        if rng.next_f64() >= params.drip_probability {
            continue;
        }
        let frac = DRIP.min_length_frac + (1.0 - DRIP.min_length_frac) * rng.next_f64();
        let seed = DripSeed {
            anchor: project_to_canvas(&line.points()[i], plane).world,
            length: frac * params.drip_max_length,
            width: DRIP.start_width_frac * params.base_width,
        };
        let centerline = drip_centerline(&seed, direction, plane, 0.0, line.timestamps()[i])?;
        drips.push(Drip { seed, centerline });
    }
    Ok(drips)
}

/// Ribbon mesh for a stored drip seed, lifted off the canvas by `lift`.
pub fn render_drip(seed: &DripSeed, plane: &CanvasPlane, params: &BrushParams, lift: f64) -> Result<TriangleMesh> {
    let Some(direction) = drip_direction(plane) else {
        return Ok(TriangleMesh::default());
    };
    let line = drip_centerline(seed, direction, plane, lift, 0.0)?;
    Ok(tessellate_ribbon(&line, params, plane.normal))
}
