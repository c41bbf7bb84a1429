//! End-to-end replay: pose stream to strokes, meshes and stats.
//!
//! Per stroke: segment, resample, smooth, spray pressure (canvas mode only),
//! constrain to the canvas, drips (drip mop on the canvas only), then
//! tessellate. Stroke ids are assigned 1, 2, ... in stream order and meshes
//! are merged in that order.

use serde::Serialize;
use uuid::Uuid;

use crate::artwork::{Artwork, ArtworkError, Stroke};
use crate::brush::BrushParams;
use crate::canvas::{constrain_stroke, project_to_canvas, CanvasPlane, DrawMode};
use crate::centerline::{apply_spray_pressure, resample, segment_strokes, smooth};
use crate::config::{DEFAULT_MIN_SPACING, DEFAULT_SMOOTH_WINDOW, DEFAULT_TUBE_SIDES};
use crate::drip::drip_simulate;
use crate::error::EngineError;
use crate::mesh::{merge_meshes, TriangleMesh};
use crate::pose::{NibOffset, PoseSample, Tool};
use crate::rng::splitmix64;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSettings {
    pub nib: NibOffset,
    pub min_spacing: f64,
    pub smooth_window: usize,
    pub tube_sides: usize,
    pub mode: DrawMode,
    /// Shared brush; each stroke takes its tool from the pose stream.
    pub brush: BrushParams,
    pub seed: u64,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        Self {
            nib: NibOffset::default(),
            min_spacing: DEFAULT_MIN_SPACING,
            smooth_window: DEFAULT_SMOOTH_WINDOW,
            tube_sides: DEFAULT_TUBE_SIDES,
            mode: DrawMode::Canvas2D,
            brush: BrushParams::default(),
            seed: 0,
        }
    }
}

/// Single-line summary printed by the replay command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplayStats {
    pub strokes: usize,
    pub vertices: usize,
    pub triangles: usize,
    pub arc_length_m: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutput {
    pub canvas: Option<CanvasPlane>,
    pub strokes: Vec<Stroke>,
    pub mesh: TriangleMesh,
    pub stats: ReplayStats,
}

/// Drip generator seed for one stroke.
pub fn stroke_seed(seed: u64, stroke_id: u64) -> u64 {
    splitmix64(seed ^ stroke_id)
}

pub fn replay(stream: &[PoseSample], canvas: Option<CanvasPlane>, settings: &PipelineSettings) -> Result<ReplayOutput, ArtworkError> {
    if settings.mode == DrawMode::Canvas2D && canvas.is_none() {
        return Err(EngineError::Mode("2D canvas mode needs a registered plane".into()).into());
    }
    let plane = canvas.as_ref();
    let mut strokes = Vec::new();
    for (idx, raw) in segment_strokes(stream, settings.nib)?.into_iter().enumerate() {
        let id = idx as u64 + 1;
        let brush = settings.brush.with_tool(raw.tool());
        let line = smooth(&resample(&raw, settings.min_spacing)?, settings.smooth_window)?;

        let (line, drips) = match (settings.mode, plane) {
            (DrawMode::Canvas2D, Some(plane)) => {
                let line = apply_spray_pressure(&line, plane, brush.spray_range)?;
                let constrained = constrain_stroke(&line, Some(plane), DrawMode::Canvas2D)?;
                let drips = if brush.tool == Tool::DripMop {
                    let on_plane = line.map_points(|p| project_to_canvas(p, plane).world)?;
                    drip_simulate(&on_plane, plane, &brush, stroke_seed(settings.seed, id))?
                        .into_iter()
                        .map(|d| d.seed)
                        .collect()
                } else {
                    Vec::new()
                };
                (constrained, drips)
            }
            _ => (line, Vec::new()),
        };
        strokes.push(Stroke::new(id, line, brush, settings.mode, drips)?);
    }

    let meshes = strokes
        .iter()
        .map(|s| s.render(plane, settings.tube_sides))
        .collect::<Result<Vec<_>, _>>()?;
    let mesh = merge_meshes(&meshes);
    let stats = ReplayStats {
        strokes: strokes.len(),
        vertices: mesh.vertex_count(),
        triangles: mesh.triangle_count(),
        arc_length_m: strokes.iter().fold(0.0, |acc, s| acc + s.centerline().arc_length()),
    };
    Ok(ReplayOutput { canvas, strokes, mesh, stats })
}

impl ReplayOutput {
    /// Packs the replayed strokes into an artwork with identity placement.
    pub fn into_artwork(self, artwork_id: Uuid, author: &str, title: &str, created_at: i64) -> Result<Artwork, ArtworkError> {
        let mut artwork = Artwork::new(artwork_id, author, title, created_at)?.with_canvas(self.canvas)?;
        for s in self.strokes {
            artwork = artwork.add_stroke(s)?;
        }
        Ok(artwork)
    }
}
