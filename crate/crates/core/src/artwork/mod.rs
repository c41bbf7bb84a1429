//! The persistent artwork aggregate: strokes, placement, gestures, and
//! rendering to a world-space mesh.

mod codec;
mod debug_json;

pub use codec::{decode, encode, DecodeError, FORMAT_VERSION, MAGIC};
pub use debug_json::{from_debug_json, to_debug_json, DebugJsonError};

use nalgebra::{Quaternion, Similarity3, Translation3, UnitQuaternion, Vector3};
use thiserror::Error;
use uuid::Uuid;

use crate::brush::{tessellate_ribbon, tessellate_tube, BrushParams};
use crate::canvas::{CanvasPlane, DrawMode};
use crate::centerline::Centerline;
use crate::config::CANVAS_LIFT;
use crate::drip::{render_drip, DripSeed};
use crate::error::EngineError;
use crate::mesh::{merge_meshes, TriangleMesh};
use crate::pose::Tool;

pub const MAX_AUTHOR_BYTES: usize = 64;
pub const MAX_TITLE_BYTES: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArtworkError {
    #[error("conflict: stroke id {0} already present")]
    Conflict(u64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid artwork: {0}")]
    Invalid(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

fn q32(x: f64) -> f64 {
    x as f32 as f64
}

fn q32v(v: &Vector3<f64>) -> Vector3<f64> {
    v.map(q32)
}

/// One drawn stroke. Numeric stroke data is held at 32-bit float precision,
/// the precision it is stored with.
#[derive(Debug, Clone, PartialEq)]
pub struct Stroke {
    id: u64,
    centerline: Centerline,
    brush: BrushParams,
    mode: DrawMode,
    drips: Vec<DripSeed>,
}

impl Stroke {
    pub fn new(
        id: u64,
        centerline: Centerline,
        brush: BrushParams,
        mode: DrawMode,
        drips: Vec<DripSeed>,
    ) -> Result<Self, ArtworkError> {
        let brush = BrushParams {
            tool: brush.tool,
            base_width: q32(brush.base_width),
            color: brush.color,
            spray_cone_half_angle: q32(brush.spray_cone_half_angle),
            spray_range: q32(brush.spray_range),
            drip_probability: q32(brush.drip_probability),
            drip_max_length: q32(brush.drip_max_length),
        };
        brush.validate()?;
        if centerline.tool() != brush.tool {
            return Err(ArtworkError::Invalid(format!(
                "stroke {id}: centerline tool {:?} differs from brush tool {:?}",
                centerline.tool(),
                brush.tool
            )));
        }
        if brush.tool != Tool::DripMop && !drips.is_empty() {
            return Err(ArtworkError::Invalid(format!("stroke {id}: only drip-mop strokes carry drips")));
        }
        let centerline = Centerline::new(
            centerline.points().iter().map(q32v).collect(),
            centerline.timestamps().iter().copied().map(q32).collect(),
            centerline.pressure().iter().copied().map(q32).collect(),
            centerline.tool(),
        )?;
        let drips = drips
            .iter()
            .map(|d| DripSeed { anchor: q32v(&d.anchor), length: q32(d.length), width: q32(d.width) })
            .collect::<Vec<_>>();
        if let Some(d) = drips.iter().find(|d| !(d.length >= 0.0 && d.width >= 0.0) || !d.anchor.iter().all(|c| c.is_finite())) {
            return Err(ArtworkError::Invalid(format!("stroke {id}: invalid drip {d:?}")));
        }
        Ok(Self { id, centerline, brush, mode, drips })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn centerline(&self) -> &Centerline {
        &self.centerline
    }

    pub fn brush(&self) -> &BrushParams {
        &self.brush
    }

    pub fn mode(&self) -> DrawMode {
        self.mode
    }

    pub fn drips(&self) -> &[DripSeed] {
        &self.drips
    }

    /// Ribbon on the canvas (plus drips) for canvas strokes, tube otherwise.
    /// A canvas stroke without a canvas falls back to a tube.
    pub fn render(&self, canvas: Option<&CanvasPlane>, tube_sides: usize) -> Result<TriangleMesh, ArtworkError> {
        match (self.mode, canvas) {
            (DrawMode::Canvas2D, Some(plane)) => {
                let mut parts = vec![tessellate_ribbon(&self.centerline, &self.brush, plane.normal)];
                for d in &self.drips {
                    parts.push(render_drip(d, plane, &self.brush, CANVAS_LIFT)?);
                }
                Ok(merge_meshes(&parts))
            }
            _ => Ok(tessellate_tube(&self.centerline, &self.brush, tube_sides)?),
        }
    }
}

/// Artwork-level translate, rotate, uniform scale:
/// `world = translation + scale * rotation(local)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementTransform {
    pub translation: Vector3<f64>,
    pub rotation: UnitQuaternion<f64>,
    pub scale: f64,
}

impl Default for PlacementTransform {
    fn default() -> Self {
        Self { translation: Vector3::zeros(), rotation: UnitQuaternion::identity(), scale: 1.0 }
    }
}

impl PlacementTransform {
    pub fn new(translation: Vector3<f64>, rotation_wxyz: [f64; 4], scale: f64) -> Result<Self, ArtworkError> {
        let [w, x, y, z] = rotation_wxyz;
        let q = Quaternion::new(w, x, y, z);
        if !translation.iter().all(|c| c.is_finite()) {
            return Err(ArtworkError::Invalid("placement translation is not finite".into()));
        }
        let norm_err = (q.norm() - 1.0).abs();
        if norm_err.is_nan() || norm_err > 1e-6 {
            return Err(ArtworkError::Invalid("placement rotation is not a unit quaternion".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(ArtworkError::Invalid("placement scale must be positive".into()));
        }
        Ok(Self { translation, rotation: UnitQuaternion::new_unchecked(q), scale })
    }

    pub fn rotation_wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    pub fn to_similarity(&self) -> Similarity3<f64> {
        Similarity3::from_parts(Translation3::from(self.translation), self.rotation, self.scale)
    }

    pub fn apply(&self, local: &Vector3<f64>) -> Vector3<f64> {
        self.translation + (self.rotation * local) * self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artwork {
    pub artwork_id: Uuid,
    author: String,
    title: String,
    created_at: i64,
    canvas: Option<CanvasPlane>,
    strokes: Vec<Stroke>,
    pub placement: PlacementTransform,
}

impl Artwork {
    pub fn new(artwork_id: Uuid, author: &str, title: &str, created_at: i64) -> Result<Self, ArtworkError> {
        if author.len() > MAX_AUTHOR_BYTES {
            return Err(ArtworkError::Invalid(format!("author exceeds {MAX_AUTHOR_BYTES} bytes")));
        }
        if title.len() > MAX_TITLE_BYTES {
            return Err(ArtworkError::Invalid(format!("title exceeds {MAX_TITLE_BYTES} bytes")));
        }
        if created_at < 0 {
            return Err(ArtworkError::Invalid("created_at must be non-negative".into()));
        }
        Ok(Self {
            artwork_id,
            author: author.to_owned(),
            title: title.to_owned(),
            created_at,
            canvas: None,
            strokes: Vec::new(),
            placement: PlacementTransform::default(),
        })
    }

    pub fn author(&self) -> &str {
        &self.author
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn created_at(&self) -> i64 {
        self.created_at
    }

    pub fn canvas(&self) -> Option<&CanvasPlane> {
        self.canvas.as_ref()
    }

    pub fn strokes(&self) -> &[Stroke] {
        &self.strokes
    }

    pub fn with_canvas(&self, canvas: Option<CanvasPlane>) -> Result<Self, ArtworkError> {
        if let Some(c) = &canvas {
            c.validate()?;
        }
        Ok(Self { canvas, ..self.clone() })
    }

    pub fn with_placement(&self, placement: PlacementTransform) -> Self {
        Self { placement, ..self.clone() }
    }

    pub fn add_stroke(&self, stroke: Stroke) -> Result<Self, ArtworkError> {
        if self.strokes.iter().any(|s| s.id == stroke.id) {
            return Err(ArtworkError::Conflict(stroke.id));
        }
        let mut next = self.clone();
        next.strokes.push(stroke);
        Ok(next)
    }

    /// Moves the whole artwork by `delta` in world space.
    pub fn gesture_drag(&self, delta: Vector3<f64>) -> Result<Self, ArtworkError> {
        if !delta.iter().all(|c| c.is_finite()) {
            return Err(ArtworkError::Parameter("drag delta must be finite".into()));
        }
        let mut placement = self.placement;
        placement.translation += delta;
        Ok(self.with_placement(placement))
    }

    /// Scales about a world-space pivot: `p -> pivot + factor * (p - pivot)`.
    pub fn gesture_scale(&self, factor: f64, pivot: Vector3<f64>) -> Result<Self, ArtworkError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(ArtworkError::Parameter(format!("scale factor must be positive, got {factor}")));
        }
        if !pivot.iter().all(|c| c.is_finite()) {
            return Err(ArtworkError::Parameter("pivot must be finite".into()));
        }
        let mut placement = self.placement;
        placement.translation = pivot + (placement.translation - pivot) * factor;
        placement.scale *= factor;
        Ok(self.with_placement(placement))
    }

    /// All strokes tessellated in artwork-local coordinates, in stroke order.
    pub fn local_mesh(&self, tube_sides: usize) -> Result<TriangleMesh, ArtworkError> {
        let parts = self
            .strokes
            .iter()
            .map(|s| s.render(self.canvas.as_ref(), tube_sides))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(merge_meshes(&parts))
    }

    /// [`Self::local_mesh`] with the placement transform applied.
    pub fn world_mesh(&self, tube_sides: usize) -> Result<TriangleMesh, ArtworkError> {
        let mut mesh = self.local_mesh(tube_sides)?;
        for v in &mut mesh.vertices {
            *v = self.placement.apply(v);
        }
        for n in &mut mesh.normals {
            *n = self.placement.rotation * *n;
        }
        Ok(mesh)
    }
}
