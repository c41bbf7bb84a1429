//! Pinned engine constants and tunable defaults.

/// Default resampling spacing, meters.
pub const DEFAULT_MIN_SPACING: f64 = 0.005;
/// Default moving-average window (odd).
pub const DEFAULT_SMOOTH_WINDOW: usize = 3;
/// Default polygon side count for 3D tubes.
pub const DEFAULT_TUBE_SIDES: usize = 8;

/// Lift applied to canvas-constrained points along the plane normal.
pub const CANVAS_LIFT: f64 = 0.001;
/// Padding added around scanned samples when computing canvas bounds.
pub const CANVAS_BOUNDS_PAD: f64 = 0.05;
/// Default acceptable plane-fit rms, meters.
pub const DEFAULT_MAX_FIT_RMS: f64 = 0.02;

/// Smallest `|cos|` of incidence used when stretching a spray ellipse.
pub const SPRAY_GRAZING_COS_CLAMP: f64 = 0.1;
/// Rays with `|direction · normal|` below this never reach the canvas.
pub const SPRAY_PARALLEL_EPS: f64 = 1e-6;

/// Maximum distance of a drip input point from the canvas plane.
pub const DRIP_PLANE_TOLERANCE: f64 = 1e-4;

/// World gravity direction.
pub const GRAVITY: [f64; 3] = [0.0, -1.0, 0.0];

/// Drip model constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DripConfig {
    /// Every `seed_stride`-th centerline point is a drip candidate.
    pub seed_stride: usize,
    /// Drip length is uniform in `[min_length_frac, 1] * drip_max_length`.
    pub min_length_frac: f64,
    /// Width at the anchor, as a fraction of the brush width.
    pub start_width_frac: f64,
    /// Width at the tip, as a fraction of the brush width.
    pub end_width_frac: f64,
    /// Below this projected-gravity magnitude no drips are produced.
    pub min_gravity_projection: f64,
}

pub const DRIP: DripConfig = DripConfig {
    seed_stride: 4,
    min_length_frac: 0.3,
    start_width_frac: 0.4,
    end_width_frac: 0.15,
    min_gravity_projection: 1e-6,
};
