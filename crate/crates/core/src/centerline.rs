//! Stroke centerlines: segmentation of a pose stream, resampling, smoothing.

use nalgebra::Vector3;

use crate::canvas::CanvasPlane;
use crate::error::{EngineError, Result};
use crate::pose::{nib_position, NibOffset, PoseSample, Tool};

/// Endpoint snap tolerance as a fraction of the resampling spacing.
const ENDPOINT_SNAP_FRAC: f64 = 1e-6;

/// Ordered stroke path with per-point timestamps and pressure.
#[derive(Debug, Clone, PartialEq)]
pub struct Centerline {
    points: Vec<Vector3<f64>>,
    timestamps: Vec<f64>,
    pressure: Vec<f64>,
    tool: Tool,
}

impl Centerline {
    pub fn new(points: Vec<Vector3<f64>>, timestamps: Vec<f64>, pressure: Vec<f64>, tool: Tool) -> Result<Self> {
        if points.is_empty() {
            return Err(EngineError::InvalidInput("centerline needs at least one point".into()));
        }
        if points.len() != timestamps.len() || points.len() != pressure.len() {
            return Err(EngineError::InvalidInput(format!(
                "centerline arrays disagree: {} points, {} timestamps, {} pressures",
                points.len(),
                timestamps.len(),
                pressure.len()
            )));
        }
        if !points.iter().all(|p| p.iter().all(|c| c.is_finite())) {
            return Err(EngineError::InvalidInput("non-finite centerline point".into()));
        }
        if !timestamps.iter().all(|t| t.is_finite()) {
            return Err(EngineError::InvalidInput("non-finite centerline timestamp".into()));
        }
        if !pressure.iter().all(|p| (0.0..=1.0).contains(p)) {
            return Err(EngineError::InvalidInput("pressure outside [0, 1]".into()));
        }
        Ok(Self { points, timestamps, pressure, tool })
    }

    /// Full-pressure centerline from bare points with synthetic timestamps.
    pub fn from_points(points: Vec<Vector3<f64>>, tool: Tool) -> Result<Self> {
        let timestamps = (0..points.len()).map(|i| i as f64).collect();
        let pressure = vec![1.0; points.len()];
        Self::new(points, timestamps, pressure, tool)
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn pressure(&self) -> &[f64] {
        &self.pressure
    }

    pub fn tool(&self) -> Tool {
        self.tool
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).fold(0.0, |acc, w| acc + (w[1] - w[0]).norm())
    }

    /// Same timestamps, pressure and tool with new positions.
    pub fn with_points(&self, points: Vec<Vector3<f64>>) -> Result<Self> {
        Self::new(points, self.timestamps.clone(), self.pressure.clone(), self.tool)
    }

    pub fn with_pressure(&self, pressure: Vec<f64>) -> Result<Self> {
        Self::new(self.points.clone(), self.timestamps.clone(), pressure, self.tool)
    }

    pub fn map_points(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Result<Self> {
        self.with_points(self.points.iter().map(f).collect())
    }
}

/// Splits a pose stream into one centerline per run of pressed samples.
/// A tool change while pressed starts a new centerline.
pub fn segment_strokes(stream: &[PoseSample], offset: NibOffset) -> Result<Vec<Centerline>> {
    for w in stream.windows(2) {
        if w[1].t <= w[0].t {
            return Err(EngineError::InvalidInput(format!(
                "timestamps must increase: {} then {}",
                w[0].t, w[1].t
            )));
        }
    }

    struct Run {
        tool: Tool,
        points: Vec<Vector3<f64>>,
        times: Vec<f64>,
    }

    fn close(run: Option<Run>, out: &mut Vec<Centerline>) -> Result<()> {
        if let Some(run) = run {
            let n = run.points.len();
            out.push(Centerline::new(run.points, run.times, vec![1.0; n], run.tool)?);
        }
        Ok(())
    }

    let mut out = Vec::new();
    let mut current: Option<Run> = None;
    for sample in stream {
        if !sample.pressed {
            close(current.take(), &mut out)?;
            continue;
        }
        let nib = nib_position(sample, offset)?;
        if current.as_ref().is_some_and(|r| r.tool != sample.tool) {
            close(current.take(), &mut out)?;
        }
        let run = current.get_or_insert_with(|| Run { tool: sample.tool, points: Vec::new(), times: Vec::new() });
        run.points.push(nib);
        run.times.push(sample.t);
    }
    close(current, &mut out)?;
    Ok(out)
}

/// Walks the polyline emitting a point each time the Euclidean distance from
/// the previously emitted point reaches `min_spacing`. The first input point
/// is kept, and the last input point is either appended or replaces an
/// emitted point that lands on it. Timestamps and pressure are interpolated
/// along the segment where each point is emitted.
pub fn resample(line: &Centerline, min_spacing: f64) -> Result<Centerline> {
    if !(min_spacing > 0.0 && min_spacing.is_finite()) {
        return Err(EngineError::Parameter(format!("min_spacing must be positive, got {min_spacing}")));
    }
    let pts = &line.points;
    let first = pts[0];
    let last = pts[pts.len() - 1];
    if pts.iter().all(|p| *p == first) {
        return Centerline::new(vec![first], vec![line.timestamps[0]], vec![line.pressure[0]], line.tool);
    }

    let mut points = vec![first];
    let mut times = vec![line.timestamps[0]];
    let mut pressure = vec![line.pressure[0]];
    let mut cursor = first;
    let s2 = min_spacing * min_spacing;

    for seg in 0..pts.len() - 1 {
        let a = pts[seg];
        let b = pts[seg + 1];
        let d = b - a;
        let dd = d.dot(&d);
        if dd == 0.0 {
            continue;
        }
        let mut t0 = 0.0;
        while (b - cursor).norm_squared() >= s2 {
            // Exit point of the sphere of radius min_spacing around `cursor`.
            let f = a - cursor;
            let half_b = f.dot(&d);
            let c = f.dot(&f) - s2;
            let disc = (half_b * half_b - dd * c).max(0.0);
            let t = ((-half_b + disc.sqrt()) / dd).clamp(t0, 1.0);
            let x = a + d * t;
            points.push(x);
            times.push(lerp(line.timestamps[seg], line.timestamps[seg + 1], t));
            pressure.push(lerp(line.pressure[seg], line.pressure[seg + 1], t).clamp(0.0, 1.0));
            cursor = x;
            t0 = t;
            if t >= 1.0 {
                break;
            }
        }
    }

    let end_t = line.timestamps[pts.len() - 1];
    let end_p = line.pressure[pts.len() - 1];
    let snapped = points.len() > 1 && (last - cursor).norm() <= min_spacing * ENDPOINT_SNAP_FRAC;
    if snapped {
        let i = points.len() - 1;
        points[i] = last;
        times[i] = end_t;
        pressure[i] = end_p;
    } else if last != cursor {
        points.push(last);
        times.push(end_t);
        pressure.push(end_p);
    }
    Centerline::new(points, times, pressure, line.tool)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Centered moving average of positions. Near the ends the window shrinks
/// symmetrically, so both endpoints are returned unchanged.
pub fn smooth(line: &Centerline, window: usize) -> Result<Centerline> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(EngineError::Parameter(format!("smoothing window must be odd and positive, got {window}")));
    }
    let half = window / 2;
    let n = line.points.len();
    let points = (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let sum = line.points[i - h..=i + h].iter().fold(Vector3::zeros(), |acc, p| acc + p);
            sum / (2 * h + 1) as f64
        })
        .collect();
    line.with_points(points)
}

/// Spray pressure from nib distance to the canvas:
/// `clamp(1 - |distance| / spray_range, 0, 1)`. Drip-mop lines keep full
/// pressure.
pub fn apply_spray_pressure(line: &Centerline, plane: &CanvasPlane, spray_range: f64) -> Result<Centerline> {
    if !(spray_range.is_finite() && spray_range > 0.0) {
        return Err(EngineError::Parameter(format!("spray_range must be positive, got {spray_range}")));
    }
    let pressure = match line.tool {
        Tool::DripMop => vec![1.0; line.len()],
        Tool::Spray => line
            .points
            .iter()
            .map(|p| (1.0 - plane.signed_distance(p).abs() / spray_range).clamp(0.0, 1.0))
            .collect(),
    };
    line.with_pressure(pressure)
}
