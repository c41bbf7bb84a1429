//! Device poses, the virtual nib, and the JSON Lines pose log.

use std::io::{BufRead, Write};

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{EngineError, LogError, Result};

/// Allowed deviation of a pose quaternion norm from 1.
pub const QUATERNION_NORM_TOLERANCE: f64 = 1e-6;

/// Upper bound on the nib distance from the device origin.
pub const MAX_NIB_OFFSET: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tool {
    #[serde(rename = "spray")]
    Spray,
    #[serde(rename = "drip")]
    DripMop,
}

impl Tool {
    pub fn code(self) -> u8 {
        match self {
            Tool::Spray => 0,
            Tool::DripMop => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Tool::Spray),
            1 => Some(Tool::DripMop),
            _ => None,
        }
    }
}

/// Timestamped rigid pose of the handheld device plus button and tool state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseSample {
    pub t: f64,
    pub position: Vector3<f64>,
    /// Stored as `(w, x, y, z)`.
    pub orientation: [f64; 4],
    pub pressed: bool,
    pub tool: Tool,
}

impl PoseSample {
    pub fn new(t: f64, position: Vector3<f64>, orientation: [f64; 4], pressed: bool, tool: Tool) -> Self {
        Self { t, position, orientation, pressed, tool }
    }

    /// Identity-orientation sample, handy for fixtures.
    pub fn at(t: f64, position: Vector3<f64>, pressed: bool, tool: Tool) -> Self {
        Self::new(t, position, [1.0, 0.0, 0.0, 0.0], pressed, tool)
    }

    pub fn rotation(&self) -> Result<UnitQuaternion<f64>> {
        let [w, x, y, z] = self.orientation;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > QUATERNION_NORM_TOLERANCE {
            return Err(EngineError::InvalidPose(format!(
                "orientation norm {norm} is not within {QUATERNION_NORM_TOLERANCE} of 1"
            )));
        }
        Ok(UnitQuaternion::new_unchecked(q))
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() {
            return Err(EngineError::InvalidPose("timestamp is not finite".into()));
        }
        if !self.position.iter().all(|c| c.is_finite()) {
            return Err(EngineError::InvalidPose("position is not finite".into()));
        }
        self.rotation().map(|_| ())
    }
}

/// Fixed emitter point in the device frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NibOffset(Vector3<f64>);

impl NibOffset {
    pub fn new(offset: Vector3<f64>) -> Result<Self> {
        if !offset.iter().all(|c| c.is_finite()) {
            return Err(EngineError::Parameter("nib offset is not finite".into()));
        }
        if offset.norm() > MAX_NIB_OFFSET {
            return Err(EngineError::Parameter(format!(
                "nib offset magnitude {} exceeds {MAX_NIB_OFFSET} m",
                offset.norm()
            )));
        }
        Ok(Self(offset))
    }

    pub fn offset(&self) -> Vector3<f64> {
        self.0
    }
}

impl Default for NibOffset {
    /// Top edge of a phone held upright.
    fn default() -> Self {
        Self(Vector3::new(0.0, 0.08, 0.0))
    }
}

/// World position of the virtual nib for `pose`.
pub fn nib_position(pose: &PoseSample, offset: NibOffset) -> Result<Vector3<f64>> {
    let rotation = pose.rotation()?;
    Ok(pose.position + rotation * offset.offset())
}

/// Wire form of one pose-log line.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PoseRecord {
    t: f64,
    p: [f64; 3],
    q: [f64; 4],
    pressed: bool,
    tool: Tool,
}

impl From<&PoseSample> for PoseRecord {
    fn from(s: &PoseSample) -> Self {
        Self {
            t: s.t,
            p: [s.position.x, s.position.y, s.position.z],
            q: s.orientation,
            pressed: s.pressed,
            tool: s.tool,
        }
    }
}

/// Parses a JSON Lines pose log. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn read_pose_log<R: BufRead>(reader: R) -> Result<Vec<PoseSample>, LogError> {
    let mut out: Vec<PoseSample> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PoseRecord = serde_json::from_str(&line)
            .map_err(|e| LogError::Parse { line: line_no, message: e.to_string() })?;
        let sample = PoseSample::new(
            rec.t,
            Vector3::new(rec.p[0], rec.p[1], rec.p[2]),
            rec.q,
            rec.pressed,
            rec.tool,
        );
        sample
            .validate()
            .map_err(|e| LogError::Parse { line: line_no, message: e.to_string() })?;
        if let Some(prev) = out.last() {
            if sample.t <= prev.t {
                return Err(LogError::Parse {
                    line: line_no,
                    message: format!("timestamp {} does not increase past {}", sample.t, prev.t),
                });
            }
        }
        out.push(sample);
    }
    Ok(out)
}

pub fn write_pose_log<W: Write>(mut writer: W, samples: &[PoseSample]) -> std::io::Result<()> {
    for s in samples {
        let line = serde_json::to_string(&PoseRecord::from(s)).map_err(std::io::Error::other)?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
