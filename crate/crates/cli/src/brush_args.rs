//! `--brush key=value` overrides.

use gesto_core::config::DEFAULT_MAX_FIT_RMS;
use gesto_core::pipeline::PipelineSettings;
use gesto_core::pose::NibOffset;
use gesto_core::Vector3;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "width", "color", "spacing", "window", "sides", "cone_deg", "range", "drip_p", "drip_len", "max_rms", "nib",
];

/// Parsed overrides. Unset fields keep the pipeline defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BrushOverrides {
    pub width: Option<f64>,
    pub color: Option<[f32; 4]>,
    pub spacing: Option<f64>,
    pub window: Option<usize>,
    pub sides: Option<usize>,
    pub cone_deg: Option<f64>,
    pub range: Option<f64>,
    pub drip_p: Option<f64>,
    pub drip_len: Option<f64>,
    pub max_rms: Option<f64>,
    pub nib: Option<[f64; 3]>,
}

fn number<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("--brush {key}: cannot parse {raw:?}")))
}

fn list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',').map(|p| number(key, p)).collect()
}

impl BrushOverrides {
    pub fn parse(args: &[String]) -> Result<Self, CliError> {
        let mut o = Self::default();
        for arg in args {
            let (key, value) = arg
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--brush expects key=value, got {arg:?}")))?;
            match key {
                "width" => o.width = Some(number(key, value)?),
                "spacing" => o.spacing = Some(number(key, value)?),
                "window" => o.window = Some(number(key, value)?),
                "sides" => o.sides = Some(number(key, value)?),
                "cone_deg" => o.cone_deg = Some(number(key, value)?),
                "range" => o.range = Some(number(key, value)?),
                "drip_p" => o.drip_p = Some(number(key, value)?),
                "drip_len" => o.drip_len = Some(number(key, value)?),
                "max_rms" => o.max_rms = Some(number(key, value)?),
                "color" => {
                    let c = list(key, value)?;
                    o.color = Some(match c[..] {
                        [r, g, b] => [r as f32, g as f32, b as f32, 1.0],
                        [r, g, b, a] => [r as f32, g as f32, b as f32, a as f32],
                        _ => return Err(CliError::Usage("--brush color expects r,g,b or r,g,b,a".into())),
                    });
                }
                "nib" => {
                    let n = list(key, value)?;
                    o.nib = Some(<[f64; 3]>::try_from(n).map_err(|_| CliError::Usage("--brush nib expects x,y,z".into()))?);
                }
                _ => {
                    return Err(CliError::Usage(format!("unknown --brush key {key:?}; expected one of {}", KEYS.join(", "))));
                }
            }
        }
        Ok(o)
    }

    /// Applies the overrides and validates the result.
    pub fn apply(&self, mut s: PipelineSettings) -> Result<PipelineSettings, CliError> {
        let b = &mut s.brush;
        if let Some(v) = self.width {
            b.base_width = v;
        }
        if let Some(v) = self.color {
            b.color = v;
        }
        if let Some(v) = self.cone_deg {
            b.spray_cone_half_angle = v.to_radians();
        }
        if let Some(v) = self.range {
            b.spray_range = v;
        }
        if let Some(v) = self.drip_p {
            b.drip_probability = v;
        }
        if let Some(v) = self.drip_len {
            b.drip_max_length = v;
        }
        b.validate().map_err(|e| CliError::Usage(format!("--brush: {e}")))?;
        if let Some(v) = self.spacing {
            s.min_spacing = v;
        }
        if let Some(v) = self.window {
            s.smooth_window = v;
        }
        if let Some(v) = self.sides {
            s.tube_sides = v;
        }
        if let Some(n) = self.nib {
            s.nib = NibOffset::new(Vector3::from(n)).map_err(|e| CliError::Usage(format!("--brush nib: {e}")))?;
        }
        if !(s.min_spacing.is_finite() && s.min_spacing > 0.0) {
            return Err(CliError::Usage("--brush spacing must be positive".into()));
        }
        if s.smooth_window == 0 || s.smooth_window.is_multiple_of(2) {
            return Err(CliError::Usage("--brush window must be odd".into()));
        }
        if s.tube_sides < 3 {
            return Err(CliError::Usage("--brush sides must be at least 3".into()));
        }
        Ok(s)
    }

    pub fn max_rms(&self) -> f64 {
        self.max_rms.unwrap_or(DEFAULT_MAX_FIT_RMS)
    }
}
