use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::GazeError;
use crate::world::Vec3;

/// Directions further than this from unit length are rejected rather than
/// renormalized.
pub const UNIT_TOLERANCE: f64 = 1e-3;

pub const GAZE_LOG_HEADER: [&str; 10] =
    ["t_s", "gaze_x", "gaze_y", "gaze_z", "head_x", "head_y", "head_z", "pupil_mm", "openness", "valid"];

/// One eye-tracker frame with a cyclopean gaze ray and the head forward ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub t: f64,
    pub gaze_dir: Vec3,
    pub head_dir: Vec3,
    pub pupil_mm: f64,
    pub openness: f64,
    pub valid: bool,
}

impl GazeSample {
    pub fn new(t: f64, gaze_dir: Vec3, head_dir: Vec3, pupil_mm: f64, openness: f64) -> Self {
        Self { t, gaze_dir, head_dir, pupil_mm, openness, valid: true }
    }
}

fn parse_flag(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

fn unit(v: Vec3, row: usize, column: &'static str) -> Result<Vec3, GazeError> {
    let n = v.norm();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(GazeError::NotUnit { row, column, norm: n });
    }
    Ok(v * (1.0 / n))
}

/// Reads a gaze log. Columns are located by header name, so extra columns
/// and reordering are tolerated.
///
/// Directions of valid rows must be within [`UNIT_TOLERANCE`] of unit length
/// and are renormalized; invalid rows keep whatever direction could be
/// normalized, else zero. Timestamps must be finite and strictly increasing.
pub fn read_gaze_log<R: Read>(reader: R) -> Result<Vec<GazeSample>, GazeError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 10];
    for (slot, name) in idx.iter_mut().zip(GAZE_LOG_HEADER) {
        *slot = headers.iter().position(|h| h == name).ok_or(GazeError::MissingColumn(name))?;
    }

    let mut out: Vec<GazeSample> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |k: usize| rec.get(idx[k]).unwrap_or("");
        let num = |k: usize| -> Result<f64, GazeError> {
            field(k).parse::<f64>().map_err(|_| GazeError::InvalidValue {
                row,
                column: GAZE_LOG_HEADER[k],
                value: field(k).to_string(),
            })
        };
        let t = num(0)?;
        let valid = parse_flag(field(9)).ok_or_else(|| GazeError::InvalidValue {
            row,
            column: "valid",
            value: field(9).to_string(),
        })?;
        if !t.is_finite() {
            return Err(GazeError::InvalidValue { row, column: "t_s", value: field(0).to_string() });
        }
        if let Some(prev) = out.last() {
            if t <= prev.t {
                return Err(GazeError::NonIncreasingTime { row });
            }
        }
        let gaze = Vec3::new(num(1)?, num(2)?, num(3)?);
        let head = Vec3::new(num(4)?, num(5)?, num(6)?);
        let (gaze_dir, head_dir) = if valid {
            (unit(gaze, row, "gaze")?, unit(head, row, "head")?)
        } else {
            (gaze.normalized().unwrap_or(Vec3::ZERO), head.normalized().unwrap_or(Vec3::ZERO))
        };
        out.push(GazeSample { t, gaze_dir, head_dir, pupil_mm: num(7)?, openness: num(8)?, valid });
    }
    Ok(out)
}

pub fn parse_gaze_log(text: &str) -> Result<Vec<GazeSample>, GazeError> {
    read_gaze_log(text.as_bytes())
}

pub fn write_gaze_log<W: Write>(samples: &[GazeSample], writer: W) -> Result<(), GazeError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(GAZE_LOG_HEADER)?;
    for s in samples {
        w.write_record([
            format!("{:.4}", s.t),
            s.gaze_dir.x.to_string(),
            s.gaze_dir.y.to_string(),
            s.gaze_dir.z.to_string(),
            s.head_dir.x.to_string(),
            s.head_dir.y.to_string(),
            s.head_dir.z.to_string(),
            s.pupil_mm.to_string(),
            s.openness.to_string(),
            if s.valid { "1".into() } else { "0".into() },
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
