use serde::{Deserialize, Serialize};

use super::{GazeError, GazeSample};

/// Slack applied to the open duration bands so that spans like 16 x 5 ms,
/// which land a few ulps either side of 80 ms, classify consistently.
pub const BAND_SLACK_MS: f64 = 1e-6;

/// Velocity thresholds and duration bands for I-VT with head gating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EventDetectionConfig {
    pub fix_head_vmax: f64,
    pub fix_gaze_vmax: f64,
    pub fix_dur_min: f64,
    pub fix_dur_max: f64,
    pub sac_gaze_vmin: f64,
    pub sac_dur_min: f64,
    pub sac_dur_max: f64,
}

impl Default for EventDetectionConfig {
    fn default() -> Self {
        Self {
            fix_head_vmax: 7.0,
            fix_gaze_vmax: 30.0,
            fix_dur_min: 80.0,
            fix_dur_max: 500.0,
            sac_gaze_vmin: 40.0,
            sac_dur_min: 20.0,
            sac_dur_max: 70.0,
        }
    }
}

impl EventDetectionConfig {
    pub fn is_valid(&self) -> bool {
        let all = [
            self.fix_head_vmax,
            self.fix_gaze_vmax,
            self.fix_dur_min,
            self.fix_dur_max,
            self.sac_gaze_vmin,
            self.sac_dur_min,
            self.sac_dur_max,
        ];
        all.iter().all(|v| v.is_finite() && *v > 0.0)
            && self.fix_dur_min < self.fix_dur_max
            && self.sac_dur_min < self.sac_dur_max
            && self.fix_gaze_vmax <= self.sac_gaze_vmin
    }

    /// Whether a run of `kind` lasting `duration_ms` is kept.
    pub fn accepts(&self, kind: EventKind, duration_ms: f64) -> bool {
        let (lo, hi) = match kind {
            EventKind::Fixation => (self.fix_dur_min, self.fix_dur_max),
            EventKind::Saccade => (self.sac_dur_min, self.sac_dur_max),
        };
        duration_ms > lo + BAND_SLACK_MS && duration_ms < hi - BAND_SLACK_MS
    }
}

/// Angular speeds in degrees per second; `None` where a sample or its
/// predecessor is invalid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub gaze: Option<f64>,
    pub head: Option<f64>,
}

/// Per-sample angular velocities from consecutive directions. The first
/// sample borrows the second sample's velocity.
pub fn angular_velocities(samples: &[GazeSample]) -> Result<Vec<Velocity>, GazeError> {
    if samples.len() < 2 {
        return Err(GazeError::TooFewSamples { needed: 2, got: samples.len() });
    }
    let mut out = Vec::with_capacity(samples.len());
    out.push(Velocity { gaze: None, head: None });
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dt = b.t - a.t;
        let v = if a.valid && b.valid && dt > 0.0 {
            Velocity {
                gaze: Some(a.gaze_dir.angle_deg(b.gaze_dir) / dt),
                head: Some(a.head_dir.angle_deg(b.head_dir) / dt),
            }
        } else {
            Velocity { gaze: None, head: None }
        };
        out.push(v);
    }
    if samples[0].valid {
        out[0] = out[1];
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Fixation,
    Saccade,
}

/// I-VT label of one sample.
pub fn label_sample(v: Velocity, cfg: &EventDetectionConfig) -> Option<EventKind> {
    let g = v.gaze?;
    let h = v.head?;
    if g < cfg.fix_gaze_vmax && h < cfg.fix_head_vmax {
        Some(EventKind::Fixation)
    } else if g > cfg.sac_gaze_vmin {
        Some(EventKind::Saccade)
    } else {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeEvent {
    pub kind: EventKind,
    pub t_start: f64,
    pub t_end: f64,
    pub duration_ms: f64,
    /// Index of the first and last sample in the run.
    pub first: usize,
    pub last: usize,
    /// Angle between the first and last gaze direction (saccades only).
    pub amplitude_deg: Option<f64>,
    /// Largest sample gaze velocity in the run (saccades only).
    pub peak_velocity_dps: Option<f64>,
}

/// Velocity-threshold identification: maximal runs of equally labeled
/// samples become events and are kept when their span lies inside the
/// kind's duration band.
pub fn detect_events(samples: &[GazeSample], cfg: &EventDetectionConfig) -> Result<Vec<GazeEvent>, GazeError> {
    let vel = angular_velocities(samples)?;
    Ok(events_from_velocities(samples, &vel, cfg))
}

pub fn events_from_velocities(samples: &[GazeSample], vel: &[Velocity], cfg: &EventDetectionConfig) -> Vec<GazeEvent> {
    let labels: Vec<Option<EventKind>> = vel.iter().map(|v| label_sample(*v, cfg)).collect();
    let mut events = Vec::new();
    let mut i = 0;
    while i < labels.len() {
        let Some(kind) = labels[i] else {
            i += 1;
            continue;
        };
        let mut j = i;
        while j + 1 < labels.len() && labels[j + 1] == Some(kind) {
            j += 1;
        }
        let duration_ms = (samples[j].t - samples[i].t) * 1000.0;
        if cfg.accepts(kind, duration_ms) {
            let (amplitude_deg, peak_velocity_dps) = match kind {
                EventKind::Fixation => (None, None),
                EventKind::Saccade => (
                    Some(samples[i].gaze_dir.angle_deg(samples[j].gaze_dir)),
                    vel[i..=j].iter().filter_map(|v| v.gaze).reduce(f64::max),
                ),
            };
            events.push(GazeEvent {
                kind,
                t_start: samples[i].t,
                t_end: samples[j].t,
                duration_ms,
                first: i,
                last: j,
                amplitude_deg,
                peak_velocity_dps,
            });
        }
        i = j + 1;
    }
    events
}
