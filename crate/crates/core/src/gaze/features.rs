use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    baseline_correct, detect_blinks, detect_events, smooth_pupil, Blink, BlinkConfig, EventDetectionConfig, EventKind,
    GazeError, GazeEvent, GazeSample, PupilConfig,
};
use crate::Technique;

pub const FEATURE_COUNT: usize = 31;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "fixation_count",
    "fixation_duration_mean",
    "fixation_duration_std",
    "fixation_duration_min",
    "fixation_duration_max",
    "fixation_duration_sum",
    "saccade_count",
    "saccade_duration_mean",
    "saccade_duration_std",
    "saccade_duration_min",
    "saccade_duration_max",
    "saccade_duration_sum",
    "saccade_peak_velocity_mean",
    "saccade_peak_velocity_std",
    "saccade_peak_velocity_min",
    "saccade_peak_velocity_max",
    "saccade_amplitude_mean",
    "saccade_amplitude_std",
    "saccade_amplitude_min",
    "saccade_amplitude_max",
    "sac_fix_duration_ratio",
    "sac_fix_count_ratio",
    "blink_count",
    "blink_duration_mean",
    "blink_duration_std",
    "blink_duration_min",
    "blink_duration_max",
    "pupil_norm_mean",
    "pupil_norm_std",
    "pupil_norm_min",
    "pupil_norm_max",
];

/// Window statistics in the order of [`FEATURE_NAMES`]. Durations are in
/// milliseconds, velocities in degrees per second, amplitudes in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: [f64; FEATURE_COUNT],
    pub label: Technique,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.values[i])
    }

    pub fn named(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        FEATURE_NAMES.iter().copied().zip(self.values.iter().copied())
    }
}

/// Count, mean, population std, min, max and sum; all zero when empty.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub sum: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    if xs.is_empty() {
        return Summary::default();
    }
    let n = xs.len() as f64;
    let sum: f64 = xs.iter().sum();
    let mean = sum / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Summary {
        count: xs.len(),
        mean,
        std: var.sqrt(),
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        sum,
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Aggregates the events, blinks and normalized pupil values of one window.
/// Events and blinks belong to the window containing their start; pupil
/// values are taken for `t` in `[window.0, window.1)`.
pub fn extract_features(
    events: &[GazeEvent],
    blinks: &[Blink],
    pupil_t: &[f64],
    pupil_norm: &[Option<f64>],
    window: (f64, f64),
    label: Technique,
) -> FeatureVector {
    let inside = |t: f64| t >= window.0 && t < window.1;
    let of_kind = |k: EventKind| events.iter().filter(move |e| e.kind == k && inside(e.t_start));
    let fix: Vec<f64> = of_kind(EventKind::Fixation).map(|e| e.duration_ms).collect();
    let sacs: Vec<&GazeEvent> = of_kind(EventKind::Saccade).collect();
    let sac: Vec<f64> = sacs.iter().map(|e| e.duration_ms).collect();
    let peak: Vec<f64> = sacs.iter().filter_map(|e| e.peak_velocity_dps).collect();
    let amp: Vec<f64> = sacs.iter().filter_map(|e| e.amplitude_deg).collect();
    let blink: Vec<f64> = blinks.iter().filter(|b| inside(b.t_start)).map(|b| b.duration_ms).collect();
    let pupil: Vec<f64> = pupil_t
        .iter()
        .zip(pupil_norm)
        .filter(|(t, _)| inside(**t))
        .filter_map(|(_, v)| *v)
        .collect();

    let (f, s, p, a, b, u) = (summarize(&fix), summarize(&sac), summarize(&peak), summarize(&amp), summarize(&blink), summarize(&pupil));
    let values = [
        f.count as f64,
        f.mean,
        f.std,
        f.min,
        f.max,
        f.sum,
        s.count as f64,
        s.mean,
        s.std,
        s.min,
        s.max,
        s.sum,
        p.mean,
        p.std,
        p.min,
        p.max,
        a.mean,
        a.std,
        a.min,
        a.max,
        ratio(s.sum, f.sum),
        ratio(s.count as f64, f.count as f64),
        b.count as f64,
        b.mean,
        b.std,
        b.min,
        b.max,
        u.mean,
        u.std,
        u.min,
        u.max,
    ];
    FeatureVector { values, label }
}

/// Non-overlapping windows of `window_s` from the first sample; a trailing
/// partial window is dropped. The recording is taken to last one sample
/// period past its final timestamp.
pub fn window_stream(samples: &[GazeSample], window_s: f64) -> Vec<(f64, f64)> {
    if samples.len() < 2 || !(window_s > 0.0) {
        return Vec::new();
    }
    let mut dts: Vec<f64> = samples.windows(2).map(|w| w[1].t - w[0].t).collect();
    dts.sort_by(f64::total_cmp);
    let period = dts[dts.len() / 2];
    let t0 = samples[0].t;
    let duration = samples[samples.len() - 1].t - t0 + period;
    let n = (duration / window_s + 1e-9).floor() as usize;
    (0..n).map(|k| (t0 + k as f64 * window_s, t0 + (k + 1) as f64 * window_s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub window_s: f64,
    /// End of the pupil baseline interval; defaults to one baseline length
    /// after the first sample.
    pub baseline_t0: Option<f64>,
    pub events: EventDetectionConfig,
    pub blinks: BlinkConfig,
    pub pupil: PupilConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            window_s: 20.0,
            baseline_t0: None,
            events: EventDetectionConfig::default(),
            blinks: BlinkConfig::default(),
            pupil: PupilConfig::default(),
        }
    }
}

/// Full pipeline from raw samples to one feature vector per window.
pub fn recording_features(samples: &[GazeSample], cfg: &FeatureConfig, label: Technique) -> Result<Vec<FeatureVector>, GazeError> {
    let events = detect_events(samples, &cfg.events)?;
    let blinks = detect_blinks(samples, &cfg.blinks);
    let smoothed = smooth_pupil(samples, &cfg.pupil)?;
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let t0 = cfg.baseline_t0.unwrap_or(t[0] + cfg.pupil.baseline_s);
    let norm = baseline_correct(&t, &smoothed, t0, cfg.pupil.baseline_s)?;
    Ok(window_stream(samples, cfg.window_s)
        .into_iter()
        .map(|w| extract_features(&events, &blinks, &t, &norm, w, label))
        .collect())
}

/// Writes the feature matrix with a header of the 31 names, `label` and,
/// when given, a `group` column.
pub fn write_feature_csv<W: Write>(rows: &[FeatureVector], groups: Option<&[String]>, writer: W) -> Result<(), GazeError> {
    if let Some(g) = groups {
        if g.len() != rows.len() {
            return Err(GazeError::InvalidConfig(format!("{} groups for {} rows", g.len(), rows.len())));
        }
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = FEATURE_NAMES.to_vec();
    header.push("label");
    if groups.is_some() {
        header.push("group");
    }
    w.write_record(&header)?;
    for (i, r) in rows.iter().enumerate() {
        let mut rec: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
        rec.push(r.label.as_str().to_string());
        if let Some(g) = groups {
            rec.push(g[i].clone());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
