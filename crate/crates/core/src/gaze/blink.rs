use serde::{Deserialize, Serialize};

use super::GazeSample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlinkConfig {
    /// Openness at or below this counts as closed.
    pub closed_threshold: f64,
    /// Shortest closed run, samples.
    pub min_closed_samples: usize,
    /// Strictly decreasing samples required right before closure.
    pub min_ramp_samples: usize,
    /// Longer closures are treated as tracking loss.
    pub max_duration_ms: f64,
}

impl Default for BlinkConfig {
    fn default() -> Self {
        Self { closed_threshold: 0.05, min_closed_samples: 2, min_ramp_samples: 3, max_duration_ms: 500.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blink {
    pub t_start: f64,
    pub t_end: f64,
    pub duration_ms: f64,
}

/// Closed-eye runs that follow a decreasing openness ramp. The validity
/// flag is ignored: trackers commonly mark closed frames invalid.
pub fn detect_blinks(samples: &[GazeSample], cfg: &BlinkConfig) -> Vec<Blink> {
    let closed = |i: usize| samples[i].openness <= cfg.closed_threshold;
    let mut out = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        if !closed(i) {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < samples.len() && closed(j + 1) {
            j += 1;
        }
        let long_enough = j + 1 - i >= cfg.min_closed_samples.max(2);
        let ramp = cfg.min_ramp_samples;
        let has_ramp = i >= ramp && (ramp < 2 || (i - ramp..i - 1).all(|k| samples[k].openness > samples[k + 1].openness));
        let duration_ms = (samples[j].t - samples[i].t) * 1000.0;
        if long_enough && has_ramp && duration_ms > 0.0 && duration_ms <= cfg.max_duration_ms {
            out.push(Blink { t_start: samples[i].t, t_end: samples[j].t, duration_ms });
        }
        i = j + 1;
    }
    out
}
