use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{GazeError, GazeSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PupilConfig {
    /// Savitzky-Golay window length in samples, odd.
    pub window: usize,
    /// Savitzky-Golay polynomial order.
    pub order: usize,
    /// Longest gap bridged by linear interpolation, measured between the
    /// valid samples on either side.
    pub max_gap_ms: f64,
    /// Samples at or below this openness are treated as missing.
    pub closed_threshold: f64,
    /// Length of the pre-stimulus baseline interval, seconds.
    pub baseline_s: f64,
}

impl Default for PupilConfig {
    fn default() -> Self {
        Self { window: 31, order: 3, max_gap_ms: 75.0, closed_threshold: 0.05, baseline_s: 1.0 }
    }
}

impl PupilConfig {
    pub fn is_valid(&self) -> bool {
        self.window % 2 == 1
            && self.window > self.order
            && self.max_gap_ms >= 0.0
            && self.baseline_s > 0.0
            && self.baseline_s.is_finite()
    }
}

/// Weights that evaluate, at offset `at` from the window center, the
/// least-squares polynomial of degree `order` fitted over offsets
/// `-half..=half`.
pub fn savitzky_golay_weights(half: usize, order: usize, at: f64) -> Vec<f64> {
    let h = half.max(1) as f64;
    let xs: Vec<f64> = (-(half as i64)..=half as i64).map(|j| j as f64 / h).collect();
    let p = order + 1;
    // offsets are scaled to [-1, 1] to keep the normal equations well conditioned
    let a = DMatrix::from_fn(xs.len(), p, |r, c| xs[r].powi(c as i32));
    let e = DVector::from_fn(p, |k, _| (at / h).powi(k as i32));
    let y = (a.transpose() * &a).lu().solve(&e).expect("Vandermonde normal matrix is non-singular");
    (a * y).iter().copied().collect()
}

/// Savitzky-Golay smoothing over uniformly spaced values. The first and last
/// `window / 2` outputs evaluate the polynomial fitted to the edge window.
pub fn savitzky_golay(values: &[f64], window: usize, order: usize) -> Result<Vec<f64>, GazeError> {
    if window.is_multiple_of(2) || window <= order {
        return Err(GazeError::InvalidConfig(format!("window {window} must be odd and exceed order {order}")));
    }
    if values.len() < window {
        return Err(GazeError::TooFewSamples { needed: window, got: values.len() });
    }
    let half = window / 2;
    let n = values.len();
    let apply = |w: &[f64], start: usize| -> f64 { w.iter().zip(&values[start..start + window]).map(|(a, b)| a * b).sum() };
    let center = savitzky_golay_weights(half, order, 0.0);
    let mut out = vec![0.0; n];
    for i in half..n - half {
        out[i] = apply(&center, i - half);
    }
    for i in 0..half {
        out[i] = apply(&savitzky_golay_weights(half, order, i as f64 - half as f64), 0);
        let k = n - half + i;
        out[k] = apply(&savitzky_golay_weights(half, order, (i + 1) as f64), n - window);
    }
    Ok(out)
}

/// Linear interpolation across missing stretches whose valid neighbors are
/// at most `max_gap_s` apart. Leading and trailing gaps stay missing.
pub fn interpolate_gaps(t: &[f64], values: &[Option<f64>], max_gap_s: f64) -> Vec<Option<f64>> {
    let mut out = values.to_vec();
    let mut last_valid: Option<usize> = None;
    for i in 0..values.len() {
        if values[i].is_none() {
            continue;
        }
        if let Some(a) = last_valid {
            if i > a + 1 && t[i] - t[a] <= max_gap_s + 1e-9 {
                let (va, vb) = (values[a].unwrap(), values[i].unwrap());
                for k in a + 1..i {
                    let f = (t[k] - t[a]) / (t[i] - t[a]);
                    out[k] = Some(va + f * (vb - va));
                }
            }
        }
        last_valid = Some(i);
    }
    out
}

/// Maximal runs of present values as half-open index ranges.
pub fn present_runs(values: &[Option<f64>]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, v) in values.iter().enumerate() {
        match (v.is_some(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, values.len()));
    }
    runs
}

/// Pupil preprocessing: closed or invalid frames are dropped, short gaps
/// interpolated, and each contiguous stretch smoothed. Stretches shorter
/// than the filter window are left missing.
pub fn smooth_pupil(samples: &[GazeSample], cfg: &PupilConfig) -> Result<Vec<Option<f64>>, GazeError> {
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let raw: Vec<Option<f64>> = samples
        .iter()
        .map(|s| {
            (s.valid && s.openness > cfg.closed_threshold && s.pupil_mm.is_finite() && s.pupil_mm > 0.0)
                .then_some(s.pupil_mm)
        })
        .collect();
    let filled = interpolate_gaps(&t, &raw, cfg.max_gap_ms / 1000.0);
    let mut out = vec![None; samples.len()];
    let mut longest = 0;
    for (a, b) in present_runs(&filled) {
        longest = longest.max(b - a);
        if b - a < cfg.window {
            continue;
        }
        let run: Vec<f64> = filled[a..b].iter().map(|v| v.unwrap()).collect();
        for (k, v) in savitzky_golay(&run, cfg.window, cfg.order)?.into_iter().enumerate() {
            out[a + k] = Some(v);
        }
    }
    if out.iter().all(Option::is_none) {
        return Err(GazeError::TooFewSamples { needed: cfg.window, got: longest });
    }
    Ok(out)
}

/// Mean of the present values with `t` in `[t0 - length, t0]`.
pub fn baseline_mean(t: &[f64], values: &[Option<f64>], t0: f64, length: f64) -> Option<f64> {
    let (sum, n) = t
        .iter()
        .zip(values)
        .filter(|(ti, _)| **ti >= t0 - length - 1e-9 && **ti <= t0 + 1e-9)
        .filter_map(|(_, v)| *v)
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Divisive baseline correction against the interval ending at `t0`.
pub fn baseline_correct(t: &[f64], values: &[Option<f64>], t0: f64, length: f64) -> Result<Vec<Option<f64>>, GazeError> {
    match baseline_mean(t, values, t0, length) {
        Some(m) if m > 0.0 && m.is_finite() => Ok(values.iter().map(|v| v.map(|v| v / m)).collect()),
        Some(m) => Err(GazeError::DegenerateBaseline(format!("baseline mean {m} is not positive"))),
        None => Err(GazeError::DegenerateBaseline(format!("no samples in [{}, {t0}]", t0 - length))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Vec3;

    fn pupil(values: &[f64]) -> Vec<GazeSample> {
        let d = Vec3::new(0.0, 0.0, 1.0);
        values.iter().enumerate().map(|(i, &p)| GazeSample::new(i as f64 * 0.005, d, d, p, 1.0)).collect()
    }

    #[test]
    fn center_weights_match_closed_form() {
        // quadratic/cubic SG center weights for half-width m
        let m = 15i64;
        let den = ((2 * m - 1) * (2 * m + 1) * (2 * m + 3)) as f64;
        let w = savitzky_golay_weights(15, 3, 0.0);
        for (k, j) in (-m..=m).enumerate() {
            let c = (3.0 * (3 * m * m + 3 * m - 1) as f64 - 15.0 * (j * j) as f64) / den;
            assert!((w[k] - c).abs() < 1e-12, "{j}: {} vs {c}", w[k]);
        }
        assert!((w[15] - 2157.0 / 29667.0).abs() < 1e-12);
    }

    #[test]
    fn constants_are_preserved() {
        let s = smooth_pupil(&pupil(&[4.0; 100]), &PupilConfig::default()).unwrap();
        assert!(s.iter().all(|v| (v.unwrap() - 4.0).abs() < 1e-9));
    }

    #[test]
    fn cubics_are_reproduced_including_edges() {
        let f = |x: f64| 3.0 + 0.02 * x - 0.001 * x * x + 1e-5 * x * x * x;
        let v: Vec<f64> = (0..80).map(|i| f(i as f64)).collect();
        let s = savitzky_golay(&v, 31, 3).unwrap();
        for (a, b) in s.iter().zip(&v) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn short_gap_is_interpolated_long_gap_is_not() {
        let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.005).collect();
        let mut v: Vec<Option<f64>> = (0..40).map(|i| Some(i as f64)).collect();
        for k in 5..10 {
            v[k] = None; // 30 ms bridge
        }
        for k in 15..31 {
            v[k] = None; // 85 ms bridge
        }
        let f = interpolate_gaps(&t, &v, 0.075);
        assert!((5..10).all(|k| (f[k].unwrap() - k as f64).abs() < 1e-9));
        assert!((15..31).all(|k| f[k].is_none()));
    }

    #[test]
    fn too_short_recording_fails() {
        assert!(matches!(
            smooth_pupil(&pupil(&[4.0; 20]), &PupilConfig::default()),
            Err(GazeError::TooFewSamples { needed: 31, got: 20 })
        ));
    }

    #[test]
    fn closed_frames_are_missing() {
        let mut s = pupil(&[4.0; 100]);
        for x in &mut s[40..60] {
            x.openness = 0.0; // 105 ms bridge, too long
        }
        let out = smooth_pupil(&s, &PupilConfig::default()).unwrap();
        assert!(out[40..60].iter().all(Option::is_none));
        assert!(out[..40].iter().all(Option::is_some));
    }

    #[test]
    fn divisive_baseline() {
        let t = [0.0, 0.5, 1.0, 1.5];
        let v = [Some(4.0), Some(4.0), Some(4.0), Some(4.4)];
        let c = baseline_correct(&t, &v, 1.0, 1.0).unwrap();
        assert!((c[3].unwrap() - 1.1).abs() < 1e-12);
        assert!(matches!(baseline_correct(&t, &v, 10.0, 1.0), Err(GazeError::DegenerateBaseline(_))));
        let z = [Some(0.0); 4];
        assert!(matches!(baseline_correct(&t, &z, 1.0, 1.0), Err(GazeError::DegenerateBaseline(_))));
    }
}
