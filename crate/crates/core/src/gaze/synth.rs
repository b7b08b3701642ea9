//! Seeded synthetic recordings for demos, fixtures and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GazeSample;
use crate::world::Vec3;
use crate::Technique;

pub const SYNTHETIC_RATE_HZ: f64 = 200.0;

fn direction(yaw_deg: f64, pitch_deg: f64) -> Vec3 {
    let (y, p) = (yaw_deg.to_radians(), pitch_deg.to_radians());
    Vec3::new(p.cos() * y.sin(), p.sin(), p.cos() * y.cos())
}

/// Per-technique behaviour: mean fixation length (s), saccade speed
/// (deg/s) and pupil level (mm).
fn profile(technique: Technique) -> (f64, f64, f64) {
    match technique {
        Technique::Teleport => (0.18, 320.0, 3.4),
        Technique::Steering => (0.32, 220.0, 3.9),
        Technique::LlmDriven => (0.25, 260.0, 3.6),
    }
}

/// A 200 Hz stream alternating fixations and saccades, with occasional
/// head turns, ramped blinks and a slowly drifting pupil.
pub fn synthetic_recording(seed: u64, duration_s: f64, technique: Technique) -> Vec<GazeSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (fix_mean, sac_speed, pupil_level) = profile(technique);
    let dt = 1.0 / SYNTHETIC_RATE_HZ;
    let n = (duration_s * SYNTHETIC_RATE_HZ).round() as usize;

    let (mut gy, mut gp) = (0.0_f64, 0.0_f64);
    let mut hy = 0.0_f64;
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        // fixation, possibly during a head turn
        let fix_len = ((fix_mean * rng.random_range(0.6..1.6)) / dt) as usize;
        let head_rate = if rng.random_bool(0.15) { rng.random_range(15.0..40.0) } else { rng.random_range(0.0..3.0) };
        let drift = (rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0));
        let blink_at = rng.random_bool(0.12).then_some(fix_len / 2);
        for k in 0..fix_len {
            if i >= n {
                break;
            }
            gy += drift.0 * dt;
            gp += drift.1 * dt;
            hy += head_rate * dt;
            let mut openness = 1.0;
            if let Some(b) = blink_at {
                // 4-sample ramp, 16 closed samples, 4-sample reopening
                let ramp = [0.8, 0.55, 0.3, 0.1];
                if k >= b && k < b + 4 {
                    openness = ramp[k - b];
                } else if k >= b + 4 && k < b + 20 {
                    openness = 0.0;
                } else if k >= b + 20 && k < b + 24 {
                    openness = ramp[3 - (k - b - 20)];
                }
            }
            let t = i as f64 * dt;
            let pupil = pupil_level + 0.25 * (t * 0.3).sin() + rng.random_range(-0.02..0.02);
            out.push(GazeSample {
                t,
                gaze_dir: direction(gy + hy, gp),
                head_dir: direction(hy, 0.0),
                pupil_mm: pupil,
                openness,
                valid: openness > 0.05,
            });
            i += 1;
        }
        // saccade
        let sac_len = rng.random_range(6..13);
        let speed = sac_speed * rng.random_range(0.7..1.3);
        let heading = rng.random_range(0.0..std::f64::consts::TAU);
        for _ in 0..sac_len {
            if i >= n {
                break;
            }
            gy = (gy + speed * dt * heading.cos()).clamp(-35.0, 35.0);
            gp = (gp + speed * dt * heading.sin()).clamp(-25.0, 25.0);
            let t = i as f64 * dt;
            out.push(GazeSample {
                t,
                gaze_dir: direction(gy + hy, gp),
                head_dir: direction(hy, 0.0),
                pupil_mm: pupil_level + 0.25 * (t * 0.3).sin(),
                openness: 1.0,
                valid: true,
            });
            i += 1;
        }
    }
    out
}
