//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wayfarer_core::analytics::Dataset;
use wayfarer_core::gaze::{EventKind, GazeSample};
use wayfarer_core::world::{TownLayout, Vec3};
use wayfarer_core::Technique;

pub const DT: f64 = 0.005;

/// A synthetic gaze trace together with the per-step speeds it was built
/// from, so an oracle can label samples without re-deriving velocities.
pub struct IvtTrace {
    pub samples: Vec<GazeSample>,
    /// Gaze and head speed of the step ending at each sample (index 0 unused).
    pub gaze_speed: Vec<f64>,
    pub head_speed: Vec<f64>,
}

fn planar(yaw_deg: f64) -> Vec3 {
    let r = yaw_deg.to_radians();
    Vec3::new(r.sin(), 0.0, r.cos())
}

/// Piecewise-constant speed regimes kept away from every threshold so that
/// floating-point noise in the angle computation cannot flip a label.
pub fn ivt_trace(seed: u64, max_len: usize) -> IvtTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_len);
    let (mut gaze_speed, mut head_speed, mut valid) = (vec![0.0; n], vec![0.0; n], vec![true; n]);
    let mut i = 1;
    while i < n {
        let len = rng.random_range(1..=110).min(n - i);
        let (g, h, ok) = match rng.random_range(0..6) {
            0 | 1 => (rng.random_range(0.0..25.0), rng.random_range(0.0..5.0), true),
            2 => (rng.random_range(45.0..600.0), rng.random_range(0.0..60.0), true),
            3 => (rng.random_range(32.0..38.0), rng.random_range(0.0..5.0), true),
            4 => (rng.random_range(0.0..25.0), rng.random_range(9.0..60.0), true),
            _ => (rng.random_range(0.0..25.0), 0.0, false),
        };
        for k in i..i + len {
            gaze_speed[k] = g;
            head_speed[k] = h;
            valid[k] = ok || rng.random_bool(0.3);
        }
        i += len;
    }
    valid[0] = rng.random_bool(0.9);
    let (mut gy, mut hy) = (rng.random_range(-90.0..90.0), rng.random_range(-90.0..90.0));
    let samples = (0..n)
        .map(|k| {
            if k > 0 {
                // Alternate turn direction so directions stay in a half-plane.
                let sign = if (k / 40) % 2 == 0 { 1.0 } else { -1.0 };
                gy += sign * gaze_speed[k] * DT;
                hy += sign * head_speed[k] * DT;
            }
            let mut s = GazeSample::new(k as f64 * DT, planar(gy), planar(hy), 3.5, 1.0);
            s.valid = valid[k];
            s
        })
        .collect();
    IvtTrace { samples, gaze_speed, head_speed }
}

/// Oracle event: kind and first/last sample index.
pub type OracleEvent = (EventKind, usize, usize);

/// Per-sample labeling from the generating speeds, then maximal runs kept
/// when their interval count lies strictly inside the duration bands
/// (fixation 80 to 500 ms, saccade 20 to 70 ms, at 5 ms per interval).
pub fn ivt_oracle(trace: &IvtTrace) -> Vec<OracleEvent> {
    let s = &trace.samples;
    let n = s.len();
    let step_label = |k: usize| -> Option<EventKind> {
        if !(s[k].valid && s[k - 1].valid) {
            return None;
        }
        let (g, h) = (trace.gaze_speed[k], trace.head_speed[k]);
        if g < 30.0 && h < 7.0 {
            Some(EventKind::Fixation)
        } else if g > 40.0 {
            Some(EventKind::Saccade)
        } else {
            None
        }
    };
    let labels: Vec<Option<EventKind>> = (0..n)
        .map(|k| match k {
            0 if s[0].valid && n > 1 => step_label(1),
            0 => None,
            _ => step_label(k),
        })
        .collect();
    let mut out = Vec::new();
    for start in 0..n {
        let Some(kind) = labels[start] else { continue };
        if start > 0 && labels[start - 1] == Some(kind) {
            continue;
        }
        let mut end = start;
        while end + 1 < n && labels[end + 1] == Some(kind) {
            end += 1;
        }
        let intervals = end - start;
        let keep = match kind {
            EventKind::Fixation => (17..=99).contains(&intervals),
            EventKind::Saccade => (5..=13).contains(&intervals),
        };
        if keep {
            out.push((kind, start, end));
        }
    }
    out
}

/// Every centerline sampled at 1 cm; per segment, the closest sample and
/// its distance. Exact on lattice queries against axis-aligned roads whose
/// endpoints sit on the lattice.
pub fn grid_nearest_per_segment(layout: &TownLayout, p: Vec3) -> Vec<(Vec3, f64)> {
    layout
        .segments
        .iter()
        .map(|seg| {
            let steps = (seg.a.ground_distance(seg.b) / 0.01).round() as usize;
            let mut best = (seg.a, f64::INFINITY);
            for k in 0..=steps {
                let f = k as f64 / steps as f64;
                let q = Vec3::new(seg.a.x + (seg.b.x - seg.a.x) * f, 0.0, seg.a.z + (seg.b.z - seg.a.z) * f);
                let d = ((q.x - p.x).powi(2) + (q.z - p.z).powi(2)).sqrt();
                if d < best.1 {
                    best = (q, d);
                }
            }
            best
        })
        .collect()
}

/// Angle between the road line and the yaw direction folded into [0, 90].
pub fn line_angle(a: Vec3, b: Vec3, yaw: f64) -> f64 {
    let road = (b.x - a.x).atan2(b.z - a.z).to_degrees();
    let d = (road - yaw).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// Grid search with the head-yaw tie-break: roads within `tie` of the
/// minimum compete on line angle, then on index. Returns the chosen point
/// and whether the choice differs from the plainly nearest road.
pub fn grid_snap(layout: &TownLayout, p: Vec3, yaw: f64, tie: f64) -> (Vec3, bool) {
    let per = grid_nearest_per_segment(layout, p);
    let nearest = (0..per.len()).min_by(|&a, &b| per[a].1.total_cmp(&per[b].1).then(a.cmp(&b))).unwrap();
    let m = per[nearest].1;
    let chosen = (0..per.len())
        .filter(|&i| per[i].1 - m < tie)
        .min_by(|&a, &b| {
            let (sa, sb) = (&layout.segments[a], &layout.segments[b]);
            let (aa, ab) = (line_angle(sa.a, sa.b, yaw), line_angle(sb.a, sb.b, yaw));
            let close = (aa - ab).abs() <= 1e-9;
            (if close { std::cmp::Ordering::Equal } else { aa.total_cmp(&ab) }).then(a.cmp(&b))
        })
        .unwrap();
    (per[chosen].0, chosen != nearest)
}

/// All-pairs k-NN: z-score with training mean and population std (constant
/// columns ignored), squared Euclidean distance, stable sort by
/// (distance, index), majority vote with ties to the nearest tied label.
pub fn knn_oracle(train: &Dataset, test: &Dataset, k: usize) -> Vec<Technique> {
    let n = train.len() as f64;
    let d = train.width();
    let mean: Vec<f64> = (0..d).map(|j| train.rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let sd: Vec<f64> = (0..d)
        .map(|j| (train.rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    let kept: Vec<usize> = (0..d).filter(|&j| sd[j] > 1e-12 * mean[j].abs().max(1.0)).collect();
    let z = |r: &[f64]| -> Vec<f64> { kept.iter().map(|&j| (r[j] - mean[j]) / sd[j]).collect() };
    let zt: Vec<Vec<f64>> = train.rows.iter().map(|r| z(r)).collect();
    test.rows
        .iter()
        .map(|r| {
            let q = z(r);
            let mut all: Vec<(f64, usize)> = zt
                .iter()
                .enumerate()
                .map(|(i, t)| (t.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let top = &all[..k.min(all.len())];
            let count = |l: Technique| top.iter().filter(|(_, i)| train.labels[*i] == l).count();
            let best = Technique::ALL.iter().map(|&l| count(l)).max().unwrap();
            top.iter().map(|(_, i)| train.labels[*i]).find(|&l| count(l) == best).unwrap()
        })
        .collect()
}

/// Kruskal-Wallis H from first principles: average ranks over the pooled
/// sample, tie correction 1 - sum(t^3 - t) / (n^3 - n).
pub fn kruskal_oracle(groups: &[Vec<f64>]) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let rank = |v: f64| {
        let below = pooled.iter().filter(|&&x| x < v).count() as f64;
        let equal = pooled.iter().filter(|&&x| x == v).count() as f64;
        below + (equal + 1.0) / 2.0
    };
    let s: f64 = groups
        .iter()
        .map(|g| {
            let r: f64 = g.iter().map(|&v| rank(v)).sum();
            r * r / g.len() as f64
        })
        .sum();
    let h = 12.0 / (n * (n + 1.0)) * s - 3.0 * (n + 1.0);
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&x| x == sorted[i]).count();
        ties += (j as f64).powi(3) - j as f64;
        i += j;
    }
    h / (1.0 - ties / (n.powi(3) - n))
}
