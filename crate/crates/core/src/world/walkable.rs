//! Road-network queries: centerline snapping, corridor membership and
//! motion clamping against corridor walls.

use super::geometry::{yaw_direction, Vec3};
use super::scene::TownLayout;

/// Distance band inside which two roads are considered equally close.
pub const TIE_EPSILON: f64 = 0.5;

/// Result of snapping a point to the road network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    pub point: Vec3,
    pub segment: usize,
    pub distance: f64,
    /// Whether the head-yaw rule picked a different road than plain distance.
    pub tie_broken: bool,
}

/// Angle in degrees between a road line and a yaw direction, in `[0, 90]`.
pub fn line_yaw_angle(layout: &TownLayout, segment: usize, yaw: f64) -> f64 {
    let d = layout.segments[segment].direction();
    let cos = d.dot(yaw_direction(yaw)).abs().min(1.0);
    cos.acos().to_degrees()
}

/// Snaps `p` onto the nearest road centerline.
///
/// Roads whose distance is within [`TIE_EPSILON`] of the minimum compete on
/// how well their line matches the head yaw; remaining ties go to the lowest
/// segment index.
pub fn snap_to_road(layout: &TownLayout, p: Vec3, yaw: f64) -> Snap {
    let candidates: Vec<(usize, Vec3, f64)> = layout
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (q, d) = s.closest_point(p);
            (i, q, d)
        })
        .collect();
    let nearest = candidates
        .iter()
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
        .copied()
        .expect("layout has at least one segment");

    let mut best = nearest;
    let mut best_angle = line_yaw_angle(layout, nearest.0, yaw);
    for &c in candidates.iter().filter(|c| c.2 - nearest.2 < TIE_EPSILON) {
        let angle = line_yaw_angle(layout, c.0, yaw);
        let better = angle < best_angle - 1e-9 || ((angle - best_angle).abs() <= 1e-9 && c.0 < best.0);
        if better {
            best = c;
            best_angle = angle;
        }
    }
    Snap {
        point: best.1,
        segment: best.0,
        distance: best.2,
        tie_broken: best.0 != nearest.0,
    }
}

/// Closest walkable centerline point, with the head-yaw tie-break.
pub fn nearest_walkable_point(layout: &TownLayout, p: Vec3, yaw: f64) -> Vec3 {
    snap_to_road(layout, p, yaw).point
}

/// Whether `p` lies within some corridor.
pub fn within_corridor(layout: &TownLayout, p: Vec3) -> bool {
    layout.segments.iter().any(|s| s.distance(p) <= s.half_width)
}

/// Moves from `from` toward `to`, stopping at the last corridor-valid point
/// reached along the straight ray.
pub fn clamp_motion(layout: &TownLayout, from: Vec3, to: Vec3) -> Vec3 {
    if within_corridor(layout, to) && within_corridor(layout, from) {
        return to;
    }
    let at = |s: f64| from + (to - from) * s;
    // Each capsule is convex, so the ray meets it in one interval.
    let mut spans: Vec<(f64, f64)> = layout
        .segments
        .iter()
        .filter_map(|seg| capsule_interval(|s| seg.distance(at(s)), seg.half_width))
        .collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut reach: Option<f64> = None;
    for (lo, hi) in spans {
        match reach {
            None if lo <= 0.0 => reach = Some(hi),
            Some(r) if lo <= r => reach = Some(r.max(hi)),
            _ => {}
        }
    }
    match reach {
        Some(r) if r >= 1.0 => to,
        Some(r) => at(r),
        None => from,
    }
}

/// Sub-interval of `[0, 1]` where the convex `dist(s)` stays within `limit`.
fn capsule_interval(dist: impl Fn(f64) -> f64, limit: f64) -> Option<(f64, f64)> {
    // ternary search for the minimum of a convex function
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..100 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if dist(m1) <= dist(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mid = 0.5 * (lo + hi);
    let mid = [0.0, mid, 1.0]
        .into_iter()
        .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
        .unwrap();
    if dist(mid) > limit {
        return None;
    }
    let edge = |outside: f64| {
        if dist(outside) <= limit {
            return outside;
        }
        let (mut inside, mut out) = (mid, outside);
        for _ in 0..80 {
            let m = 0.5 * (inside + out);
            if dist(m) <= limit {
                inside = m;
            } else {
                out = m;
            }
        }
        inside
    };
    Some((edge(0.0), edge(1.0)))
}
