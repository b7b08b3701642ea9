use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::geometry::{yaw_difference, Pose};
use super::scene::{SceneObject, TownLayout};

/// Frustum used to decide which objects the user can currently see.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VisibilityConfig {
    pub max_distance: f64,
    pub fov_half_angle: f64,
    pub occlusion_enabled: bool,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        Self {
            max_distance: 50.0,
            fov_half_angle: 57.5,
            occlusion_enabled: true,
        }
    }
}

impl VisibilityConfig {
    pub fn is_valid(&self) -> bool {
        self.max_distance > 0.0 && self.fov_half_angle > 0.0 && self.fov_half_angle <= 180.0
    }
}

/// Horizontal bearing of `target` relative to the pose yaw, in `(-180, 180]`.
pub fn relative_bearing(pose: &Pose, target: super::Vec3) -> f64 {
    let dx = target.x - pose.position.x;
    let dz = target.z - pose.position.z;
    if dx == 0.0 && dz == 0.0 {
        return 0.0;
    }
    yaw_difference(dx.atan2(dz).to_degrees(), pose.yaw)
}

/// Tagged objects inside the view frustum with a clear line of sight,
/// nearest first (ties by id).
pub fn visible_objects<'a>(
    layout: &'a TownLayout,
    pose: &Pose,
    cfg: &VisibilityConfig,
) -> Vec<&'a SceneObject> {
    let eye = pose.position;
    let mut seen: Vec<(f64, &SceneObject)> = layout
        .objects
        .iter()
        .filter(|o| !o.tag.trim().is_empty())
        .filter_map(|o| {
            let d = eye.ground_distance(o.position);
            (d <= cfg.max_distance).then_some((d, o))
        })
        .filter(|(_, o)| relative_bearing(pose, o.position).abs() <= cfg.fov_half_angle)
        .filter(|(_, o)| !cfg.occlusion_enabled || line_of_sight(layout, pose, o))
        .collect();
    seen.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
    seen.into_iter().map(|(_, o)| o).collect()
}

fn line_of_sight(layout: &TownLayout, pose: &Pose, target: &SceneObject) -> bool {
    layout
        .objects
        .iter()
        .filter(|o| o.id != target.id)
        .filter_map(|o| o.footprint.as_ref())
        .all(|r| !r.intersects_segment(pose.position, target.position))
}

/// Line used when nothing is in view.
pub const NO_VISIBLE_OBJECTS: &str = "No visible objects.";

/// Renders the prompt context: one line per object, then the user pose.
pub fn serialize_context(objects: &[&SceneObject], pose: &Pose) -> String {
    let mut out = String::new();
    if objects.is_empty() {
        out.push_str(NO_VISIBLE_OBJECTS);
        out.push('\n');
    }
    for o in objects {
        let _ = writeln!(out, "{} ({} {}) at {:.1}", o.name, o.color, o.tag, o.position);
    }
    let _ = write!(out, "User at {:.1} facing yaw {:.1} degrees", pose.position, pose.yaw);
    out
}
