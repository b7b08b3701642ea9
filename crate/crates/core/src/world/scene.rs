use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{closest_on_segment, Pose, Rect, Vec3};

const DEFAULT_SCENE: &str = include_str!("../../assets/default_scene.json");

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("failed to read scene file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed scene: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scene field `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> SceneError {
    SceneError::Validation {
        field: field.into(),
        reason: reason.into(),
    }
}

/// A tagged object in the town that can appear in the prompt context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneObject {
    pub id: String,
    pub name: String,
    pub color: String,
    pub tag: String,
    pub position: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub footprint: Option<Rect>,
}

/// Road centerline with a walkable corridor around it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadSegment {
    pub a: Vec3,
    pub b: Vec3,
    pub half_width: f64,
}

impl RoadSegment {
    /// Closest centerline point to `p` and its ground distance.
    pub fn closest_point(&self, p: Vec3) -> (Vec3, f64) {
        let (q, _) = closest_on_segment(self.a, self.b, p);
        (q, q.ground_distance(p))
    }

    pub fn distance(&self, p: Vec3) -> f64 {
        self.closest_point(p).1
    }

    /// Unit ground direction from `a` to `b`.
    pub fn direction(&self) -> Vec3 {
        Vec3::new(self.b.x - self.a.x, 0.0, self.b.z - self.a.z)
            .normalized()
            .unwrap_or(Vec3::new(0.0, 0.0, 1.0))
    }

    pub fn length(&self) -> f64 {
        self.a.ground_distance(self.b)
    }
}

/// The immutable town: roads, objects, start pose and ordered targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TownLayout {
    pub segments: Vec<RoadSegment>,
    #[serde(default)]
    pub objects: Vec<SceneObject>,
    pub start_pose: Pose,
    #[serde(default)]
    pub targets: Vec<Vec3>,
}

impl TownLayout {
    /// The bundled 4x4 grid town.
    pub fn default_scene() -> TownLayout {
        parse_scene(DEFAULT_SCENE).expect("bundled scene is valid")
    }

    pub fn object(&self, id: &str) -> Option<&SceneObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Checks every layout invariant, naming the first offending field.
    pub fn validate(&self) -> Result<(), SceneError> {
        if self.segments.is_empty() {
            return Err(invalid("segments", "at least one road segment is required"));
        }
        for (i, s) in self.segments.iter().enumerate() {
            let field = format!("segments[{i}]");
            if !s.a.is_finite() || !s.b.is_finite() {
                return Err(invalid(field, "endpoints must be finite"));
            }
            if s.a.ground_distance(s.b) == 0.0 {
                return Err(invalid(format!("{field}.b"), "endpoints must differ"));
            }
            if !(s.half_width > 0.0 && s.half_width.is_finite()) {
                return Err(invalid(format!("{field}.half_width"), "must be positive"));
            }
        }

        let mut ids = HashSet::new();
        for (i, o) in self.objects.iter().enumerate() {
            if !ids.insert(o.id.as_str()) {
                return Err(invalid(format!("objects[{i}].id"), format!("duplicate id `{}`", o.id)));
            }
            if o.tag.trim().is_empty() {
                return Err(invalid(format!("objects[{i}].tag"), "tag must be non-empty"));
            }
            if !o.position.is_finite() {
                return Err(invalid(format!("objects[{i}].position"), "must be finite"));
            }
            if let Some(r) = &o.footprint {
                let finite = [r.min_x, r.min_z, r.max_x, r.max_z].iter().all(|v| v.is_finite());
                if !finite || r.min_x > r.max_x || r.min_z > r.max_z {
                    return Err(invalid(format!("objects[{i}].footprint"), "min must not exceed max"));
                }
            }
        }

        if !self.start_pose.position.is_finite() || !self.start_pose.yaw.is_finite() {
            return Err(invalid("start_pose", "must be finite"));
        }
        for (i, t) in self.targets.iter().enumerate() {
            if !t.is_finite() {
                return Err(invalid(format!("targets[{i}]"), "must be finite"));
            }
            if !super::within_corridor(self, *t) {
                return Err(invalid(format!("targets[{i}]"), "must lie inside a road corridor"));
            }
        }
        Ok(())
    }
}

/// Parses and validates a scene document.
pub fn parse_scene(text: &str) -> Result<TownLayout, SceneError> {
    let mut layout: TownLayout = serde_json::from_str(text)?;
    layout.start_pose = Pose::new(layout.start_pose.position, layout.start_pose.yaw);
    layout.validate()?;
    Ok(layout)
}

/// Reads a scene file from disk.
pub fn load_scene(path: impl AsRef<Path>) -> Result<TownLayout, SceneError> {
    let text = std::fs::read_to_string(path)?;
    parse_scene(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scene_has_grid_topology() {
        let town = TownLayout::default_scene();
        assert_eq!(town.segments.len(), 8);
        assert_eq!(town.targets.len(), 2);
        let mut vertical: Vec<f64> = town
            .segments
            .iter()
            .filter(|s| s.a.x == s.b.x)
            .map(|s| {
                assert_eq!((s.a.z.min(s.b.z), s.a.z.max(s.b.z)), (0.0, 300.0));
                s.a.x
            })
            .collect();
        vertical.sort_by(f64::total_cmp);
        assert_eq!(vertical, vec![0.0, 100.0, 200.0, 300.0]);
        let mut horizontal: Vec<f64> = town
            .segments
            .iter()
            .filter(|s| s.a.z == s.b.z)
            .map(|s| {
                assert_eq!((s.a.x.min(s.b.x), s.a.x.max(s.b.x)), (0.0, 300.0));
                s.a.z
            })
            .collect();
        horizontal.sort_by(f64::total_cmp);
        assert_eq!(horizontal, vec![0.0, 100.0, 200.0, 300.0]);
        assert!(town.segments.iter().all(|s| s.half_width == 4.0));
    }

    #[test]
    fn rejects_empty_segments() {
        let text = r#"{"segments": [], "objects": [], "start_pose": {"position": {"x":0,"y":0,"z":0}, "yaw": 0}, "targets": []}"#;
        match parse_scene(text) {
            Err(SceneError::Validation { field, .. }) => assert_eq!(field, "segments"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicate_object_ids() {
        let mut town = TownLayout::default_scene();
        let dup = town.objects[0].clone();
        town.objects.push(dup);
        let text = serde_json::to_string(&town).unwrap();
        match parse_scene(&text) {
            Err(SceneError::Validation { field, reason }) => {
                assert!(field.ends_with(".id"), "{field}");
                assert!(reason.contains("duplicate"));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_target_off_road() {
        let mut town = TownLayout::default_scene();
        town.targets.push(Vec3::new(50.0, 0.0, 50.0));
        let err = parse_scene(&serde_json::to_string(&town).unwrap()).unwrap_err();
        assert!(matches!(err, SceneError::Validation { ref field, .. } if field == "targets[2]"));
    }

    #[test]
    fn rejects_degenerate_segment_and_bad_width() {
        let mut town = TownLayout::default_scene();
        town.segments[3].b = town.segments[3].a;
        assert!(matches!(town.validate(), Err(SceneError::Validation { ref field, .. }) if field == "segments[3].b"));
        let mut town = TownLayout::default_scene();
        town.segments[0].half_width = 0.0;
        assert!(matches!(town.validate(), Err(SceneError::Validation { ref field, .. }) if field == "segments[0].half_width"));
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(parse_scene("{\"segments\": ["), Err(SceneError::Parse(_))));
        assert!(matches!(parse_scene("[]"), Err(SceneError::Parse(_))));
    }

    #[test]
    fn start_yaw_is_normalized() {
        let mut town = TownLayout::default_scene();
        town.start_pose.yaw = -90.0;
        let parsed = parse_scene(&serde_json::to_string(&town).unwrap()).unwrap();
        assert_eq!(parsed.start_pose.yaw, 270.0);
    }
}
