//! The simulated town: roads, scene objects, visibility and prompt context.

mod geometry;
mod scene;
mod visibility;
mod walkable;

pub use geometry::{normalize_yaw, yaw_difference, yaw_direction, Pose, Rect, Vec3};
pub use scene::{load_scene, parse_scene, RoadSegment, SceneError, SceneObject, TownLayout};
pub use visibility::{
    relative_bearing, serialize_context, visible_objects, VisibilityConfig, NO_VISIBLE_OBJECTS,
};
pub use walkable::{
    clamp_motion, line_yaw_angle, nearest_walkable_point, snap_to_road, within_corridor, Snap,
    TIE_EPSILON,
};
