use serde::{Deserialize, Serialize};

use super::steering::{SteeringConfig, SteeringState};
use crate::world::{clamp_motion, nearest_walkable_point, within_corridor, yaw_direction, Pose, TownLayout, Vec3};
use crate::Technique;

/// Tolerance for comparing simulation times built from tick counts.
pub const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduledTeleport {
    pub target: Vec3,
    pub execute_at: f64,
}

/// Controller arc feedback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Green,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeleportCause {
    Controller,
    Scheduled,
}

/// Something observable that happened during a step or command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimEvent {
    Teleported { from: Vec3, to: Vec3, cause: TeleportCause },
    TargetReached { index: usize, position: Vec3 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub pose: Pose,
    pub technique: Technique,
    pub steering: SteeringState,
    pub pending: Option<ScheduledTeleport>,
    pub next_target_index: usize,
    pub done: bool,
}

impl SimState {
    pub fn new(layout: &TownLayout, technique: Technique) -> Self {
        let pose = layout.start_pose;
        Self {
            t: 0.0,
            pose,
            technique,
            steering: SteeringState::new(pose.yaw),
            pending: None,
            next_target_index: 0,
            done: layout.targets.is_empty(),
        }
    }

    /// Advances the state by `dt` seconds.
    ///
    /// Steering moves along the heading and stops at corridor walls; a
    /// pending teleport fires on the first step that reaches `execute_at`.
    pub fn step(&mut self, layout: &TownLayout, steering: &SteeringConfig, target_radius: f64, dt: f64) -> Vec<SimEvent> {
        let mut events = Vec::new();
        if self.technique == Technique::Steering && self.steering.moving {
            let from = self.pose.position;
            let to = from + yaw_direction(self.steering.heading) * (self.steering.speed(steering) * dt);
            self.pose.position = clamp_motion(layout, from, to);
            self.pose.yaw = self.steering.heading;
        }
        if let Some(p) = self.pending {
            if self.t + dt >= p.execute_at - TIME_EPS {
                let from = self.pose.position;
                self.pose.position = p.target;
                self.pending = None;
                events.push(SimEvent::Teleported { from, to: p.target, cause: TeleportCause::Scheduled });
            }
        }
        self.t += dt;
        self.check_targets(layout, target_radius, &mut events);
        events
    }

    /// Point-and-release teleport. Valid aims move the user instantly to the
    /// snapped centerline point; invalid aims leave the state untouched.
    pub fn controller_teleport(&mut self, layout: &TownLayout, aim: Vec3) -> (Verdict, Option<SimEvent>) {
        if !aim.is_finite() || !within_corridor(layout, aim) {
            return (Verdict::Red, None);
        }
        let from = self.pose.position;
        let to = nearest_walkable_point(layout, aim, self.pose.yaw);
        self.pose.position = to;
        (Verdict::Green, Some(SimEvent::Teleported { from, to, cause: TeleportCause::Controller }))
    }

    pub(crate) fn check_targets(&mut self, layout: &TownLayout, radius: f64, events: &mut Vec<SimEvent>) {
        while !self.done {
            let target = layout.targets[self.next_target_index];
            if self.pose.position.ground_distance(target) >= radius {
                break;
            }
            events.push(SimEvent::TargetReached { index: self.next_target_index, position: target });
            self.next_target_index += 1;
            self.done = self.next_target_index == layout.targets.len();
        }
    }
}
