use serde::{Deserialize, Serialize};

use crate::world::normalize_yaw;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteeringConfig {
    /// Walking speeds selectable with faster/slower, m/s, strictly increasing.
    pub speed_levels: Vec<f64>,
    /// Heading change per turn command, degrees.
    pub turn_step: f64,
}

impl Default for SteeringConfig {
    fn default() -> Self {
        Self {
            speed_levels: vec![1.4, 2.8, 4.2, 5.6],
            turn_step: 90.0,
        }
    }
}

impl SteeringConfig {
    pub fn is_valid(&self) -> bool {
        !self.speed_levels.is_empty()
            && self.speed_levels[0] > 0.0
            && self.speed_levels.windows(2).all(|w| w[0] < w[1])
            && self.turn_step.is_finite()
    }

    pub fn max_level(&self) -> usize {
        self.speed_levels.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteeringState {
    pub moving: bool,
    pub heading: f64,
    pub level_index: usize,
}

impl SteeringState {
    pub fn new(heading: f64) -> Self {
        Self {
            moving: false,
            heading: normalize_yaw(heading),
            level_index: 0,
        }
    }

    pub fn speed(&self, cfg: &SteeringConfig) -> f64 {
        cfg.speed_levels[self.level_index.min(cfg.max_level())]
    }
}

/// The fixed voice vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedCommand {
    Forward,
    Back,
    TurnLeft,
    TurnRight,
    Stop,
    Faster,
    Slower,
    Unrecognized,
}

/// Exact, case-insensitive match against the seven phrases.
pub fn recognize_fixed_command(transcript: &str) -> FixedCommand {
    match transcript.trim().to_lowercase().as_str() {
        "go forward" => FixedCommand::Forward,
        "go back" => FixedCommand::Back,
        "turn left" => FixedCommand::TurnLeft,
        "turn right" => FixedCommand::TurnRight,
        "stop" => FixedCommand::Stop,
        "faster" => FixedCommand::Faster,
        "slower" => FixedCommand::Slower,
        _ => FixedCommand::Unrecognized,
    }
}

pub fn apply_steering_command(state: SteeringState, cmd: FixedCommand, cfg: &SteeringConfig) -> SteeringState {
    let mut next = state;
    match cmd {
        FixedCommand::Forward => next.moving = true,
        FixedCommand::Back => {
            next.moving = true;
            next.heading = normalize_yaw(state.heading + 180.0);
        }
        FixedCommand::TurnLeft => next.heading = normalize_yaw(state.heading - cfg.turn_step),
        FixedCommand::TurnRight => next.heading = normalize_yaw(state.heading + cfg.turn_step),
        FixedCommand::Stop => next.moving = false,
        FixedCommand::Faster => next.level_index = (state.level_index + 1).min(cfg.max_level()),
        FixedCommand::Slower => next.level_index = state.level_index.saturating_sub(1),
        FixedCommand::Unrecognized => {}
    }
    next
}
