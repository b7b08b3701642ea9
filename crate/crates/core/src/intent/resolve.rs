use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::backend::{query_backend, Backend};
use super::parse::parse_target;
use super::prompt::{build_system_prompt, build_user_prompt, PromptPair};
use super::IntentError;
use crate::world::{nearest_walkable_point, serialize_context, visible_objects, Pose, TownLayout, Vec3, VisibilityConfig};

/// Slack allowed when comparing a hop length against `max_travel`.
const RANGE_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResolverConfig {
    /// Longest hop a single command may produce, meters.
    pub max_travel: f64,
    /// Delay between a resolved command and the teleport, seconds.
    pub teleport_delay: f64,
    /// Simulated speech-to-text time charged to voice commands, seconds.
    pub stt_latency_s: f64,
    /// Frustum used to build the prompt context.
    pub visibility: VisibilityConfig,
}

impl Default for ResolverConfig {
    fn default() -> Self {
        Self {
            max_travel: 50.0,
            teleport_delay: 2.0,
            stt_latency_s: 0.48,
            visibility: VisibilityConfig::default(),
        }
    }
}

/// What happened to one free-form command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Scheduled { target: Vec3, execute_at: f64 },
    NoTarget,
    OutOfRange { distance: f64 },
    BackendError { message: String },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Scheduled { .. } => "scheduled",
            Outcome::NoTarget => "no_target",
            Outcome::OutOfRange { .. } => "out_of_range",
            Outcome::BackendError { .. } => "backend_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub outcome: Outcome,
    /// Coordinate as extracted from the reply, before snapping.
    pub raw_target: Option<Vec3>,
    pub stt_latency_s: f64,
    pub llm_latency_s: f64,
}

/// Runs the whole free-form pipeline for one transcript: visible context,
/// prompts, backend, extraction, snapping, range check and scheduling.
///
/// Failures of the backend become [`Outcome::BackendError`]; only an empty
/// transcript is an error.
pub fn resolve_command(
    transcript: &str,
    pose: &Pose,
    layout: &TownLayout,
    cfg: &ResolverConfig,
    backend: &dyn Backend,
    now: f64,
) -> Result<Resolution, IntentError> {
    let visible = visible_objects(layout, pose, &cfg.visibility);
    let context = serialize_context(&visible, pose);
    let prompts = PromptPair {
        system: build_system_prompt(),
        user: build_user_prompt(transcript, &context, pose, cfg.max_travel)?,
    };

    let started = Instant::now();
    let reply = query_backend(&prompts, backend);
    let mut resolution = Resolution {
        outcome: Outcome::NoTarget,
        raw_target: None,
        stt_latency_s: cfg.stt_latency_s,
        llm_latency_s: 0.0,
    };
    let reply = match reply {
        Ok(r) => r,
        Err(e) => {
            resolution.llm_latency_s = started.elapsed().as_secs_f64();
            resolution.outcome = Outcome::BackendError { message: e.to_string() };
            return Ok(resolution);
        }
    };
    resolution.llm_latency_s = reply.latency_s;

    let Some(raw) = parse_target(&reply.text) else {
        return Ok(resolution);
    };
    resolution.raw_target = Some(raw);
    let target = nearest_walkable_point(layout, raw.on_ground(), pose.yaw);
    let distance = pose.position.ground_distance(target);
    resolution.outcome = if distance > cfg.max_travel + RANGE_SLACK {
        Outcome::OutOfRange { distance }
    } else {
        Outcome::Scheduled {
            target,
            execute_at: now + cfg.teleport_delay,
        }
    };
    Ok(resolution)
}
