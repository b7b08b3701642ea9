//! Sessions: command routing per technique, fixed-tick clock, trace
//! recording and deterministic script replay.

use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::sim::{ScheduledTeleport, SimEvent, SimState, TeleportCause, Verdict, TIME_EPS};
use super::steering::{apply_steering_command, recognize_fixed_command, FixedCommand, SteeringConfig, SteeringState};
use crate::intent::{resolve_command, Backend, IntentError, Outcome, Resolution, ResolverConfig};
use crate::world::{normalize_yaw, Pose, TownLayout, Vec3};
use crate::Technique;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    /// Fixed simulation tick, seconds.
    pub dt: f64,
    /// Replay stops at this simulated time.
    pub time_cap: f64,
    /// Distance at which a target counts as reached, meters.
    pub target_radius: f64,
    /// Period of trajectory samples in the trace; `None` disables them.
    pub trajectory_interval: Option<f64>,
    pub steering: SteeringConfig,
    pub resolver: ResolverConfig,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            dt: 0.01,
            time_cap: 600.0,
            target_radius: 2.0,
            trajectory_interval: Some(1.0),
            steering: SteeringConfig::default(),
            resolver: ResolverConfig::default(),
        }
    }
}

/// One user input: a transcript for voice techniques, an aim point for the
/// controller, and optionally a new head yaw applied first.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CommandRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aim: Option<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yaw: Option<f64>,
}

impl CommandRequest {
    pub fn say(transcript: impl Into<String>) -> Self {
        Self { transcript: Some(transcript.into()), ..Self::default() }
    }

    pub fn aim(point: Vec3) -> Self {
        Self { aim: Some(point), ..Self::default() }
    }

    pub fn look(yaw: f64) -> Self {
        Self { yaw: Some(yaw), ..Self::default() }
    }

    pub fn with_yaw(mut self, yaw: f64) -> Self {
        self.yaw = Some(yaw);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Latencies {
    pub stt_s: f64,
    pub llm_s: f64,
    pub total_s: f64,
}

impl Latencies {
    pub const ZERO: Latencies = Latencies { stt_s: 0.0, llm_s: 0.0, total_s: 0.0 };

    pub fn new(stt_s: f64, llm_s: f64) -> Self {
        Self { stt_s, llm_s, total_s: stt_s + llm_s }
    }
}

/// Technique-specific part of a command response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CommandDetail {
    Llm { resolution: Resolution },
    Steering { command: FixedCommand, state: SteeringState },
    Teleport { verdict: Verdict, aim: Vec3 },
    Look,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandResponse {
    pub t: f64,
    pub technique: Technique,
    /// Short outcome name, e.g. `scheduled`, `out_of_range`, `teleported`.
    pub outcome: String,
    pub target: Option<Vec3>,
    pub execute_at: Option<f64>,
    pub latencies: Latencies,
    pub pose: Pose,
    pub pending: Option<ScheduledTeleport>,
    /// A previously scheduled teleport was dropped by this command.
    pub cancelled_pending: bool,
    pub detail: CommandDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum TraceBody {
    Command(CommandRequest),
    Resolution(CommandResponse),
    Teleport { from: Vec3, to: Vec3, cause: TeleportCause },
    Tick { pose: Pose, moving: bool },
    TargetReached { index: usize, position: Vec3 },
}

/// One line of a session trace: `{t, kind, payload}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub t: f64,
    #[serde(flatten)]
    pub body: TraceBody,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Intent(#[from] IntentError),
    #[error("request carries neither transcript, aim nor yaw")]
    EmptyRequest,
    #[error("{0}")]
    InvalidRequest(String),
}

pub struct Session {
    layout: Arc<TownLayout>,
    cfg: SessionConfig,
    state: SimState,
    trace: Vec<TraceEvent>,
    ticks: u64,
}

impl Session {
    pub fn new(layout: Arc<TownLayout>, technique: Technique, cfg: SessionConfig) -> Self {
        let state = SimState::new(&layout, technique);
        Self { layout, cfg, state, trace: Vec::new(), ticks: 0 }
    }

    pub fn layout(&self) -> &Arc<TownLayout> {
        &self.layout
    }

    pub fn config(&self) -> &SessionConfig {
        &self.cfg
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn t(&self) -> f64 {
        self.state.t
    }

    /// Back to the start pose with an empty trace.
    pub fn reset(&mut self) {
        self.state = SimState::new(&self.layout, self.state.technique);
        self.trace.clear();
        self.ticks = 0;
    }

    fn push(&mut self, body: TraceBody) {
        self.trace.push(TraceEvent { t: self.state.t, body });
    }

    fn record(&mut self, events: Vec<SimEvent>) {
        for e in events {
            match e {
                SimEvent::Teleported { from, to, cause } => self.push(TraceBody::Teleport { from, to, cause }),
                SimEvent::TargetReached { index, position } => self.push(TraceBody::TargetReached { index, position }),
            }
        }
    }

    /// One fixed tick.
    pub fn tick(&mut self) {
        let events = self.state.step(&self.layout, &self.cfg.steering, self.cfg.target_radius, self.cfg.dt);
        self.ticks += 1;
        // keep the clock an exact multiple of the tick
        self.state.t = self.ticks as f64 * self.cfg.dt;
        self.record(events);
        if let Some(every) = self.cfg.trajectory_interval {
            let n = ((every / self.cfg.dt).round() as u64).max(1);
            if self.ticks.is_multiple_of(n) {
                let body = TraceBody::Tick { pose: self.state.pose, moving: self.state.steering.moving };
                self.push(body);
            }
        }
    }

    /// Ticks until the clock reaches `t` (or the task is done).
    pub fn advance_to(&mut self, t: f64) {
        while !self.state.done && self.state.t + self.cfg.dt <= t + TIME_EPS {
            self.tick();
        }
    }

    /// Applies one input at the current simulated time.
    pub fn command(&mut self, req: &CommandRequest, backend: &dyn Backend) -> Result<CommandResponse, SessionError> {
        if req.transcript.is_none() && req.aim.is_none() && req.yaw.is_none() {
            return Err(SessionError::EmptyRequest);
        }
        if req.yaw.is_some_and(|y| !y.is_finite()) {
            return Err(SessionError::InvalidRequest("yaw must be finite".into()));
        }
        let technique = self.state.technique;
        match technique {
            Technique::Teleport if req.transcript.is_some() => {
                return Err(SessionError::InvalidRequest("the teleport technique takes an aim point, not a transcript".into()))
            }
            Technique::Steering | Technique::LlmDriven if req.aim.is_some() => {
                return Err(SessionError::InvalidRequest("aim points are only used by the teleport technique".into()))
            }
            _ => {}
        }
        if req.transcript.as_deref().is_some_and(|s| s.trim().is_empty()) {
            return Err(IntentError::EmptyTranscript.into());
        }

        self.push(TraceBody::Command(req.clone()));
        if let Some(yaw) = req.yaw {
            self.state.pose.yaw = normalize_yaw(yaw);
            self.state.steering.heading = self.state.pose.yaw;
        }

        let mut events = Vec::new();
        let mut cancelled_pending = false;
        let (outcome, target, execute_at, latencies, detail) = match (technique, &req.transcript, req.aim) {
            (Technique::Teleport, _, Some(aim)) => {
                let (verdict, ev) = self.state.controller_teleport(&self.layout, aim);
                events.extend(ev);
                let name = if verdict == Verdict::Green { "teleported" } else { "rejected" };
                let target = (verdict == Verdict::Green).then_some(self.state.pose.position);
                (name, target, None, Latencies::ZERO, CommandDetail::Teleport { verdict, aim })
            }
            (Technique::Steering, Some(text), _) => {
                let command = recognize_fixed_command(text);
                let state = apply_steering_command(self.state.steering, command, &self.cfg.steering);
                self.state.steering = state;
                self.state.pose.yaw = state.heading;
                let name = if command == FixedCommand::Unrecognized { "unrecognized" } else { "accepted" };
                let lat = Latencies::new(self.cfg.resolver.stt_latency_s, 0.0);
                (name, None, None, lat, CommandDetail::Steering { command, state })
            }
            (Technique::LlmDriven, Some(text), _) => {
                cancelled_pending = self.state.pending.take().is_some();
                let resolution = resolve_command(text, &self.state.pose, &self.layout, &self.cfg.resolver, backend, self.state.t)?;
                let (target, execute_at) = match resolution.outcome {
                    Outcome::Scheduled { target, execute_at } => {
                        self.state.pending = Some(ScheduledTeleport { target, execute_at });
                        (Some(target), Some(execute_at))
                    }
                    _ => (None, None),
                };
                let lat = Latencies::new(resolution.stt_latency_s, resolution.llm_latency_s);
                (resolution.outcome.name(), target, execute_at, lat, CommandDetail::Llm { resolution })
            }
            _ => ("look", None, None, Latencies::ZERO, CommandDetail::Look),
        };

        let response = CommandResponse {
            t: self.state.t,
            technique,
            outcome: outcome.to_string(),
            target,
            execute_at,
            latencies,
            pose: self.state.pose,
            pending: self.state.pending,
            cancelled_pending,
            detail,
        };
        self.push(TraceBody::Resolution(response.clone()));
        self.state.check_targets(&self.layout, self.cfg.target_radius, &mut events);
        self.record(events);
        Ok(response)
    }
}

/// A timed input in a command script.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub t: f64,
    #[serde(flatten)]
    pub request: CommandRequest,
}

impl ScriptEntry {
    pub fn new(t: f64, request: CommandRequest) -> Self {
        Self { t, request }
    }
}

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("malformed script: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("script entry {index}: time {t} is not finite and non-negative")]
    InvalidTime { index: usize, t: f64 },
    #[error("script entry {index}: time {t} is earlier than the previous entry")]
    DecreasingTime { index: usize, t: f64 },
    #[error("script entry {index}: {source}")]
    Entry { index: usize, source: SessionError },
}

/// Parses a command script (a JSON list of `{t, transcript | aim, yaw?}`).
pub fn parse_script(text: &str) -> Result<Vec<ScriptEntry>, ScriptError> {
    let script: Vec<ScriptEntry> = serde_json::from_str(text)?;
    validate_script(&script)?;
    Ok(script)
}

pub fn validate_script(script: &[ScriptEntry]) -> Result<(), ScriptError> {
    let mut last = 0.0_f64;
    for (index, e) in script.iter().enumerate() {
        if !e.t.is_finite() || e.t < 0.0 {
            return Err(ScriptError::InvalidTime { index, t: e.t });
        }
        if e.t < last {
            return Err(ScriptError::DecreasingTime { index, t: e.t });
        }
        last = e.t;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionReport {
    pub trace: Vec<TraceEvent>,
    pub done: bool,
    /// Simulated time at which the last target was reached.
    pub completion_time: Option<f64>,
    pub final_state: SimState,
}

/// Deterministic replay of a script against a fresh session.
pub fn run_session(
    layout: &TownLayout,
    technique: Technique,
    script: &[ScriptEntry],
    backend: &dyn Backend,
    cfg: &SessionConfig,
) -> Result<SessionReport, ScriptError> {
    validate_script(script)?;
    let mut session = Session::new(Arc::new(layout.clone()), technique, cfg.clone());
    let mut next = 0;
    loop {
        while !session.state.done && next < script.len() && script[next].t <= session.t() + TIME_EPS {
            session
                .command(&script[next].request, backend)
                .map_err(|source| ScriptError::Entry { index: next, source })?;
            next += 1;
        }
        if session.state.done || session.t() >= cfg.time_cap - TIME_EPS {
            break;
        }
        session.tick();
    }
    let done = session.state.done;
    Ok(SessionReport {
        completion_time: done.then_some(session.t()),
        done,
        final_state: session.state.clone(),
        trace: session.trace,
    })
}

/// Writes one JSON object per line.
pub fn write_trace_jsonl<W: Write>(trace: &[TraceEvent], mut out: W) -> io::Result<()> {
    for e in trace {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a JSON-lines trace, skipping blank lines.
pub fn parse_trace_jsonl(text: &str) -> Result<Vec<TraceEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
