//! Technique state machines, the fixed-step simulation and session traces.

mod agent;
mod session;
mod sim;
mod steering;

pub use agent::{
    agent_script, heading_between, llm_script, plan_route, route_length, steering_script, task_route,
    teleport_script, AgentConfig,
};
pub use session::{
    parse_script, parse_trace_jsonl, run_session, validate_script, write_trace_jsonl, CommandDetail,
    CommandRequest, CommandResponse, Latencies, ScriptEntry, ScriptError, Session, SessionConfig,
    SessionError, SessionReport, TraceBody, TraceEvent,
};
pub use sim::{ScheduledTeleport, SimEvent, SimState, TeleportCause, Verdict, TIME_EPS};
pub use steering::{
    apply_steering_command, recognize_fixed_command, FixedCommand, SteeringConfig, SteeringState,
};
