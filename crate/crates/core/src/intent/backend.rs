use std::sync::OnceLock;
use std::time::{Duration, Instant};

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use super::parse::scan_numbers;
use super::prompt::{PromptPair, COMMAND_PREFIX, CONTEXT_HEADER, POSE_PREFIX, REFUSAL};
use crate::world::{yaw_direction, Pose, SceneObject, Vec3, NO_VISIBLE_OBJECTS};

/// Environment variable holding the chat-completion endpoint URL.
pub const ENV_LLM_URL: &str = "WAYFARER_LLM_URL";
/// Environment variable holding the bearer key for the endpoint.
pub const ENV_LLM_KEY: &str = "WAYFARER_LLM_KEY";
/// Optional model name sent with each request.
pub const ENV_LLM_MODEL: &str = "WAYFARER_LLM_MODEL";

pub const DEFAULT_BACKEND_TIMEOUT: Duration = Duration::from_secs(10);

/// Raw reply text and how long the backend took.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendResponse {
    pub text: String,
    pub latency_s: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    #[error("backend timed out")]
    Timeout,
    #[error("backend connection failed: {0}")]
    Connection(String),
    #[error("backend returned status {0}")]
    Status(u16),
    #[error("malformed backend reply: {0}")]
    Malformed(String),
    #[error("backend not configured: {0}")]
    Config(String),
}

/// Something that turns a prompt pair into reply text.
pub trait Backend: Send + Sync {
    fn complete(&self, prompts: &PromptPair) -> Result<BackendResponse, BackendError>;
}

/// Sends the prompts to `backend`. Refusals come back as ordinary text; only
/// transport failures are errors.
pub fn query_backend(prompts: &PromptPair, backend: &dyn Backend) -> Result<BackendResponse, BackendError> {
    backend.complete(prompts)
}

/// Deterministic stand-in for a language model.
///
/// It reads the user message back into pose, visible objects and transcript
/// and answers with [`mock_resolve`]. Latency is reported, not slept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MockBackend {
    pub latency_s: f64,
}

impl MockBackend {
    pub fn new(latency_s: f64) -> Self {
        Self { latency_s }
    }
}

impl Default for MockBackend {
    fn default() -> Self {
        Self::new(0.97)
    }
}

impl Backend for MockBackend {
    fn complete(&self, prompts: &PromptPair) -> Result<BackendResponse, BackendError> {
        let text = match parse_user_prompt(&prompts.user) {
            Some(parsed) => {
                let visible: Vec<&SceneObject> = parsed.objects.iter().collect();
                mock_resolve(&parsed.transcript, &parsed.pose, &visible)
            }
            None => REFUSAL.to_string(),
        };
        Ok(BackendResponse {
            text,
            latency_s: self.latency_s,
        })
    }
}

fn move_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"(?i)^\s*move\s+(\d+(?:\.\d+)?)\s*(?:m|meters?|metres?)\s+(forwards?|back(?:wards?)?|left|right)\s*[.!]?\s*$",
        )
        .unwrap()
    })
}

fn goto_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*go\s+to\s+the\s+(.+?)\s*[.!?]?\s*$").unwrap())
}

fn words(s: &str) -> Vec<String> {
    s.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn clean(v: f64) -> f64 {
    if v.abs() < 0.05 {
        0.0
    } else {
        v
    }
}

fn triple(p: Vec3) -> String {
    format!("({:.1}, {:.1}, {:.1})", clean(p.x), clean(p.y), clean(p.z))
}

/// Rule-based reply used by [`MockBackend`]:
///
/// 1. `move N meters forward|back|left|right` relative to the pose yaw;
/// 2. `go to the <words>` naming exactly one visible object by name/color;
/// 3. several matching objects give `Ambiguous target.`;
/// 4. anything else is refused.
pub fn mock_resolve(transcript: &str, pose: &Pose, visible: &[&SceneObject]) -> String {
    if let Some(caps) = move_re().captures(transcript) {
        let meters: f64 = caps[1].parse().unwrap_or(0.0);
        let dir = caps[2].to_lowercase();
        let offset = if dir.starts_with("forward") {
            0.0
        } else if dir.starts_with("back") {
            180.0
        } else if dir == "left" {
            -90.0
        } else {
            90.0
        };
        return triple(pose.position + yaw_direction(pose.yaw + offset) * meters);
    }
    if let Some(caps) = goto_re().captures(transcript) {
        let wanted = words(&caps[1]);
        if !wanted.is_empty() {
            let matches: Vec<&&SceneObject> = visible
                .iter()
                .filter(|o| {
                    let mut have = words(&o.name);
                    have.extend(words(&o.color));
                    wanted.iter().all(|w| have.contains(w))
                })
                .collect();
            match matches.len() {
                1 => return triple(matches[0].position),
                0 => {}
                _ => return "Ambiguous target.".to_string(),
            }
        }
    }
    REFUSAL.to_string()
}

/// The pieces of a user message produced by `build_user_prompt`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedUserPrompt {
    pub objects: Vec<SceneObject>,
    pub pose: Pose,
    pub transcript: String,
}

fn context_line_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^(?P<name>.+) \((?P<color>.+) (?P<tag>\S+)\) at \((?P<x>[^,()]+), (?P<y>[^,()]+), (?P<z>[^,()]+)\)$")
            .unwrap()
    })
}

/// Reads a user message back into its parts. Returns `None` when the text
/// does not follow the template.
pub fn parse_user_prompt(text: &str) -> Option<ParsedUserPrompt> {
    let (head, transcript) = text.split_once(&format!("\n{COMMAND_PREFIX}"))?;
    let body = head.strip_prefix(CONTEXT_HEADER)?.strip_prefix('\n')?;
    let (context, rest) = body.split_once("\n\n")?;

    let pose_line = rest.lines().find_map(|l| l.strip_prefix(POSE_PREFIX))?;
    let nums: Vec<f64> = scan_numbers(pose_line).take(4).collect();
    let [x, y, z, yaw] = nums[..] else {
        return None;
    };
    let pose = Pose::new(Vec3::new(x, y, z), yaw);

    let mut objects = Vec::new();
    for (i, line) in context.lines().enumerate() {
        if line == NO_VISIBLE_OBJECTS || line.starts_with("User at ") {
            continue;
        }
        let caps = context_line_re().captures(line)?;
        let coord = |k: &str| caps[k].trim().parse::<f64>().ok().filter(|v| v.is_finite());
        objects.push(SceneObject {
            id: format!("ctx{i}"),
            name: caps["name"].to_string(),
            color: caps["color"].to_string(),
            tag: caps["tag"].to_string(),
            position: Vec3::new(coord("x")?, coord("y")?, coord("z")?),
            footprint: None,
        });
    }
    Some(ParsedUserPrompt {
        objects,
        pose,
        transcript: transcript.to_string(),
    })
}

/// Chat-completion style HTTP endpoint.
#[derive(Debug, Clone)]
pub struct RemoteBackend {
    pub url: String,
    pub key: Option<String>,
    pub model: String,
    pub timeout: Duration,
}

impl RemoteBackend {
    pub fn new(url: impl Into<String>) -> Self {
        Self {
            url: url.into(),
            key: None,
            model: "gpt-4o".to_string(),
            timeout: DEFAULT_BACKEND_TIMEOUT,
        }
    }

    /// Configures the endpoint from `WAYFARER_LLM_URL` / `WAYFARER_LLM_KEY`.
    pub fn from_env() -> Result<Self, BackendError> {
        let url = std::env::var(ENV_LLM_URL)
            .map_err(|_| BackendError::Config(format!("{ENV_LLM_URL} is not set")))?;
        let mut backend = Self::new(url);
        backend.key = std::env::var(ENV_LLM_KEY).ok().filter(|k| !k.is_empty());
        if let Ok(model) = std::env::var(ENV_LLM_MODEL) {
            backend.model = model;
        }
        Ok(backend)
    }

    /// JSON body carrying the two prompt roles.
    pub fn request_body(&self, prompts: &PromptPair) -> serde_json::Value {
        json!({
            "model": self.model,
            "messages": [
                {"role": "system", "content": prompts.system},
                {"role": "user", "content": prompts.user},
            ],
        })
    }
}

/// Text of the first choice in a chat-completion reply.
pub fn first_choice_text(body: &str) -> Result<String, BackendError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| BackendError::Malformed(e.to_string()))?;
    value
        .pointer("/choices/0/message/content")
        .or_else(|| value.pointer("/choices/0/text"))
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or_else(|| BackendError::Malformed("missing choices[0] text".to_string()))
}

impl Backend for RemoteBackend {
    fn complete(&self, prompts: &PromptPair) -> Result<BackendResponse, BackendError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let started = Instant::now();
        let mut req = agent.post(&self.url).header("Content-Type", "application/json");
        if let Some(key) = &self.key {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req
            .send(self.request_body(prompts).to_string())
            .map_err(map_ureq_error)?;
        let body = resp.body_mut().read_to_string().map_err(map_ureq_error)?;
        let latency_s = started.elapsed().as_secs_f64();
        Ok(BackendResponse {
            text: first_choice_text(&body)?,
            latency_s,
        })
    }
}

fn map_ureq_error(e: ureq::Error) -> BackendError {
    match e {
        ureq::Error::StatusCode(code) => BackendError::Status(code),
        ureq::Error::Timeout(_) => BackendError::Timeout,
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => BackendError::Timeout,
        other => BackendError::Connection(other.to_string()),
    }
}
