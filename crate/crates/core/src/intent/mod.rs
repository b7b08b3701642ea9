//! Free-form command pipeline: visible context and prompts go to a backend,
//! the first coordinate triple in the reply is snapped onto the road network
//! and, when close enough, scheduled as a delayed teleport.

mod backend;
mod parse;
mod prompt;
mod resolve;

use thiserror::Error;

pub use backend::{
    first_choice_text, mock_resolve, parse_user_prompt, query_backend, Backend, BackendError,
    BackendResponse, MockBackend, ParsedUserPrompt, RemoteBackend, DEFAULT_BACKEND_TIMEOUT,
    ENV_LLM_KEY, ENV_LLM_MODEL, ENV_LLM_URL,
};
pub use parse::{parse_target, scan_numbers};
pub use prompt::{build_system_prompt, build_user_prompt, PromptPair, REFUSAL};
pub use resolve::{resolve_command, Outcome, Resolution, ResolverConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntentError {
    #[error("transcript is empty")]
    EmptyTranscript,
}
