//! Command-line front end and HTTP session service for the wayfarer engine.

pub mod cli;
pub mod service;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use wayfarer_core::intent::{Backend, BackendError, MockBackend, RemoteBackend};

/// Which intent backend a command or session uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Mock,
    Remote,
}

impl BackendKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::Mock => "mock",
            BackendKind::Remote => "remote",
        }
    }

    /// Builds the backend; the remote one reads its endpoint from the
    /// environment.
    pub fn build(self) -> Result<Arc<dyn Backend>, BackendError> {
        Ok(match self {
            BackendKind::Mock => Arc::new(MockBackend::default()),
            BackendKind::Remote => Arc::new(RemoteBackend::from_env()?),
        })
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mock" => Ok(BackendKind::Mock),
            "remote" => Ok(BackendKind::Remote),
            other => Err(format!("unknown backend `{other}` (expected mock or remote)")),
        }
    }
}
