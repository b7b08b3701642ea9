use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The three locomotion techniques under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    /// Controller point-and-teleport.
    Teleport,
    /// Continuous motion driven by a fixed voice vocabulary.
    Steering,
    /// Free-form commands resolved by a language model, executed as a
    /// delayed teleport.
    #[serde(rename = "llm")]
    LlmDriven,
}

impl Technique {
    pub const ALL: [Technique; 3] = [Technique::Teleport, Technique::Steering, Technique::LlmDriven];

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Teleport => "teleport",
            Technique::Steering => "steering",
            Technique::LlmDriven => "llm",
        }
    }

    /// Whether commands arrive through speech.
    pub fn is_voice(self) -> bool {
        !matches!(self, Technique::Teleport)
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Error)]
#[error("unknown technique `{0}` (expected teleport, steering or llm)")]
pub struct ParseTechniqueError(pub String);

impl FromStr for Technique {
    type Err = ParseTechniqueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "teleport" | "teleportation" => Ok(Technique::Teleport),
            "steering" | "fixed" | "voice" => Ok(Technique::Steering),
            "llm" | "llm_driven" | "llm-driven" => Ok(Technique::LlmDriven),
            _ => Err(ParseTechniqueError(s.to_string())),
        }
    }
}
