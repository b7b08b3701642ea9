use serde::{Deserialize, Serialize};

use super::IntentError;
use crate::world::Pose;

/// System and user messages sent to the backend for one command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPair {
    pub system: String,
    pub user: String,
}

pub(crate) const CONTEXT_HEADER: &str = "Scene context:";
pub(crate) const POSE_PREFIX: &str = "User pose: position ";
pub(crate) const TRAVEL_PREFIX: &str = "Maximum travel distance: ";
pub(crate) const COMMAND_PREFIX: &str = "Command: ";

/// Reply the assistant is told to give when it cannot resolve a command.
pub const REFUSAL: &str = "I cannot determine a target.";

const SYSTEM_PROMPT: &str = "\
You are a navigation assistant in a virtual town. You convert the user's spoken movement command into a single destination coordinate.

Coordinate frame: x points east, y points up and z points north, all in meters. Yaw is measured in degrees clockwise from north (+z), so yaw 90 faces east.

Each user message has this structure:
Scene context: one line per visible object written as <name> (<color> <tag>) at (<x>, <y>, <z>), followed by a line with the user's position and yaw.
User pose: the user's exact position and yaw.
Maximum travel distance: the farthest the user may move with one command.
Command: the transcribed speech of the user.

Rules:
1. Output only the destination as a coordinate triple in the format (x, y, z) with no other text.
2. Forward means along the yaw direction, back means opposite to it, and left and right are 90 degrees counter-clockwise and clockwise from it.
3. Only use objects that appear in the scene context; never invent positions.
4. If the command is ambiguous, mentions an object that is not in the scene context, or is not a movement request, reply exactly: I cannot determine a target.

Example 1:
Scene context:
Car (red vehicle) at (2.0, 0.0, 60.0)
User at (0.0, 0.0, 20.0) facing yaw 0.0 degrees
Command: move 30 meters forward
Answer: (0.0, 0.0, 50.0)

Example 2:
Scene context:
House (red building) at (30.0, 0.0, 120.0)
House (blue building) at (70.0, 0.0, 180.0)
User at (0.0, 0.0, 100.0) facing yaw 0.0 degrees
Command: go to the red house
Answer: (30.0, 0.0, 120.0)

Example 3:
Scene context:
House (red building) at (30.0, 0.0, 120.0)
House (blue building) at (70.0, 0.0, 180.0)
User at (0.0, 0.0, 100.0) facing yaw 0.0 degrees
Command: go to the house
Answer: I cannot determine a target.
";

/// The fixed system prompt: role, message structure, output rule and three
/// worked examples.
pub fn build_system_prompt() -> String {
    SYSTEM_PROMPT.to_string()
}

/// Fills the user-message template for one command.
pub fn build_user_prompt(
    transcript: &str,
    context: &str,
    pose: &Pose,
    max_travel: f64,
) -> Result<String, IntentError> {
    if transcript.trim().is_empty() {
        return Err(IntentError::EmptyTranscript);
    }
    let p = pose.position;
    Ok(format!(
        "{CONTEXT_HEADER}\n{context}\n\n\
         {POSE_PREFIX}({:.3}, {:.3}, {:.3}), yaw {:.3} degrees\n\
         {TRAVEL_PREFIX}{max_travel:.1} meters\n\
         {COMMAND_PREFIX}{transcript}",
        p.x, p.y, p.z, pose.yaw
    ))
}
