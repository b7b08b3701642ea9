//! Headless engine for language-driven locomotion in a simulated grid town,
//! plus the eye-tracking analysis pipeline used to compare locomotion
//! techniques.
//!
//! * [`world`] - road network, scene objects, visibility, prompt context.
//! * [`intent`] - prompt construction, backends, coordinate extraction and
//!   snapping into a scheduled teleport.
//! * [`locomotion`] - technique state machines, fixed-step simulation and
//!   session traces.
//! * [`gaze`] - I-VT event detection, blinks, pupil preprocessing and
//!   windowed features.
//! * [`analytics`] - k-NN classification, permutation importance, one-way
//!   statistics and questionnaire scoring.

pub mod analytics;
pub mod gaze;
pub mod intent;
pub mod locomotion;
pub mod world;

mod technique;

pub use technique::{ParseTechniqueError, Technique};
