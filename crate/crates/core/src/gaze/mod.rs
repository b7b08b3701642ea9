//! Eye-tracking signal processing: I-VT event detection with head gating,
//! blink detection, pupil preprocessing and windowed features.

mod blink;
mod events;
mod features;
mod pupil;
mod sample;
pub mod synth;

use thiserror::Error;

pub use blink::{detect_blinks, Blink, BlinkConfig};
pub use events::{
    angular_velocities, detect_events, events_from_velocities, label_sample, EventDetectionConfig, EventKind,
    GazeEvent, Velocity, BAND_SLACK_MS,
};
pub use features::{
    extract_features, recording_features, summarize, window_stream, write_feature_csv, FeatureConfig, FeatureVector,
    Summary, FEATURE_COUNT, FEATURE_NAMES,
};
pub use pupil::{
    baseline_correct, baseline_mean, interpolate_gaps, present_runs, savitzky_golay, savitzky_golay_weights,
    smooth_pupil, PupilConfig,
};
pub use sample::{parse_gaze_log, read_gaze_log, write_gaze_log, GazeSample, GAZE_LOG_HEADER, UNIT_TOLERANCE};

#[derive(Debug, Error)]
pub enum GazeError {
    #[error("malformed gaze log: {0}")]
    Csv(#[from] csv::Error),
    #[error("gaze log lacks column `{0}`")]
    MissingColumn(&'static str),
    #[error("row {row}: invalid {column} value `{value}`")]
    InvalidValue { row: usize, column: &'static str, value: String },
    #[error("row {row}: timestamps must be strictly increasing")]
    NonIncreasingTime { row: usize },
    #[error("row {row}: {column} direction has norm {norm}, expected unit length")]
    NotUnit { row: usize, column: &'static str, norm: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate baseline: {0}")]
    DegenerateBaseline(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
