#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::gaze::{
    detect_blinks, detect_events, parse_gaze_log, recording_features, BlinkConfig, EventDetectionConfig, FeatureConfig,
};
use wayfarer_core::Technique;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(samples) = parse_gaze_log(text) else { return };
    if let Ok(events) = detect_events(&samples, &EventDetectionConfig::default()) {
        assert!(events.windows(2).all(|w| w[0].last < w[1].first));
    }
    let _ = detect_blinks(&samples, &BlinkConfig::default());
    if let Ok(rows) = recording_features(&samples, &FeatureConfig::default(), Technique::LlmDriven) {
        assert!(rows.iter().all(|r| r.values.iter().all(|v| v.is_finite())));
    }
});
