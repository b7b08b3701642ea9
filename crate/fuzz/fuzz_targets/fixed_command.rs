#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::locomotion::{apply_steering_command, recognize_fixed_command, SteeringConfig, SteeringState};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    let cfg = SteeringConfig::default();
    let mut state = SteeringState::new(0.0);
    for line in text.lines() {
        state = apply_steering_command(state, recognize_fixed_command(line), &cfg);
        assert!(state.level_index <= cfg.max_level());
        assert!((0.0..360.0).contains(&state.heading));
    }
});
