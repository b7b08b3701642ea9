#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer::cli::parse_pose;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(pose) = parse_pose(&text) {
        assert!(pose.is_valid());
    }
});
