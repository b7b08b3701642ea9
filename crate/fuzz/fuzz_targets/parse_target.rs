#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::intent::parse_target;

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Some(v) = parse_target(&text) {
        assert!(v.is_finite());
    }
});
