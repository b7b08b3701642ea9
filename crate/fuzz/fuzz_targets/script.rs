#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::locomotion::{parse_script, validate_script};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(script) = parse_script(text) {
        validate_script(&script).expect("parsed scripts are valid");
    }
});
