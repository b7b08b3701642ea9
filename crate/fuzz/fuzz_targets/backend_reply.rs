#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::intent::{first_choice_text, parse_target};

fuzz_target!(|data: &[u8]| {
    let Ok(body) = std::str::from_utf8(data) else { return };
    if let Ok(text) = first_choice_text(body) {
        let _ = parse_target(&text);
    }
});
