#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::intent::{parse_target, parse_user_prompt, Backend, MockBackend, PromptPair};

// The mock backend reads the user prompt back, so any text may reach it.
fuzz_target!(|data: &[u8]| {
    let user = String::from_utf8_lossy(data).into_owned();
    let _ = parse_user_prompt(&user);
    let reply = MockBackend::default().complete(&PromptPair { system: String::new(), user }).unwrap();
    let _ = parse_target(&reply.text);
});
