#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::locomotion::{parse_trace_jsonl, write_trace_jsonl};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(trace) = parse_trace_jsonl(text) {
        let mut buf = Vec::new();
        write_trace_jsonl(&trace, &mut buf).unwrap();
        let _ = parse_trace_jsonl(std::str::from_utf8(&buf).unwrap()).expect("written traces parse");
    }
});
