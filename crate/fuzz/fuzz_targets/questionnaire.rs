#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::analytics::{parse_responses, score, Questionnaire};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(responses) = parse_responses(text) else { return };
    for r in &responses {
        for q in [Questionnaire::Sus, Questionnaire::Tlx, Questionnaire::CsqVr, Questionnaire::Ipq] {
            let _ = score(q, r.items(), None);
        }
    }
});
