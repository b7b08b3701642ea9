#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::analytics::{score_ipq, IpqConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(cfg) = serde_json::from_slice::<IpqConfig>(data) else { return };
    if cfg.validate().is_ok() {
        let scores = score_ipq(&[3.0; 14], &cfg).expect("valid configs score");
        assert!(scores.values().all(|v| (0.0..=6.0).contains(v)));
    }
});
