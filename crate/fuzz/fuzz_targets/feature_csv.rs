#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::analytics::{stats_report, Dataset};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(ds) = Dataset::parse_csv(text) {
        ds.validate().expect("parsed datasets are valid");
        let _ = stats_report(&ds, "label");
    }
});
