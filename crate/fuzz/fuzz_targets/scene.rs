#![no_main]

use libfuzzer_sys::fuzz_target;
use wayfarer_core::world::parse_scene;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(layout) = parse_scene(text) {
        layout.validate().expect("parsed scenes are valid");
        let again = parse_scene(&serde_json::to_string(&layout).unwrap()).expect("round trip");
        assert_eq!(again, layout);
    }
});
