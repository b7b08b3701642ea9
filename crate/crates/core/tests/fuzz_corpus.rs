//! Replays the checked-in fuzz seeds through the same checks the fuzz
//! targets make, so regressions show up without a nightly toolchain.

use std::fs;
use std::path::PathBuf;

use wayfarer_core::analytics::{parse_responses, score, score_ipq, stats_report, Dataset, IpqConfig, Questionnaire};
use wayfarer_core::gaze::{
    detect_blinks, detect_events, parse_gaze_log, recording_features, BlinkConfig, EventDetectionConfig, FeatureConfig,
};
use wayfarer_core::intent::{first_choice_text, parse_target, parse_user_prompt, Backend, MockBackend, PromptPair};
use wayfarer_core::locomotion::{
    apply_steering_command, parse_script, parse_trace_jsonl, recognize_fixed_command, validate_script,
    write_trace_jsonl, SteeringConfig, SteeringState,
};
use wayfarer_core::world::parse_scene;
use wayfarer_core::Technique;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn text(data: &[u8]) -> Option<&str> {
    std::str::from_utf8(data).ok()
}

#[test]
fn scene_seeds() {
    let mut parsed = 0;
    for (name, data) in seeds("scene") {
        let Some(t) = text(&data) else { continue };
        if let Ok(layout) = parse_scene(t) {
            layout.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(parse_scene(&serde_json::to_string(&layout).unwrap()).unwrap(), layout, "{name}");
            parsed += 1;
        }
    }
    assert!(parsed >= 1);
}

#[test]
fn script_seeds() {
    for (name, data) in seeds("script") {
        if let Some(Ok(script)) = text(&data).map(parse_script) {
            validate_script(&script).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}

#[test]
fn trace_seeds() {
    for (name, data) in seeds("trace_jsonl") {
        let trace = parse_trace_jsonl(text(&data).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
        let mut buf = Vec::new();
        write_trace_jsonl(&trace, &mut buf).unwrap();
        assert_eq!(parse_trace_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap(), trace, "{name}");
    }
}

#[test]
fn gaze_log_seeds() {
    for (name, data) in seeds("gaze_log") {
        let Some(Ok(samples)) = text(&data).map(parse_gaze_log) else { continue };
        if let Ok(events) = detect_events(&samples, &EventDetectionConfig::default()) {
            assert!(events.windows(2).all(|w| w[0].last < w[1].first), "{name}");
        }
        detect_blinks(&samples, &BlinkConfig::default());
        if let Ok(rows) = recording_features(&samples, &FeatureConfig::default(), Technique::LlmDriven) {
            assert!(rows.iter().all(|r| r.values.iter().all(|v| v.is_finite())), "{name}");
        }
    }
}

#[test]
fn feature_csv_seeds() {
    for (name, data) in seeds("feature_csv") {
        if let Some(Ok(ds)) = text(&data).map(Dataset::parse_csv) {
            ds.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            let _ = stats_report(&ds, "label");
        }
    }
}

#[test]
fn questionnaire_seeds() {
    for (_, data) in seeds("questionnaire") {
        let Some(Ok(responses)) = text(&data).map(parse_responses) else { continue };
        for r in &responses {
            for q in [Questionnaire::Sus, Questionnaire::Tlx, Questionnaire::CsqVr, Questionnaire::Ipq] {
                let _ = score(q, r.items(), None);
            }
        }
    }
}

#[test]
fn ipq_config_seeds() {
    for (name, data) in seeds("ipq_config") {
        let Ok(cfg) = serde_json::from_slice::<IpqConfig>(&data) else { continue };
        if cfg.validate().is_ok() {
            let scores = score_ipq(&[3.0; 14], &cfg).unwrap();
            assert!(scores.values().all(|v| (0.0..=6.0).contains(v)), "{name}");
        }
    }
}

#[test]
fn parse_target_seeds() {
    for (name, data) in seeds("parse_target") {
        if let Some(v) = parse_target(&String::from_utf8_lossy(&data)) {
            assert!(v.is_finite(), "{name}");
        }
    }
}

#[test]
fn user_prompt_seeds() {
    for (name, data) in seeds("user_prompt") {
        let user = String::from_utf8_lossy(&data).into_owned();
        assert!(parse_user_prompt(&user).is_some(), "{name} is a well-formed prompt");
        let reply = MockBackend::default().complete(&PromptPair { system: String::new(), user }).unwrap();
        let _ = parse_target(&reply.text);
    }
}

#[test]
fn fixed_command_seeds() {
    let cfg = SteeringConfig::default();
    for (_, data) in seeds("fixed_command") {
        let mut state = SteeringState::new(0.0);
        for line in String::from_utf8_lossy(&data).lines() {
            state = apply_steering_command(state, recognize_fixed_command(line), &cfg);
            assert!(state.level_index <= cfg.max_level());
            assert!((0.0..360.0).contains(&state.heading));
        }
    }
}

#[test]
fn backend_reply_seeds() {
    let mut extracted = 0;
    for (_, data) in seeds("backend_reply") {
        if let Ok(t) = first_choice_text(text(&data).unwrap()) {
            let _ = parse_target(&t);
            extracted += 1;
        }
    }
    assert!(extracted >= 12);
}
