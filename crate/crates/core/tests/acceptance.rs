//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the report reads as a single table.
//! A criterion listed in `EXPECTED_FAILURES` is still evaluated and printed;
//! it only stops failing the process while it stays red. If it ever turns
//! green the run fails so the list gets pruned.

mod common;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wayfarer_core::analytics::{
    anova_oneway, classify_report, gaussian_clusters, kruskal_wallis, label_code, majority_baseline, score_csq_vr,
    score_sus, stratified_split, ClassifyOptions, Dataset, SplitSpec,
};
use wayfarer_core::gaze::synth::synthetic_recording;
use wayfarer_core::gaze::{
    baseline_correct, baseline_mean, detect_events, recording_features, savitzky_golay, EventDetectionConfig,
    EventKind, FeatureConfig, FEATURE_COUNT, FEATURE_NAMES,
};
use wayfarer_core::intent::{Backend, BackendError, BackendResponse, MockBackend, PromptPair};
use wayfarer_core::locomotion::{agent_script, run_session, AgentConfig, CommandRequest, Session, SessionConfig};
use wayfarer_core::world::{nearest_walkable_point, Pose, TownLayout, Vec3, TIE_EPSILON};
use wayfarer_core::Technique;

/// Rank sums 3, 7 and 11 over {1,2},{3,4},{5,6} give H = 32/7 = 4.5714,
/// while criterion 10 asks for 3.5714. The check keeps 3.5714 and stays red.
const EXPECTED_FAILURES: &[u32] = &[10];

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn majority_baseline_arithmetic() -> Outcome {
    let start = Instant::now();
    let ds = Dataset::read_csv(fs::File::open(fixture("features_55_56_19.csv")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let split = stratified_split(&ds, &SplitSpec::default()).map_err(|e| e.to_string())?;
    let (train, test) = (ds.subset(&split.train), ds.subset(&split.test));
    let counts: Vec<usize> = test.class_counts().values().copied().collect();
    let got = majority_baseline(&train.labels, &test.labels).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    check(
        counts == [55, 56, 19] && (got - 0.4308).abs() <= 5e-5 && secs < 1.0,
        format!("test counts {counts:?}, baseline {got:.6}, {secs:.3} s"),
    )
}

fn ivt_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = EventDetectionConfig::default();
    let (mut mismatched, mut out_of_band, mut events) = (0, 0, 0);
    for seed in 0..1000 {
        let trace = common::ivt_trace(seed, 1500);
        let got = detect_events(&trace.samples, &cfg).map_err(|e| e.to_string())?;
        let pairs: Vec<_> = got.iter().map(|e| (e.kind, e.first, e.last)).collect();
        if pairs != common::ivt_oracle(&trace) {
            mismatched += 1;
        }
        for e in &got {
            let ok = match e.kind {
                EventKind::Fixation => e.duration_ms > 80.0 && e.duration_ms < 500.0,
                EventKind::Saccade => e.duration_ms > 20.0 && e.duration_ms < 70.0,
            };
            out_of_band += usize::from(!ok);
        }
        events += got.len();
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        mismatched == 0 && out_of_band == 0 && secs < 30.0,
        format!("1000 traces, {events} events, {mismatched} mismatched, {out_of_band} out of band, {secs:.1} s"),
    )
}

fn geometry_oracle() -> Outcome {
    let start = Instant::now();
    let layout = TownLayout::default_scene();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let crossings: Vec<Vec3> = layout
        .segments
        .iter()
        .flat_map(|s| [s.a, s.b])
        .chain((0..4).flat_map(|i| (0..4).map(move |j| Vec3::new(100.0 * i as f64, 0.0, 100.0 * j as f64))))
        .collect();
    let (mut checked, mut ties, mut worst) = (0, 0, 0.0f64);
    while checked < 500 {
        let near_crossing = checked % 4 == 0;
        let (p, yaw) = if near_crossing {
            // Offsets inside the tie band, head turned along the farther road.
            let c = crossings[rng.random_range(0..crossings.len())];
            let (dx, dz) = (rng.random_range(-60..=60i32), rng.random_range(-60..=60i32));
            let yaw = if dx.abs() < dz.abs() { 90.0 } else { 0.0 } + rng.random_range(-20.0..20.0);
            (Vec3::new(c.x + f64::from(dx) / 100.0, 0.0, c.z + f64::from(dz) / 100.0), yaw)
        } else {
            let (x, z) = (rng.random_range(-1000..=31000i32), rng.random_range(-1000..=31000i32));
            (Vec3::new(f64::from(x) / 100.0, 0.0, f64::from(z) / 100.0), rng.random_range(0.0..360.0))
        };
        let per = common::grid_nearest_per_segment(&layout, p);
        let m = per.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        if per.iter().any(|s| (s.1 - m - TIE_EPSILON).abs() <= 1e-6) {
            continue;
        }
        let (expected, tie) = common::grid_snap(&layout, p, yaw, TIE_EPSILON);
        worst = worst.max(nearest_walkable_point(&layout, p, yaw).ground_distance(expected));
        ties += usize::from(tie);
        checked += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-6 && ties >= 50 && secs < 30.0,
        format!("500 points, {ties} tie-breaks, max deviation {worst:.2e} m, {secs:.1} s"),
    )
}

fn steering_kinematics() -> Outcome {
    let layout = Arc::new(TownLayout::default_scene());
    let mock = MockBackend::default();
    let mut got = Vec::new();
    for level in 0..4 {
        let mut s = Session::new(layout.clone(), Technique::Steering, SessionConfig::default());
        for _ in 0..level {
            s.command(&CommandRequest::say("faster"), &mock).map_err(|e| e.to_string())?;
        }
        s.command(&CommandRequest::say("go forward"), &mock).map_err(|e| e.to_string())?;
        let from = s.state().pose.position;
        s.advance_to(10.0);
        got.push(from.ground_distance(s.state().pose.position));
    }
    let ok = got.iter().zip([14.0, 28.0, 42.0, 56.0]).all(|(g, e)| (g - e).abs() <= 1e-6);
    check(ok, format!("10 s displacements {got:.6?} m"))
}

fn scheduled_teleport_timing() -> Outcome {
    let layout = Arc::new(TownLayout::default_scene());
    let mock = MockBackend::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut schedules, mut worst_late, mut early) = (0, 0.0f64, 0);
    let mut s = Session::new(layout.clone(), Technique::LlmDriven, SessionConfig::default());
    let dt = s.config().dt;
    while schedules < 100 {
        if s.t() > 400.0 {
            s = Session::new(layout.clone(), Technique::LlmDriven, SessionConfig::default());
        }
        s.advance_to(s.t() + rng.random_range(0.0..3.0));
        let phrase = ["forward", "to the left", "to the right", "back"][rng.random_range(0..4)];
        let req = CommandRequest::say(format!("move {} meters {phrase}", rng.random_range(5..45)))
            .with_yaw(rng.random_range(0.0..360.0));
        let r = s.command(&req, &mock).map_err(|e| e.to_string())?;
        let (Some(at), Some(target)) = (r.execute_at, r.target) else { continue };
        let before = s.state().pose.position;
        if before.ground_distance(target) < 1e-6 {
            continue;
        }
        let landed = loop {
            s.tick();
            if s.state().pose.position != before {
                break s.t();
            }
            if s.t() > at + 1.0 {
                return Err(format!("teleport scheduled for {at} never landed"));
            }
        };
        early += usize::from(landed < at - 1e-9);
        worst_late = worst_late.max(landed - at);
        schedules += 1;
    }
    check(
        early == 0 && worst_late <= dt + 1e-9,
        format!("100 schedules, {early} early, latest landing {worst_late:.4} s after execute_at"),
    )
}

struct Canned(String);

impl Backend for Canned {
    fn complete(&self, _: &PromptPair) -> Result<BackendResponse, BackendError> {
        Ok(BackendResponse { text: self.0.clone(), latency_s: 0.3 })
    }
}

fn pose_bits(p: &Pose) -> [u64; 4] {
    [p.position.x.to_bits(), p.position.y.to_bits(), p.position.z.to_bits(), p.yaw.to_bits()]
}

fn pipeline_fallbacks() -> Outcome {
    let layout = Arc::new(TownLayout::default_scene());
    let text = fs::read_to_string(fixture("adversarial_replies.json")).map_err(|e| e.to_string())?;
    let replies: Vec<String> = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let starts = [layout.start_pose, Pose::new(Vec3::new(100.0, 0.0, 150.0), 90.0)];
    let layouts: Vec<Arc<TownLayout>> =
        starts.iter().map(|&p| Arc::new(TownLayout { start_pose: p, ..(*layout).clone() })).collect();
    let (mut scheduled, mut held, mut bad) = (0, 0, Vec::new());
    for (i, reply) in replies.iter().enumerate() {
        for (start, from) in starts.iter().zip(&layouts) {
            let mut s = Session::new(from.clone(), Technique::LlmDriven, SessionConfig::default());
            let r = s.command(&CommandRequest::say("take me there"), &Canned(reply.clone())).map_err(|e| e.to_string())?;
            let before = pose_bits(start);
            match (r.outcome.as_str(), r.target) {
                ("scheduled", Some(t)) => {
                    let on_road = layout.segments.iter().any(|seg| seg.distance(t) < 1e-9);
                    if !(t.is_finite() && t.y == 0.0 && on_road && start.position.ground_distance(t) <= 50.0 + 1e-9) {
                        bad.push(i);
                    }
                    scheduled += 1;
                }
                ("no_target" | "out_of_range", None) => {
                    s.advance_to(s.t() + 3.0);
                    if pose_bits(&s.state().pose) != before || s.state().pending.is_some() {
                        bad.push(i);
                    }
                    held += 1;
                }
                _ => bad.push(i),
            }
        }
    }
    check(
        replies.len() == 50 && bad.is_empty(),
        format!("{} replies x 2 poses: {scheduled} scheduled valid, {held} held still, invalid {bad:?}", replies.len()),
    )
}

fn end_to_end_ordering() -> Outcome {
    let layout = TownLayout::default_scene();
    let cfg = SessionConfig::default();
    let mut times = Vec::new();
    for t in [Technique::Teleport, Technique::LlmDriven, Technique::Steering] {
        let script = agent_script(&layout, t, &AgentConfig::default()).ok_or("no route for the agent")?;
        let report = run_session(&layout, t, &script, &MockBackend::default(), &cfg).map_err(|e| e.to_string())?;
        times.push(report.completion_time.ok_or(format!("{t} agent did not finish"))?);
    }
    check(
        times[0] < times[1] && times[0] < times[2],
        format!("teleport {:.2} s, llm {:.2} s, steering {:.2} s", times[0], times[1], times[2]),
    )
}

fn pupil_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_baseline = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(300..2000);
        let t: Vec<f64> = (0..n).map(|i| i as f64 * 0.005).collect();
        let values: Vec<Option<f64>> =
            (0..n).map(|_| rng.random_bool(0.9).then(|| rng.random_range(2.0..7.0))).collect();
        let t0 = rng.random_range(1.0..t[n - 1]);
        let norm = baseline_correct(&t, &values, t0, 1.0).map_err(|e| e.to_string())?;
        let mean = baseline_mean(&t, &norm, t0, 1.0).ok_or("empty baseline window")?;
        worst_baseline = worst_baseline.max((mean - 1.0).abs());
    }
    let mut worst_sg = 0.0f64;
    for _ in 0..200 {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let n = rng.random_range(31..400);
        let f = |i: usize| {
            let x = i as f64 / n as f64;
            c[0] + x * (c[1] + x * (c[2] + x * c[3]))
        };
        let v: Vec<f64> = (0..n).map(f).collect();
        let s = savitzky_golay(&v, 31, 3).map_err(|e| e.to_string())?;
        worst_sg = s.iter().enumerate().fold(worst_sg, |w, (i, y)| w.max((y - f(i)).abs()));
    }
    check(
        worst_baseline <= 1e-9 && worst_sg <= 1e-6,
        format!("baseline mean error {worst_baseline:.1e}, SG cubic error {worst_sg:.1e}"),
    )
}

/// The feature list enumerated group by group.
fn expected_feature_names() -> Vec<String> {
    let stats = |prefix: &str, which: &[&str]| which.iter().map(|s| format!("{prefix}_{s}")).collect::<Vec<_>>();
    let five = ["mean", "std", "min", "max", "sum"];
    let four = ["mean", "std", "min", "max"];
    let mut names = vec!["fixation_count".to_string()];
    names.extend(stats("fixation_duration", &five));
    names.push("saccade_count".into());
    names.extend(stats("saccade_duration", &five));
    names.extend(stats("saccade_peak_velocity", &four));
    names.extend(stats("saccade_amplitude", &four));
    names.extend(["sac_fix_duration_ratio".into(), "sac_fix_count_ratio".into(), "blink_count".into()]);
    names.extend(stats("blink_duration", &four));
    names.extend(stats("pupil_norm", &four));
    names
}

fn feature_width() -> Outcome {
    let cfg = FeatureConfig::default();
    let names_ok = FEATURE_NAMES.iter().map(|s| s.to_string()).collect::<Vec<_>>() == expected_feature_names();
    let (mut vectors, mut malformed, mut windows_65) = (0, 0, Vec::new());
    for (seed, t) in Technique::ALL.into_iter().enumerate() {
        for duration in [20.5, 41.0, 59.0, 65.0] {
            let rows = recording_features(&synthetic_recording(seed as u64, duration, t), &cfg, t)
                .map_err(|e| e.to_string())?;
            for r in &rows {
                let named: Vec<&str> = r.named().map(|(n, _)| n).collect();
                let ok = r.values.len() == FEATURE_COUNT
                    && r.values.iter().all(|v| v.is_finite())
                    && named == FEATURE_NAMES;
                malformed += usize::from(!ok);
            }
            vectors += rows.len();
            if duration == 65.0 {
                windows_65.push(rows.len());
            }
        }
    }
    check(
        names_ok && FEATURE_COUNT == 31 && malformed == 0 && windows_65.iter().all(|&n| n == 3),
        format!("{vectors} vectors, {malformed} malformed, names match: {names_ok}, 65 s windows {windows_65:?}"),
    )
}

fn statistics_oracles() -> Outcome {
    let groups = vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
    let a = anova_oneway(&groups).map_err(|e| e.to_string())?;
    let h = kruskal_wallis(&groups).map_err(|e| e.to_string())?.h;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..rng.random_range(2..25)).map(|_| rng.random_range(-10.0..10.0)).collect())
            .collect();
        let (n1, n2) = (g[0].len() as f64, g[1].len() as f64);
        let m = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
        let (m1, m2) = (m(&g[0]), m(&g[1]));
        let ss = |x: &[f64], mu: f64| x.iter().map(|v| (v - mu).powi(2)).sum::<f64>();
        let pooled = (ss(&g[0], m1) + ss(&g[1], m2)) / (n1 + n2 - 2.0);
        let t = (m1 - m2) / (pooled * (1.0 / n1 + 1.0 / n2)).sqrt();
        let f = anova_oneway(&g).map_err(|e| e.to_string())?.f;
        worst = worst.max((f - t * t).abs());
    }
    let ok = (a.f - 16.0).abs() <= 1e-9
        && (a.eta_squared - 0.9143).abs() <= 1e-4
        && (h - 3.5714).abs() <= 1e-4
        && worst <= 1e-6;
    check(
        ok,
        format!(
            "F {:.9}, eta^2 {:.4}, H {h:.4} (want 3.5714), max |F - t^2| {worst:.1e}",
            a.f, a.eta_squared
        ),
    )
}

fn classifier_sanity() -> Outcome {
    let names = ["f0", "f1", "f2", "f3"];
    let run = || -> Result<(Vec<u8>, Vec<u8>), String> {
        let ds = gaussian_clusters(11, [100, 100, 100], &names, 5.0);
        let plain = classify_report(&ds, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
        let leak: Vec<f64> = ds.labels.iter().map(|&l| label_code(l)).collect();
        let ds = ds.with_feature("label_copy", &leak).map_err(|e| e.to_string())?;
        let leaky = classify_report(&ds, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
        Ok((serde_json::to_vec(&plain).unwrap(), serde_json::to_vec(&leaky).unwrap()))
    };
    let first = run()?;
    let identical = first == run()?;
    let plain: wayfarer_core::analytics::ClassificationReport = serde_json::from_slice(&first.0).unwrap();
    let leaky: wayfarer_core::analytics::ClassificationReport = serde_json::from_slice(&first.1).unwrap();
    let top = leaky.importance.first().map(|i| i.feature.as_str()).unwrap_or("");
    check(
        plain.knn_accuracy >= 0.95 && plain.knn_accuracy > plain.baseline_accuracy && top == "label_copy" && identical,
        format!(
            "accuracy {:.3} vs baseline {:.3}, top importance `{top}`, byte-identical reruns: {identical}",
            plain.knn_accuracy, plain.baseline_accuracy
        ),
    )
}

fn questionnaire_formulas() -> Outcome {
    let sus = |f: fn(usize) -> f64| score_sus(&(1..=10).map(f).collect::<Vec<_>>()).map_err(|e| e.to_string());
    let all5 = sus(|_| 5.0)?;
    let best = sus(|i| if i % 2 == 1 { 5.0 } else { 1.0 })?;
    let worst = sus(|i| if i % 2 == 1 { 1.0 } else { 5.0 })?;
    let csq = score_csq_vr(&[6.0; 6]).map_err(|e| e.to_string())?;
    let ok = all5 == 50.0
        && best == 100.0
        && worst == 0.0
        && [csq.nausea, csq.vestibular, csq.oculomotor] == [12.0; 3]
        && csq.total == 36.0;
    check(
        ok,
        format!(
            "SUS {all5}/{best}/{worst}, CSQ-VR max {}/{}/{} total {}",
            csq.nausea, csq.vestibular, csq.oculomotor, csq.total
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "majority baseline arithmetic", majority_baseline_arithmetic),
        (2, "I-VT oracle equivalence", ivt_oracle_equivalence),
        (3, "geometry oracle", geometry_oracle),
        (4, "steering kinematics", steering_kinematics),
        (5, "scheduled teleport timing", scheduled_teleport_timing),
        (6, "pipeline fallbacks", pipeline_fallbacks),
        (7, "end-to-end ordering", end_to_end_ordering),
        (8, "pupil invariants", pupil_invariants),
        (9, "feature width", feature_width),
        (10, "statistics oracles", statistics_oracles),
        (11, "classifier sanity", classifier_sanity),
        (12, "questionnaire formulas", questionnaire_formulas),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let result = run();
        let (verdict, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        let expected_red = EXPECTED_FAILURES.contains(&id);
        let note = if expected_red { "  [known defect in the stated oracle]" } else { "" };
        println!("{verdict} {id:>2} {name}: {detail}{note}");
        if result.is_ok() == expected_red {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected results for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
