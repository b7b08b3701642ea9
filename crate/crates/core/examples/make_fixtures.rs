//! Regenerates the checked-in fixtures under `fixtures/`.
//!
//! cargo run -p wayfarer-core --example make_fixtures [-- DIR]

use std::fs;
use std::path::PathBuf;

use wayfarer_core::analytics::gaussian_clusters;
use wayfarer_core::gaze::synth::synthetic_recording;
use wayfarer_core::gaze::{write_gaze_log, FEATURE_NAMES};
use wayfarer_core::locomotion::{agent_script, AgentConfig};
use wayfarer_core::world::TownLayout;
use wayfarer_core::Technique;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map_or_else(|| PathBuf::from("fixtures"), PathBuf::from);
    fs::create_dir_all(&dir)?;

    // 275/280/95 rows split 80/20 per class gives 55/56/19 test rows.
    let mut ds = gaussian_clusters(20240, [275, 280, 95], &FEATURE_NAMES, 1.5);
    let mut seen = [0usize; 3];
    let groups = ds
        .labels
        .iter()
        .map(|l| {
            let c = Technique::ALL.iter().position(|t| t == l).unwrap();
            seen[c] += 1;
            format!("p{:02}", (seen[c] - 1) % 20 + 1)
        })
        .collect();
    ds.groups = Some(groups);
    let mut w = csv::Writer::from_path(dir.join("features_55_56_19.csv"))?;
    let mut header: Vec<String> = ds.feature_names.clone();
    header.extend(["label".to_string(), "group".to_string()]);
    w.write_record(&header)?;
    for (i, row) in ds.rows.iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        rec.push(ds.labels[i].as_str().to_string());
        rec.push(ds.groups.as_ref().unwrap()[i].clone());
        w.write_record(&rec)?;
    }
    w.flush()?;

    let layout = TownLayout::default_scene();
    fs::write(dir.join("scene.json"), serde_json::to_string_pretty(&layout)? + "\n")?;
    for t in Technique::ALL {
        let script = agent_script(&layout, t, &AgentConfig::default()).expect("default scene is connected");
        fs::write(dir.join(format!("script_{t}.json")), serde_json::to_string_pretty(&script)? + "\n")?;
    }

    let samples = synthetic_recording(7, 45.0, Technique::LlmDriven);
    write_gaze_log(&samples, fs::File::create(dir.join("gaze_llm_45s.csv"))?)?;

    fs::write(
        dir.join("sus.json"),
        "[\n  {\"id\": \"p01\", \"items\": [5, 5, 5, 5, 5, 5, 5, 5, 5, 5]},\n  {\"id\": \"p02\", \"items\": [5, 1, 5, 1, 5, 1, 5, 1, 5, 1]},\n  {\"id\": \"p03\", \"items\": [4, 2, 4, 2, 3, 2, 4, 2, 4, 3]}\n]\n",
    )?;
    fs::write(dir.join("csqvr.json"), "[[6, 6, 6, 6, 6, 6], [0, 1, 2, 3, 4, 5]]\n")?;
    fs::write(dir.join("tlx.json"), "{\"id\": \"p01\", \"items\": [55, 40, 30, 60, 45, 20]}\n")?;
    fs::write(dir.join("ipq.json"), "[[3, 4, 2, 5, 1, 3, 4, 6, 0, 2, 3, 5, 4, 1]]\n")?;
    fs::write(
        dir.join("ipq_config.json"),
        "{\n  \"subscales\": {\n    \"general\": [1],\n    \"spatial\": [2, 3, 4, 5, 6],\n    \"involvement\": [7, 8, 9, 10],\n    \"realism\": [11, 12, 13, 14]\n  },\n  \"reversed\": [3, 9, 11]\n}\n",
    )?;
    println!("fixtures written to {}", dir.display());
    Ok(())
}
