//! The whole chain in one call: render a scenario, run every stage, and
//! walk the artifacts it writes.
//!
//! ```bash
//! cargo run --example full_pipeline
//! ```

use tempfile::TempDir;

use evotrack::config::PipelineConfig;
use evotrack::io;
use evotrack::pipeline::{run_pipeline, stage_synth};
use evotrack::synth::scenarios;

fn main() -> evotrack::Result<()> {
    let script = scenarios::merge_then_split();
    let dir = TempDir::new().expect("temp dir");
    let out = dir.path().join("out");
    stage_synth(&script, &out)?;
    println!("scenario `{}` rendered into {}", script.name, out.display());

    let config = PipelineConfig {
        slot_days: script.slot_days,
        slot_step_days: script.slot_days,
        k: vec![script.k as u32],
        ..PipelineConfig::default()
    };
    run_pipeline(&out.join(io::RECORDS_FILE), &out, &config)?;

    let mut names: Vec<String> = std::fs::read_dir(&out)?
        .map(|entry| entry.unwrap().file_name().to_string_lossy().to_string())
        .collect();
    names.sort();
    println!("\nartifacts:");
    for name in &names {
        println!("  {name}");
    }

    let meta: io::RunMeta = io::read_json(&out.join(io::META_FILE))?;
    println!(
        "\n{} records over {} slots; events found:",
        meta.record_count, meta.slot_count
    );
    for (file, label) in [
        (io::EVENTS_SGCI_FILE, "stable-group"),
        (io::EVENTS_GED_FILE, "inclusion"),
    ] {
        let events = io::read_events(&out.join(file))?;
        println!("  {label}: {}", events.len());
        for event in events
            .iter()
            .filter(|e| e.slot_from == 2 || e.slot_from == 5)
        {
            println!(
                "    ({}, {}) {}",
                event.slot_from, event.slot_to, event.kind
            );
        }
    }
    Ok(())
}
