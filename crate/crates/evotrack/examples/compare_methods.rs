//! Align the two event streams over one history: matched events, events
//! only one method reports, and why.
//!
//! ```bash
//! cargo run --example compare_methods
//! ```

use tempfile::TempDir;

use evotrack::config::PipelineConfig;
use evotrack::io;
use evotrack::pipeline::{run_pipeline, stage_synth};
use evotrack::synth::scenarios;

fn main() -> evotrack::Result<()> {
    // A transient two-slot group next to a stable anchor: the inclusion
    // method tracks it cradle to grave, the stable-group method filters
    // it out entirely.
    let script = scenarios::transient_group();
    let dir = TempDir::new().expect("temp dir");
    let out = dir.path().join("out");
    stage_synth(&script, &out)?;
    let config = PipelineConfig {
        slot_days: script.slot_days,
        slot_step_days: script.slot_days,
        k: vec![script.k as u32],
        ..PipelineConfig::default()
    };
    run_pipeline(&out.join(io::RECORDS_FILE), &out, &config)?;

    let report: evotrack::analytics::ComparisonReport =
        io::read_json(&out.join(format!("report_comparison_{}.json", script.k)))?;

    println!("aggregate counts (stable-group / inclusion):");
    for row in &report.aggregates {
        println!(
            "  {:<32} {:>3} / {:<3}",
            row.label, row.sgci_count, row.ged_count
        );
    }
    println!(
        "\ntotals: {} stable-group events, {} inclusion events, {} matched, {} distinct",
        report.sgci_total, report.ged_total, report.matched, report.distinct_union
    );
    for miss in &report.only_in_ged {
        println!(
            "  only inclusion: {:<10} at ({}, {})  reason: {}",
            miss.event.kind.to_string(),
            miss.event.slot_from,
            miss.event.slot_to,
            miss.reason
        );
    }
    for miss in &report.only_in_sgci {
        println!(
            "  only stable-group: {:<11} at ({}, {})  inclusions {:.3} / {:.3}",
            miss.event.kind.to_string(),
            miss.event.slot_from,
            miss.event.slot_to,
            miss.i_forward,
            miss.i_backward
        );
    }
    Ok(())
}
