//! Write a scenario script by hand, render it to an interaction log, and
//! derive the ground-truth event list it must produce.
//!
//! ```bash
//! cargo run --example synth_scenario
//! ```

use std::collections::BTreeMap;

use evotrack::synth::{
    expected_events, render_scenario, EventParams, PlantedGroup, ScenarioScript,
};

fn main() -> evotrack::Result<()> {
    let members = |prefix: &str, n: usize| -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    };

    // Five slots: a quartet persists throughout, a sextet dissolves after
    // slot 2.
    let mut script = ScenarioScript::new("handmade", 5, 3);
    script
        .groups
        .push(PlantedGroup::constant("quartet", 0..=4, &members("q", 4)));
    script.groups.push(PlantedGroup {
        name: "sextet".to_string(),
        members_by_slot: (0..=2)
            .map(|slot| (slot, members("s", 6)))
            .collect::<BTreeMap<_, _>>(),
    });

    println!(
        "script as JSON:\n{}\n",
        serde_json::to_string_pretty(&script)?
    );

    let records = render_scenario(&script)?;
    println!(
        "rendered {} records; first: {} -> {} at {}",
        records.len(),
        records[0].source,
        records[0].target,
        records[0].timestamp
    );

    let expected = expected_events(&script, &EventParams::default())?;
    println!("\nground-truth events the pipeline must reproduce at zero noise:");
    for event in expected.sgci.iter().chain(expected.ged.iter()) {
        println!(
            "  {:<4} {:<10} at ({}, {})",
            event.method.to_string(),
            event.kind.to_string(),
            event.slot_from,
            event.slot_to
        );
    }
    Ok(())
}
