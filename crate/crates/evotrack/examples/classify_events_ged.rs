//! The inclusion measure and the event rules built on it: continuing,
//! growing, shrinking, merging, splitting, dissolving, forming.
//!
//! ```bash
//! cargo run --example classify_events_ged
//! ```

use evotrack::ged::{classify_ged, inclusion, GedParams, ImportanceKind, ImportanceMetric};
use evotrack::synth::{planted_communities, scenarios};

fn main() -> evotrack::Result<()> {
    // Inclusion is asymmetric: a 4-member group half-contained in a pair
    // scores (2/4)^2 forward, but the pair is fully contained backward.
    let g1 = evotrack::Community {
        id: "s0k3c0".parse()?,
        slot_index: 0,
        k: 3,
        members: vec!["a".into(), "b".into(), "c".into(), "d".into()],
    };
    let g2 = evotrack::Community {
        id: "s1k3c0".parse()?,
        slot_index: 1,
        k: 3,
        members: vec!["a".into(), "b".into()],
    };
    let uniform = |c: &evotrack::Community| ImportanceMetric {
        kind: ImportanceKind::Uniform,
        values: vec![1.0; c.members.len()],
    };
    println!(
        "I(g1, g2) = {}   I(g2, g1) = {}",
        inclusion(&g1, &g2, &uniform(&g1))?,
        inclusion(&g2, &g1, &uniform(&g2))?
    );

    // Classify a scripted history over all groups (stability plays no
    // role here; short-lived groups get forming/dissolving events).
    let script = scenarios::decay_to_fragment();
    let communities = planted_communities(&script, script.k);
    let defaults = GedParams::default();
    let events = classify_ged(&communities, &[], script.slots, &defaults)?;
    println!(
        "\ninclusion events for `{}` at alpha = beta = 0.5:",
        script.name
    );
    for event in &events {
        let from: Vec<String> = event.from_ids.iter().map(|id| id.to_string()).collect();
        let to: Vec<String> = event.to_ids.iter().map(|id| id.to_string()).collect();
        println!(
            "  ({}, {})  {:<10} {} -> {}",
            event.slot_from,
            event.slot_to,
            event.kind.to_string(),
            if from.is_empty() {
                "-".to_string()
            } else {
                from.join(";")
            },
            if to.is_empty() {
                "-".to_string()
            } else {
                to.join(";")
            },
        );
    }

    // Lower thresholds admit weaker overlaps, so more pairs match.
    let relaxed = GedParams {
        alpha: 0.1,
        beta: 0.1,
        ..GedParams::default()
    };
    let relaxed_events = classify_ged(&communities, &[], script.slots, &relaxed)?;
    println!(
        "\npair events at thresholds 0.5: {}, at 0.1: {}",
        events
            .iter()
            .filter(|e| !e.from_ids.is_empty() && !e.to_ids.is_empty())
            .count(),
        relaxed_events
            .iter()
            .filter(|e| !e.from_ids.is_empty() && !e.to_ids.is_empty())
            .count()
    );
    Ok(())
}
