//! Match communities across consecutive slots and thread them into
//! timelines, separating stable groups from transient ones.
//!
//! ```bash
//! cargo run --example track_timelines
//! ```

use evotrack::synth::{planted_communities, scenarios};
use evotrack::tracking::{assemble_timelines, match_continuations, modified_jaccard, MatchParams};
use evotrack::Community;

fn main() -> evotrack::Result<()> {
    let a = vec!["ana".to_string(), "bob".to_string(), "cid".to_string()];
    let b = vec!["bob".to_string(), "cid".to_string()];
    println!(
        "modified Jaccard picks the larger own-size ratio: mj = {}",
        modified_jaccard(&a, &b)
    );

    // A scripted history: one group splits into a dominant core and a
    // small splinter after slot 2.
    let script = scenarios::split_two_way();
    let communities = planted_communities(&script, script.k);
    let mut by_slot: Vec<Vec<Community>> = vec![Vec::new(); script.slots];
    for community in &communities {
        by_slot[community.slot_index].push(community.clone());
    }

    let params = MatchParams::default();
    let mut candidates = Vec::new();
    for window in by_slot.windows(2) {
        candidates.extend(match_continuations(&window[0], &window[1], &params)?);
    }
    println!("\nevaluated transitions (accepted ones carry the timeline):");
    for candidate in candidates.iter().filter(|c| c.mj > 0.0) {
        println!(
            "  {} -> {}  mj {:.3}  jaccard {:.3}  accepted {}",
            candidate.from, candidate.to, candidate.mj, candidate.jaccard, candidate.accepted
        );
    }

    let timelines = assemble_timelines(&candidates, &communities, 3);
    println!("\ntimelines (stable = at least 3 consecutive slots):");
    for timeline in &timelines {
        let states: Vec<String> = timeline.states.iter().map(|id| id.to_string()).collect();
        println!(
            "  timeline {}: {} ({})",
            timeline.id,
            states.join(" -> "),
            if timeline.stable {
                "stable"
            } else {
                "unstable"
            }
        );
    }
    Ok(())
}
