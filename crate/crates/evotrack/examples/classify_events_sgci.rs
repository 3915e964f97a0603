//! Label transitions between stable groups: splits, merges, deletions,
//! additions, split_merge, decay, constancy, and change_size.
//!
//! ```bash
//! cargo run --example classify_events_sgci
//! ```

use evotrack::sgci::{classify_sgci, SgciParams};
use evotrack::synth::{planted_communities, scenarios};
use evotrack::tracking::{
    assemble_timelines, match_continuations, MatchParams, TransitionCandidate,
};
use evotrack::Community;

fn main() -> evotrack::Result<()> {
    // A small group feeds most of itself into a group ten times larger
    // (addition outranks the simultaneous fan-out) while its leftover
    // splinter is dwarfed past the deletion ratio.
    let script = scenarios::addition_priority();
    let communities = planted_communities(&script, script.k);
    let mut by_slot: Vec<Vec<Community>> = vec![Vec::new(); script.slots];
    for community in &communities {
        by_slot[community.slot_index].push(community.clone());
    }
    let mut candidates = Vec::new();
    for window in by_slot.windows(2) {
        candidates.extend(match_continuations(
            &window[0],
            &window[1],
            &MatchParams::default(),
        )?);
    }
    let timelines = assemble_timelines(&candidates, &communities, 3);
    let accepted: Vec<TransitionCandidate> =
        candidates.into_iter().filter(|c| c.accepted).collect();

    let events = classify_sgci(
        &accepted,
        &communities,
        &timelines,
        script.slots,
        &SgciParams::default(),
    )?;
    println!("stable-group events for `{}`:", script.name);
    for event in &events {
        let from: Vec<String> = event.from_ids.iter().map(|id| id.to_string()).collect();
        let to: Vec<String> = event.to_ids.iter().map(|id| id.to_string()).collect();
        println!(
            "  ({}, {})  {:<11} {} -> {}",
            event.slot_from,
            event.slot_to,
            event.kind.to_string(),
            from.join(";"),
            if to.is_empty() {
                "-".to_string()
            } else {
                to.join(";")
            },
        );
    }

    // Raising the branch-size ratio far enough turns deletion into split
    // and addition into merge.
    let strict = SgciParams {
        size_ratio: 1000.0,
        ..SgciParams::default()
    };
    let events = classify_sgci(&accepted, &communities, &timelines, script.slots, &strict)?;
    println!("\nwith size_ratio = 1000 the ratio labels disappear:");
    for event in events.iter().filter(|e| e.slot_from == 2) {
        println!("  ({}, {})  {}", event.slot_from, event.slot_to, event.kind);
    }
    Ok(())
}
