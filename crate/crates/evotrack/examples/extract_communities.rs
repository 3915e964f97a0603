//! Directed k-clique percolation on a single snapshot: which node sets
//! count as cliques, and how cliques chain into overlapping communities.
//!
//! ```bash
//! cargo run --example extract_communities
//! ```

use std::collections::{BTreeMap, BTreeSet};

use evotrack::cpm::{enumerate_k_cliques, extract_communities, CliqueMode};
use evotrack::ingest::SnapshotGraph;

fn graph(edges: &[(&str, &str)]) -> SnapshotGraph {
    let mut edge_map = BTreeMap::new();
    let mut nodes = BTreeSet::new();
    for (from, to) in edges {
        edge_map.insert((from.to_string(), to.to_string()), 2);
        nodes.insert(from.to_string());
        nodes.insert(to.to_string());
    }
    SnapshotGraph {
        slot_index: 0,
        nodes,
        edges: edge_map,
    }
}

fn main() -> evotrack::Result<()> {
    // Two transitive triangles chained through the pair {c, d}, plus a
    // directed 3-cycle that no ordering can linearise.
    let snapshot = graph(&[
        ("a", "b"),
        ("a", "c"),
        ("b", "c"),
        ("b", "d"),
        ("c", "d"),
        ("d", "e"),
        ("c", "e"),
        // cycle: x -> y -> z -> x
        ("x", "y"),
        ("y", "z"),
        ("z", "x"),
    ]);

    for mode in [CliqueMode::Directed, CliqueMode::Undirected] {
        let cliques = enumerate_k_cliques(&snapshot, 3, mode)?;
        println!("{mode} 3-cliques:");
        for clique in &cliques {
            println!("  {{{}}}", clique.join(", "));
        }
        let communities = extract_communities(&snapshot, 3, mode, None)?;
        println!("{mode} communities (cliques chained by 2-node overlap):");
        for community in &communities {
            println!("  {} = {{{}}}", community.id, community.members.join(", "));
        }
        println!();
    }

    // The cycle {x, y, z} appears only under the undirected fallback: its
    // six orderings all leave one pair pointing backwards.
    Ok(())
}
