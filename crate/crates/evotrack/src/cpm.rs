//! Overlapping community extraction via k-clique percolation on directed
//! snapshot graphs.
//!
//! A node set of size k is a directed k-clique when its nodes admit an
//! ordering in which every earlier node has an edge to every later one (a
//! transitive tournament). Two k-cliques are adjacent when they share k-1
//! nodes; communities are the node unions of connected components of the
//! clique-adjacency graph, so a node may belong to several communities.
//!
//! Weights take part only through the ingest threshold: percolation runs on
//! the binary adjacency of surviving edges. An optional clique-intensity
//! threshold (geometric mean of member edge weights) can prune cliques but
//! is off by default.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::SnapshotGraph;

/// Deterministic community identifier: extraction slot, clique size, and
/// rank of the sorted member list within that (slot, k) extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CommunityId {
    pub slot: u32,
    pub k: u32,
    pub rank: u32,
}

impl fmt::Display for CommunityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}k{}c{}", self.slot, self.k, self.rank)
    }
}

impl FromStr for CommunityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<CommunityId> {
        let err = || Error::Mismatch(format!("malformed community id `{s}`"));
        let rest = s.strip_prefix('s').ok_or_else(err)?;
        let (slot, rest) = rest.split_once('k').ok_or_else(err)?;
        let (k, rank) = rest.split_once('c').ok_or_else(err)?;
        Ok(CommunityId {
            slot: slot.parse().map_err(|_| err())?,
            k: k.parse().map_err(|_| err())?,
            rank: rank.parse().map_err(|_| err())?,
        })
    }
}

impl Serialize for CommunityId {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CommunityId {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A node set extracted from one slot, with the clique size it was
/// extracted at. Members are kept sorted, which makes ids, dump files, and
/// tie-breaks deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Community {
    pub id: CommunityId,
    pub slot_index: usize,
    pub k: usize,
    pub members: Vec<String>,
}

impl Community {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, member: &str) -> bool {
        self.members
            .binary_search_by(|m| m.as_str().cmp(member))
            .is_ok()
    }
}

/// How a candidate node set qualifies as a k-clique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CliqueMode {
    /// Transitive-tournament criterion on the directed edges.
    Directed,
    /// Fallback: any pair connected in at least one direction is adjacent.
    Undirected,
}

impl fmt::Display for CliqueMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliqueMode::Directed => write!(f, "directed"),
            CliqueMode::Undirected => write!(f, "undirected"),
        }
    }
}

impl FromStr for CliqueMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<CliqueMode> {
        match s {
            "directed" => Ok(CliqueMode::Directed),
            "undirected" => Ok(CliqueMode::Undirected),
            other => Err(Error::InvalidParameter(format!(
                "unknown clique mode `{other}` (expected directed|undirected)"
            ))),
        }
    }
}

/// Interned view of a snapshot: node index order equals lexicographic node
/// name order, so index-sorted member lists map to name-sorted ones.
struct InternedGraph {
    names: Vec<String>,
    sym_neighbors: Vec<Vec<u32>>,
    directed: HashSet<(u32, u32)>,
    weights: HashMap<(u32, u32), u32>,
}

impl InternedGraph {
    fn new(graph: &SnapshotGraph) -> InternedGraph {
        let names: Vec<String> = graph.nodes.iter().cloned().collect();
        let index: HashMap<&str, u32> = names
            .iter()
            .enumerate()
            .map(|(i, name)| (name.as_str(), i as u32))
            .collect();
        let mut sym_neighbors: Vec<Vec<u32>> = vec![Vec::new(); names.len()];
        let mut directed = HashSet::new();
        let mut weights = HashMap::new();
        for ((source, target), weight) in &graph.edges {
            let s = index[source.as_str()];
            let t = index[target.as_str()];
            directed.insert((s, t));
            weights.insert((s, t), *weight);
            sym_neighbors[s as usize].push(t);
            sym_neighbors[t as usize].push(s);
        }
        for neighbors in &mut sym_neighbors {
            neighbors.sort_unstable();
            neighbors.dedup();
        }
        InternedGraph {
            names,
            sym_neighbors,
            directed,
            weights,
        }
    }

    fn has_directed(&self, from: u32, to: u32) -> bool {
        self.directed.contains(&(from, to))
    }

    /// Greedy transitive-tournament check: a valid ordering exists iff a
    /// node with out-edges to all remaining nodes can be peeled off
    /// repeatedly. Any such node is safe to place first.
    fn is_transitive_tournament(&self, set: &[u32]) -> bool {
        let mut remaining: Vec<u32> = set.to_vec();
        while remaining.len() > 1 {
            let source = remaining.iter().position(|&candidate| {
                remaining
                    .iter()
                    .all(|&other| other == candidate || self.has_directed(candidate, other))
            });
            match source {
                Some(pos) => {
                    remaining.swap_remove(pos);
                }
                None => return false,
            }
        }
        true
    }

    /// Geometric mean of the weights of all directed edges among `set`.
    fn intensity(&self, set: &[u32]) -> f64 {
        let mut log_sum = 0.0;
        let mut count = 0usize;
        for &a in set {
            for &b in set {
                if a != b {
                    if let Some(weight) = self.weights.get(&(a, b)) {
                        log_sum += f64::from(*weight).ln();
                        count += 1;
                    }
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            (log_sum / count as f64).exp()
        }
    }
}

/// Enumerate all size-k node subsets that are complete in the symmetrized
/// adjacency, extending candidates in ascending index order.
fn enumerate_symmetric_cliques(graph: &InternedGraph, k: usize) -> Vec<Vec<u32>> {
    fn extend(
        graph: &InternedGraph,
        current: &mut Vec<u32>,
        candidates: &[u32],
        k: usize,
        out: &mut Vec<Vec<u32>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        if current.len() + candidates.len() < k {
            return;
        }
        for (i, &v) in candidates.iter().enumerate() {
            current.push(v);
            let next: Vec<u32> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&u| graph.sym_neighbors[v as usize].binary_search(&u).is_ok())
                .collect();
            extend(graph, current, &next, k, out);
            current.pop();
        }
    }

    let n = graph.names.len() as u32;
    let mut cliques = Vec::new();
    let mut current = Vec::with_capacity(k);
    for v in 0..n {
        current.push(v);
        let candidates: Vec<u32> = graph.sym_neighbors[v as usize]
            .iter()
            .copied()
            .filter(|&u| u > v)
            .collect();
        extend(graph, &mut current, &candidates, k, &mut cliques);
        current.pop();
    }
    cliques
}

fn clique_indices(graph: &InternedGraph, k: usize, mode: CliqueMode) -> Result<Vec<Vec<u32>>> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("k must be >= 3 (got {k})")));
    }
    let mut cliques = enumerate_symmetric_cliques(graph, k);
    if mode == CliqueMode::Directed {
        cliques.retain(|set| graph.is_transitive_tournament(set));
    }
    Ok(cliques)
}

/// All directed (or symmetrized, per `mode`) k-cliques of a snapshot as
/// sorted member lists, in sorted order, duplicate-free.
pub fn enumerate_k_cliques(
    graph: &SnapshotGraph,
    k: usize,
    mode: CliqueMode,
) -> Result<Vec<Vec<String>>> {
    let interned = InternedGraph::new(graph);
    let cliques = clique_indices(&interned, k, mode)?;
    Ok(cliques
        .into_iter()
        .map(|set| {
            set.into_iter()
                .map(|i| interned.names[i as usize].clone())
                .collect()
        })
        .collect())
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(len: usize) -> UnionFind {
        UnionFind {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            self.parent[root] = self.parent[self.parent[root]];
            root = self.parent[root];
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (mut a, mut b) = (self.find(x), self.find(y));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Percolate k-cliques into communities: cliques sharing k-1 nodes are
/// chained, and each connected component's node union is one community.
///
/// Cliques are bucketed by their (k-1)-subsets, so adjacency tests are
/// linear in the number of cliques rather than quadratic.
pub fn percolate<T: Ord + Clone + std::hash::Hash>(cliques: &[Vec<T>], k: usize) -> Vec<Vec<T>> {
    debug_assert!(cliques.iter().all(|c| c.len() == k));
    let mut uf = UnionFind::new(cliques.len());
    let mut buckets: HashMap<Vec<&T>, usize> = HashMap::new();
    for (index, clique) in cliques.iter().enumerate() {
        for skip in 0..k {
            let subset: Vec<&T> = clique
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, m)| m)
                .collect();
            match buckets.entry(subset) {
                std::collections::hash_map::Entry::Occupied(entry) => {
                    uf.union(*entry.get(), index);
                }
                std::collections::hash_map::Entry::Vacant(entry) => {
                    entry.insert(index);
                }
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<T>> = BTreeMap::new();
    for (index, clique) in cliques.iter().enumerate() {
        let root = uf.find(index);
        components
            .entry(root)
            .or_default()
            .extend(clique.iter().cloned());
    }
    let mut communities: Vec<Vec<T>> = components
        .into_values()
        .map(|mut members| {
            members.sort();
            members.dedup();
            members
        })
        .collect();
    communities.sort();
    communities
}

/// Extract the overlapping communities of one snapshot at clique size `k`.
///
/// Ids are assigned by the rank of the sorted member list, so identical
/// graphs always produce byte-identical community lists.
pub fn extract_communities(
    graph: &SnapshotGraph,
    k: usize,
    mode: CliqueMode,
    intensity_threshold: Option<f64>,
) -> Result<Vec<Community>> {
    let interned = InternedGraph::new(graph);
    let mut cliques = clique_indices(&interned, k, mode)?;
    if let Some(threshold) = intensity_threshold {
        cliques.retain(|set| interned.intensity(set) >= threshold);
    }
    let member_sets = percolate(&cliques, k);
    Ok(member_sets
        .into_iter()
        .enumerate()
        .map(|(rank, indices)| Community {
            id: CommunityId {
                slot: graph.slot_index as u32,
                k: k as u32,
                rank: rank as u32,
            },
            slot_index: graph.slot_index,
            k,
            members: indices
                .into_iter()
                .map(|i| interned.names[i as usize].clone())
                .collect(),
        })
        .collect())
}
