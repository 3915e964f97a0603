//! Group evolution discovery over all communities via the inclusion
//! measure.
//!
//! The inclusion of group G1 in group G2 combines a quantity factor (the
//! fraction of G1's members present in G2) with a quality factor (the
//! fraction of G1's total member importance carried by the shared members):
//!
//! ```text
//! I(G1, G2) = |G1 ∩ G2| / |G1| * sum NI(x) over G1 ∩ G2 / sum NI(x) over G1
//! ```
//!
//! With uniform importance both factors coincide and the measure reduces to
//! `(|G1 ∩ G2| / |G1|)^2` exactly. For each ordered pair of groups in
//! consecutive slots, forward and backward inclusion against the alpha and
//! beta thresholds decide the event; groups matching no pair dissolve (left
//! side) or form (right side).

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cpm::Community;
use crate::error::{Error, Result};
use crate::event::{EventKind, EvolutionEvent};
use crate::ingest::SnapshotGraph;
use crate::tracking::intersection_size;

/// Member-position metric used as the quality weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceKind {
    Uniform,
    InDegree,
    TotalDegree,
}

impl std::fmt::Display for ImportanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ImportanceKind::Uniform => write!(f, "uniform"),
            ImportanceKind::InDegree => write!(f, "in_degree"),
            ImportanceKind::TotalDegree => write!(f, "total_degree"),
        }
    }
}

impl FromStr for ImportanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ImportanceKind> {
        match s {
            "uniform" => Ok(ImportanceKind::Uniform),
            "in_degree" => Ok(ImportanceKind::InDegree),
            "total_degree" => Ok(ImportanceKind::TotalDegree),
            other => Err(Error::InvalidParameter(format!(
                "unknown importance metric `{other}` (expected uniform|in_degree|total_degree)"
            ))),
        }
    }
}

/// Importance values for every member of one community, aligned with the
/// community's sorted member list.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceMetric {
    pub kind: ImportanceKind,
    pub values: Vec<f64>,
}

impl ImportanceMetric {
    pub fn value_of(&self, community: &Community, member: &str) -> Option<f64> {
        community
            .members
            .binary_search_by(|m| m.as_str().cmp(member))
            .ok()
            .map(|i| self.values[i])
    }
}

/// Importance of each community member, computed on the subgraph induced by
/// the community within its slot graph.
///
/// Uniform assigns 1 to every member; in-degree and total-degree count
/// induced edges. A degree vector that is all zero falls back to uniform so
/// the quality factor stays defined.
pub fn node_importance(
    graph: &SnapshotGraph,
    community: &Community,
    kind: ImportanceKind,
) -> Result<ImportanceMetric> {
    if let Some(missing) = community.members.iter().find(|m| !graph.nodes.contains(*m)) {
        return Err(Error::Mismatch(format!(
            "community {} member `{missing}` is not a node of slot {}",
            community.id, graph.slot_index
        )));
    }
    let n = community.members.len();
    let values = match kind {
        ImportanceKind::Uniform => vec![1.0; n],
        ImportanceKind::InDegree | ImportanceKind::TotalDegree => {
            let position: HashMap<&str, usize> = community
                .members
                .iter()
                .enumerate()
                .map(|(i, m)| (m.as_str(), i))
                .collect();
            let mut degrees = vec![0.0; n];
            for (source, target) in graph.edges.keys() {
                let (s, t) = match (position.get(source.as_str()), position.get(target.as_str())) {
                    (Some(&s), Some(&t)) => (s, t),
                    _ => continue,
                };
                degrees[t] += 1.0;
                if kind == ImportanceKind::TotalDegree {
                    degrees[s] += 1.0;
                }
            }
            if degrees.iter().all(|&d| d == 0.0) {
                vec![1.0; n]
            } else {
                degrees
            }
        }
    };
    Ok(ImportanceMetric { kind, values })
}

/// Inclusion of `g1` in `g2` under `g1`'s importance values.
///
/// Returns 0 when the intersection is empty; an empty `g1` is an error
/// because both ratios are undefined.
pub fn inclusion(g1: &Community, g2: &Community, ni: &ImportanceMetric) -> Result<f64> {
    if g1.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "inclusion of the empty community {} is undefined",
            g1.id
        )));
    }
    debug_assert_eq!(ni.values.len(), g1.members.len());
    let common = intersection_size(&g1.members, &g2.members);
    if common == 0 {
        return Ok(0.0);
    }
    let quantity = common as f64 / g1.members.len() as f64;
    let total: f64 = ni.values.iter().sum();
    let shared: f64 = g1
        .members
        .iter()
        .zip(&ni.values)
        .filter(|(member, _)| g2.contains(member))
        .map(|(_, value)| value)
        .sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(quantity * (shared / total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GedParams {
    /// Threshold on forward inclusion I(G1, G2).
    pub alpha: f64,
    /// Threshold on backward inclusion I(G2, G1).
    pub beta: f64,
    pub metric: ImportanceKind,
    /// Size difference still read as continuing (0 demands equal sizes).
    pub continuity_delta: u32,
}

impl Default for GedParams {
    fn default() -> GedParams {
        GedParams {
            alpha: 0.5,
            beta: 0.5,
            metric: ImportanceKind::Uniform,
            continuity_delta: 0,
        }
    }
}

impl GedParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be in (0,1] (got {value})"
                )));
            }
        }
        Ok(())
    }
}

/// Decision for one ordered pair (both inclusions already computed), or
/// `None` when no rule fires. Comparisons are inclusive.
///
/// This table is one reconstruction of the inclusion-based decision rules;
/// it is public so a variant classifier can reuse `inclusion` and
/// `node_importance` but swap the table.
pub fn pair_rule(
    i_forward: f64,
    i_backward: f64,
    size_prev: usize,
    size_next: usize,
    params: &GedParams,
) -> Option<EventKind> {
    let fwd = i_forward >= params.alpha;
    let bwd = i_backward >= params.beta;
    match (fwd, bwd) {
        (true, true) => {
            if size_prev.abs_diff(size_next) <= params.continuity_delta as usize {
                Some(EventKind::Continuing)
            } else if size_next > size_prev {
                Some(EventKind::Growing)
            } else {
                Some(EventKind::Shrinking)
            }
        }
        (false, true) if size_prev >= size_next => Some(EventKind::Splitting),
        (true, false) if size_prev <= size_next => Some(EventKind::Merging),
        _ => None,
    }
}

/// Classify all consecutive-slot group pairs, over all communities.
///
/// Emits one event per pair whose inclusions fire a rule, one dissolving
/// per left-side group matching no pair, and one forming per right-side
/// group matching no pair. Snapshots supply induced subgraphs for the
/// degree metrics; with the uniform metric they are not consulted.
pub fn classify_ged(
    communities: &[Community],
    graphs: &[SnapshotGraph],
    slot_count: usize,
    params: &GedParams,
) -> Result<Vec<EvolutionEvent>> {
    params.validate()?;
    let mut by_slot: Vec<Vec<&Community>> = vec![Vec::new(); slot_count];
    for community in communities {
        if community.slot_index >= slot_count {
            return Err(Error::Mismatch(format!(
                "community {} lies beyond the slot horizon {slot_count}",
                community.id
            )));
        }
        by_slot[community.slot_index].push(community);
    }

    let importance_of = |community: &Community| -> Result<ImportanceMetric> {
        if params.metric == ImportanceKind::Uniform {
            Ok(ImportanceMetric {
                kind: ImportanceKind::Uniform,
                values: vec![1.0; community.members.len()],
            })
        } else {
            let graph = graphs.get(community.slot_index).ok_or_else(|| {
                Error::Mismatch(format!(
                    "no snapshot for slot {} (importance metric {})",
                    community.slot_index, params.metric
                ))
            })?;
            node_importance(graph, community, params.metric)
        }
    };

    let mut events = Vec::new();
    for t in 0..slot_count.saturating_sub(1) {
        let prev = &by_slot[t];
        let next = &by_slot[t + 1];
        let prev_ni: Vec<ImportanceMetric> = prev
            .iter()
            .map(|c| importance_of(c))
            .collect::<Result<_>>()?;
        let next_ni: Vec<ImportanceMetric> = next
            .iter()
            .map(|c| importance_of(c))
            .collect::<Result<_>>()?;

        let mut prev_matched = vec![false; prev.len()];
        let mut next_matched = vec![false; next.len()];
        for (i, g1) in prev.iter().enumerate() {
            for (j, g2) in next.iter().enumerate() {
                let i_forward = inclusion(g1, g2, &prev_ni[i])?;
                let i_backward = inclusion(g2, g1, &next_ni[j])?;
                if let Some(kind) = pair_rule(i_forward, i_backward, g1.len(), g2.len(), params) {
                    prev_matched[i] = true;
                    next_matched[j] = true;
                    let mut measures = BTreeMap::new();
                    measures.insert("i_forward".to_string(), i_forward);
                    measures.insert("i_backward".to_string(), i_backward);
                    events.push(EvolutionEvent::new(
                        kind,
                        t,
                        vec![g1.id],
                        vec![g2.id],
                        measures,
                    ));
                }
            }
        }
        for (i, g1) in prev.iter().enumerate() {
            if !prev_matched[i] {
                events.push(EvolutionEvent::new(
                    EventKind::Dissolving,
                    t,
                    vec![g1.id],
                    Vec::new(),
                    BTreeMap::new(),
                ));
            }
        }
        for (j, g2) in next.iter().enumerate() {
            if !next_matched[j] {
                events.push(EvolutionEvent::new(
                    EventKind::Forming,
                    t,
                    Vec::new(),
                    vec![g2.id],
                    BTreeMap::new(),
                ));
            }
        }
    }
    crate::event::sort_events(&mut events);
    Ok(events)
}
