//! Descriptive statistics over extracted groups and the cross-method event
//! comparison.
//!
//! Histograms cover group sizes (averaged per slot), transition overlap
//! fractions, and within-slot overlap between co-existing groups.
//! `compare_methods` aligns the two event streams under the type
//! correspondence merge+addition/merging, split+deletion/splitting,
//! decay/dissolving, change_size/growing+shrinking, constancy/continuing;
//! split_merge has no counterpart and is excluded from the correspondence
//! but still counted in totals. Events found by only one method are
//! reported with a diagnosis: an inclusion pair for those the inclusion
//! thresholds filtered out, and a reason (forming, or rejected at the
//! stability stage) for those the stable-group restriction dropped.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cpm::{Community, CommunityId};
use crate::error::{Error, Result};
use crate::event::{EventKind, EvolutionEvent, Method, GED_KINDS, SGCI_KINDS};
use crate::ged::{inclusion, GedParams, ImportanceKind, ImportanceMetric};
use crate::ingest::SnapshotGraph;
use crate::tracking::{intersection_size, stable_state_set, GroupTimeline, TransitionCandidate};

/// A binned distribution. Bin `i` covers `[bin_edges[i], bin_edges[i+1])`;
/// the final bin is right-inclusive. Counts are reals so per-slot averages
/// (which are generally fractional) use the same shape as raw counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<f64>,
}

impl HistogramSpec {
    fn with_edges(bin_edges: Vec<f64>) -> HistogramSpec {
        let bins = bin_edges.len().saturating_sub(1);
        HistogramSpec {
            bin_edges,
            counts: vec![0.0; bins],
        }
    }

    fn add(&mut self, value: f64) {
        let last = self.counts.len() - 1;
        for i in 0..self.counts.len() {
            let hi = self.bin_edges[i + 1];
            if value < hi || (i == last && value <= hi) {
                self.counts[i] += 1.0;
                return;
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

fn percentage_edges() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) * 10.0).collect()
}

/// Size bins: exact sizes 3..=20, then open-ended 21+.
fn size_edges() -> Vec<f64> {
    let mut edges: Vec<f64> = (3..=21).map(f64::from).collect();
    edges.push(f64::INFINITY);
    edges
}

/// Average per-slot count of groups at each size.
pub fn group_size_distribution(communities: &[Community], slot_count: usize) -> HistogramSpec {
    let mut histogram = HistogramSpec::with_edges(size_edges());
    for community in communities {
        histogram.add(community.len() as f64);
    }
    if slot_count > 0 {
        for count in &mut histogram.counts {
            *count /= slot_count as f64;
        }
    }
    histogram
}

/// Histogram over `|A ∩ B| / |A|` (as a percentage) for evaluated
/// transitions; `accepted_only` restricts it to accepted ones.
pub fn transition_overlap_distribution(
    candidates: &[TransitionCandidate],
    communities: &[Community],
    accepted_only: bool,
) -> HistogramSpec {
    let store: HashMap<CommunityId, &Community> = communities.iter().map(|c| (c.id, c)).collect();
    let mut histogram = HistogramSpec::with_edges(percentage_edges());
    for candidate in candidates {
        if accepted_only && !candidate.accepted {
            continue;
        }
        let from = store[&candidate.from];
        let to = store[&candidate.to];
        let common = intersection_size(&from.members, &to.members);
        histogram.add(100.0 * common as f64 / from.len() as f64);
    }
    histogram
}

/// Histogram over `|A ∩ B| / |A|` for every ordered pair of distinct
/// communities within the same slot.
pub fn within_slot_overlap(communities: &[Community], slot_count: usize) -> HistogramSpec {
    let mut by_slot: Vec<Vec<&Community>> = vec![Vec::new(); slot_count];
    for community in communities {
        if community.slot_index < slot_count {
            by_slot[community.slot_index].push(community);
        }
    }
    let mut histogram = HistogramSpec::with_edges(percentage_edges());
    for slot in &by_slot {
        for a in slot {
            for b in slot {
                if a.id == b.id {
                    continue;
                }
                let common = intersection_size(&a.members, &b.members);
                histogram.add(100.0 * common as f64 / a.len() as f64);
            }
        }
    }
    histogram
}

/// Mean and standard deviation of per-slot counts over the first and
/// second half of the slot range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSplitStats {
    pub first_mean: f64,
    pub first_std: f64,
    pub second_mean: f64,
    pub second_std: f64,
}

fn mean_std(values: &[usize]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<usize>() as f64 / n;
    let variance = values
        .iter()
        .map(|&v| (v as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    (mean, variance.sqrt())
}

/// Per-slot counts of users belonging to exactly 1, 2, and 3 stable
/// groups, with half-split summary statistics per multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipCounts {
    /// `per_slot[slot][m-1]` = users in exactly m stable groups.
    pub per_slot: Vec<[usize; 3]>,
    /// Summaries for m = 1, 2, 3 over slots `[0, N/2)` and `[N/2, N)`.
    pub summary: [HalfSplitStats; 3],
}

pub fn membership_counts(
    communities: &[Community],
    timelines: &[GroupTimeline],
    slot_count: usize,
) -> MembershipCounts {
    let stable = stable_state_set(timelines);
    let mut per_slot = vec![[0usize; 3]; slot_count];
    let mut memberships: Vec<HashMap<&str, usize>> = vec![HashMap::new(); slot_count];
    for community in communities {
        if !stable.contains(&community.id) || community.slot_index >= slot_count {
            continue;
        }
        for member in &community.members {
            *memberships[community.slot_index]
                .entry(member.as_str())
                .or_insert(0) += 1;
        }
    }
    for (slot, users) in memberships.iter().enumerate() {
        for &count in users.values() {
            if (1..=3).contains(&count) {
                per_slot[slot][count - 1] += 1;
            }
        }
    }
    let half = slot_count / 2;
    let summary = std::array::from_fn(|m| {
        let first: Vec<usize> = per_slot[..half].iter().map(|slot| slot[m]).collect();
        let second: Vec<usize> = per_slot[half..].iter().map(|slot| slot[m]).collect();
        let (first_mean, first_std) = mean_std(&first);
        let (second_mean, second_std) = mean_std(&second);
        HalfSplitStats {
            first_mean,
            first_std,
            second_mean,
            second_std,
        }
    });
    MembershipCounts { per_slot, summary }
}

/// Exact per-type event counts for one method, including zero rows.
pub fn event_counts(events: &[EvolutionEvent], method: Method) -> BTreeMap<EventKind, usize> {
    let kinds: &[EventKind] = match method {
        Method::Sgci => &SGCI_KINDS,
        Method::Ged => &GED_KINDS,
    };
    let mut counts: BTreeMap<EventKind, usize> = kinds.iter().map(|&k| (k, 0)).collect();
    for event in events.iter().filter(|e| e.method == method) {
        *counts.entry(event.kind).or_insert(0) += 1;
    }
    counts
}

/// Counterpart types under the correspondence map; split_merge and forming
/// map to nothing.
pub fn corresponding_kinds(kind: EventKind) -> &'static [EventKind] {
    match kind {
        EventKind::Merge | EventKind::Addition => &[EventKind::Merging],
        EventKind::Split | EventKind::Deletion => &[EventKind::Splitting],
        EventKind::Decay => &[EventKind::Dissolving],
        EventKind::ChangeSize => &[EventKind::Growing, EventKind::Shrinking],
        EventKind::Constancy => &[EventKind::Continuing],
        EventKind::SplitMerge => &[],
        EventKind::Merging => &[EventKind::Merge, EventKind::Addition],
        EventKind::Splitting => &[EventKind::Split, EventKind::Deletion],
        EventKind::Dissolving => &[EventKind::Decay],
        EventKind::Growing | EventKind::Shrinking => &[EventKind::ChangeSize],
        EventKind::Continuing => &[EventKind::Constancy],
        EventKind::Forming => &[],
    }
}

/// Why one method reported an event the other did not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissReason {
    /// Births have no counterpart in the stable-group taxonomy.
    Forming,
    /// The groups involved were filtered out at the stability stage.
    RejectedUnstable,
    /// Neither explanation applies (for example a label conflict on an
    /// otherwise shared transition).
    Unattributed,
}

impl std::fmt::Display for MissReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MissReason::Forming => write!(f, "forming"),
            MissReason::RejectedUnstable => write!(f, "rejected_unstable"),
            MissReason::Unattributed => write!(f, "unattributed"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub label: String,
    pub sgci_count: usize,
    pub ged_count: usize,
}

/// A stable-group event with no counterpart, carrying the inclusion pair
/// that explains the omission. For transition events these are the pair's
/// own inclusions; for decay they are the largest inclusions the dying
/// group reached against any next-slot group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgciMiss {
    pub event: EvolutionEvent,
    pub i_forward: f64,
    pub i_backward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GedMiss {
    pub event: EvolutionEvent,
    pub reason: MissReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub k: usize,
    pub sgci_counts: BTreeMap<String, usize>,
    pub ged_counts: BTreeMap<String, usize>,
    pub aggregates: Vec<AggregateRow>,
    pub sgci_total: usize,
    pub ged_total: usize,
    pub matched: usize,
    pub only_in_sgci: Vec<SgciMiss>,
    pub only_in_ged: Vec<GedMiss>,
    /// `sgci_total + ged_total - matched`; the three buckets above
    /// partition it.
    pub distinct_union: usize,
}

impl ComparisonReport {
    pub fn miss_reason_counts(&self) -> BTreeMap<MissReason, usize> {
        let mut counts = BTreeMap::new();
        counts.insert(MissReason::Forming, 0);
        counts.insert(MissReason::RejectedUnstable, 0);
        counts.insert(MissReason::Unattributed, 0);
        for miss in &self.only_in_ged {
            *counts.get_mut(&miss.reason).unwrap() += 1;
        }
        counts
    }
}

impl PartialOrd for MissReason {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MissReason {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let rank = |r: &MissReason| match r {
            MissReason::Forming => 0,
            MissReason::RejectedUnstable => 1,
            MissReason::Unattributed => 2,
        };
        rank(self).cmp(&rank(other))
    }
}

/// Everything the comparison needs besides the two event lists: the
/// communities both were computed from, the timelines that define
/// stability, and the snapshots/parameters to recompute inclusions for
/// events the inclusion-based method omitted.
pub struct CompareContext<'a> {
    pub communities: &'a [Community],
    pub timelines: &'a [GroupTimeline],
    pub graphs: &'a [SnapshotGraph],
    pub ged_params: GedParams,
    pub k: usize,
}

/// Align the two event streams computed from the same communities.
///
/// Events match when they reference the same slot pair and id sets and
/// their types correspond. Every event lands in exactly one of matched /
/// only_in_sgci / only_in_ged, so `distinct_union = |SGCI| + |GED| -
/// matched` holds by construction and is re-checked here.
pub fn compare_methods(
    sgci_events: &[EvolutionEvent],
    ged_events: &[EvolutionEvent],
    ctx: &CompareContext<'_>,
) -> Result<ComparisonReport> {
    for event in sgci_events {
        if event.method != Method::Sgci {
            return Err(Error::Mismatch(format!(
                "event `{}` is not a stable-group event",
                event.kind
            )));
        }
    }
    for event in ged_events {
        if event.method != Method::Ged {
            return Err(Error::Mismatch(format!(
                "event `{}` is not an inclusion-method event",
                event.kind
            )));
        }
    }
    let expected_k = ctx.k as u32;
    for event in sgci_events.iter().chain(ged_events.iter()) {
        if let Some(bad) = event
            .from_ids
            .iter()
            .chain(event.to_ids.iter())
            .find(|id| id.k != expected_k)
        {
            return Err(Error::Mismatch(format!(
                "event references {bad} but the comparison is for k = {expected_k}"
            )));
        }
        if event.slot_to != event.slot_from + 1 {
            return Err(Error::Mismatch(format!(
                "event at slots {}..{} is not a consecutive-slot event",
                event.slot_from, event.slot_to
            )));
        }
    }

    let store: HashMap<CommunityId, &Community> =
        ctx.communities.iter().map(|c| (c.id, c)).collect();
    let stable = stable_state_set(ctx.timelines);

    type Key = (usize, Vec<CommunityId>, Vec<CommunityId>);
    let mut ged_by_key: HashMap<Key, (usize, &EvolutionEvent)> = HashMap::new();
    for (index, event) in ged_events.iter().enumerate() {
        ged_by_key.insert(event.match_key(), (index, event));
    }

    let mut matched = 0usize;
    let mut ged_matched = vec![false; ged_events.len()];
    let mut only_in_sgci = Vec::new();

    // Inclusion pair for an arbitrary (from, to) community pair, used to
    // explain omissions.
    let inclusions_for = |g1: &Community, g2: &Community| -> Result<(f64, f64)> {
        let metric_for = |c: &Community| -> Result<ImportanceMetric> {
            if ctx.ged_params.metric == ImportanceKind::Uniform {
                Ok(ImportanceMetric {
                    kind: ImportanceKind::Uniform,
                    values: vec![1.0; c.members.len()],
                })
            } else {
                let graph = ctx.graphs.get(c.slot_index).ok_or_else(|| {
                    Error::Mismatch(format!("no snapshot for slot {}", c.slot_index))
                })?;
                crate::ged::node_importance(graph, c, ctx.ged_params.metric)
            }
        };
        let forward = inclusion(g1, g2, &metric_for(g1)?)?;
        let backward = inclusion(g2, g1, &metric_for(g2)?)?;
        Ok((forward, backward))
    };

    for event in sgci_events {
        let counterpart = ged_by_key.get(&event.match_key()).copied();
        let compatible = counterpart
            .map(|(_, ged)| corresponding_kinds(event.kind).contains(&ged.kind))
            .unwrap_or(false);
        if compatible {
            let (index, _) = counterpart.unwrap();
            ged_matched[index] = true;
            matched += 1;
            continue;
        }
        let (i_forward, i_backward) = if event.kind == EventKind::Decay {
            // Largest inclusions the dying group reached against any
            // next-slot group.
            let from = store.get(&event.from_ids[0]).ok_or_else(|| {
                Error::Mismatch(format!(
                    "event references unknown community {}",
                    event.from_ids[0]
                ))
            })?;
            let mut best = (0.0f64, 0.0f64);
            for candidate in ctx.communities {
                if candidate.slot_index != event.slot_to || candidate.k != ctx.k {
                    continue;
                }
                let (fwd, bwd) = inclusions_for(from, candidate)?;
                if fwd.max(bwd) > best.0.max(best.1) {
                    best = (fwd, bwd);
                }
            }
            best
        } else {
            let from = store.get(&event.from_ids[0]).ok_or_else(|| {
                Error::Mismatch(format!(
                    "event references unknown community {}",
                    event.from_ids[0]
                ))
            })?;
            let to = store.get(&event.to_ids[0]).ok_or_else(|| {
                Error::Mismatch(format!(
                    "event references unknown community {}",
                    event.to_ids[0]
                ))
            })?;
            inclusions_for(from, to)?
        };
        only_in_sgci.push(SgciMiss {
            event: event.clone(),
            i_forward,
            i_backward,
        });
    }

    let mut only_in_ged = Vec::new();
    for (event, was_matched) in ged_events.iter().zip(&ged_matched) {
        if *was_matched {
            continue;
        }
        let reason = if event.kind == EventKind::Forming {
            MissReason::Forming
        } else if event
            .from_ids
            .iter()
            .chain(event.to_ids.iter())
            .any(|id| !stable.contains(id))
        {
            MissReason::RejectedUnstable
        } else {
            MissReason::Unattributed
        };
        only_in_ged.push(GedMiss {
            event: event.clone(),
            reason,
        });
    }

    let sgci_counts: BTreeMap<String, usize> = event_counts(sgci_events, Method::Sgci)
        .into_iter()
        .map(|(kind, count)| (kind.as_str().to_string(), count))
        .collect();
    let ged_counts: BTreeMap<String, usize> = event_counts(ged_events, Method::Ged)
        .into_iter()
        .map(|(kind, count)| (kind.as_str().to_string(), count))
        .collect();
    let count = |counts: &BTreeMap<String, usize>, kind: EventKind| counts[kind.as_str()];
    let aggregates = vec![
        AggregateRow {
            label: "merge+addition/merging".to_string(),
            sgci_count: count(&sgci_counts, EventKind::Merge)
                + count(&sgci_counts, EventKind::Addition),
            ged_count: count(&ged_counts, EventKind::Merging),
        },
        AggregateRow {
            label: "split+deletion/splitting".to_string(),
            sgci_count: count(&sgci_counts, EventKind::Split)
                + count(&sgci_counts, EventKind::Deletion),
            ged_count: count(&ged_counts, EventKind::Splitting),
        },
        AggregateRow {
            label: "decay/dissolving".to_string(),
            sgci_count: count(&sgci_counts, EventKind::Decay),
            ged_count: count(&ged_counts, EventKind::Dissolving),
        },
        AggregateRow {
            label: "change_size/growing+shrinking".to_string(),
            sgci_count: count(&sgci_counts, EventKind::ChangeSize),
            ged_count: count(&ged_counts, EventKind::Growing)
                + count(&ged_counts, EventKind::Shrinking),
        },
        AggregateRow {
            label: "constancy/continuing".to_string(),
            sgci_count: count(&sgci_counts, EventKind::Constancy),
            ged_count: count(&ged_counts, EventKind::Continuing),
        },
    ];

    let sgci_total = sgci_events.len();
    let ged_total = ged_events.len();
    let distinct_union = sgci_total + ged_total - matched;
    debug_assert_eq!(
        distinct_union,
        matched + only_in_sgci.len() + only_in_ged.len()
    );
    Ok(ComparisonReport {
        k: ctx.k,
        sgci_counts,
        ged_counts,
        aggregates,
        sgci_total,
        ged_total,
        matched,
        only_in_sgci,
        only_in_ged,
        distinct_union,
    })
}

/// Ids of stable-timeline states, exposed for report assembly.
pub fn stable_ids(timelines: &[GroupTimeline]) -> HashSet<CommunityId> {
    stable_state_set(timelines)
}
