//! Event labeling over transitions between states of stable groups.
//!
//! Every accepted transition whose endpoints both sit on stable timelines
//! receives exactly one label, and every stable community with no such
//! successor emits one decay event. Fan-out (several successors) yields the
//! split family, fan-in (several predecessors) the merge family; a
//! transition to or from the largest branch falls through to the simple
//! labels. When both families fire on one transition the label is
//! split_merge unless addition applies — addition always wins. The full
//! conflict order is addition > split_merge > deletion > split > merge >
//! simple; only the addition/split_merge part of it is inherent to the
//! event definitions, the rest is a fixed disambiguation.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::cpm::{Community, CommunityId};
use crate::error::{Error, Result};
use crate::event::{EventKind, EvolutionEvent};
use crate::tracking::{stable_state_set, GroupTimeline, TransitionCandidate};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgciParams {
    /// A branch at least this many times smaller than the largest branch is
    /// read as deletion (fan-out) or addition (fan-in).
    pub size_ratio: f64,
    /// Largest absolute size change still labelled constancy.
    pub constancy_delta: u32,
}

impl Default for SgciParams {
    fn default() -> SgciParams {
        SgciParams {
            size_ratio: 10.0,
            constancy_delta: 3,
        }
    }
}

impl SgciParams {
    pub fn validate(&self) -> Result<()> {
        if self.size_ratio <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "size_ratio must be positive (got {})",
                self.size_ratio
            )));
        }
        Ok(())
    }
}

/// Outcome of one side (fan-out or fan-in) of the labeling rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BranchLabel {
    /// The side has a single branch; nothing to decide.
    NotApplicable,
    /// The transition is the largest branch; defer to the simple labels.
    FallThrough,
    Split,
    Deletion,
    Merge,
    Addition,
}

/// Pick the largest community; ties go to the lexicographically smallest
/// sorted member list.
fn largest<'a>(ids: &[CommunityId], store: &'a HashMap<CommunityId, &Community>) -> &'a Community {
    ids.iter()
        .map(|id| store[id])
        .max_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then_with(|| b.members.cmp(&a.members))
        })
        .expect("largest() called with at least one id")
}

/// Label every accepted transition between stable states at one slot pair,
/// plus one decay per stable community with no stable successor.
///
/// `accepted` must contain only accepted transitions (a rejected one is an
/// error); it may span all slot pairs. `slot_count` bounds the horizon:
/// communities in the final slot are censored, not decayed.
pub fn classify_sgci(
    accepted: &[TransitionCandidate],
    communities: &[Community],
    timelines: &[GroupTimeline],
    slot_count: usize,
    params: &SgciParams,
) -> Result<Vec<EvolutionEvent>> {
    params.validate()?;
    if let Some(bad) = accepted.iter().find(|c| !c.accepted) {
        return Err(Error::InvalidParameter(format!(
            "classifier consumes only accepted transitions (got rejected {} -> {})",
            bad.from, bad.to
        )));
    }

    let store: HashMap<CommunityId, &Community> = communities.iter().map(|c| (c.id, c)).collect();
    let stable = stable_state_set(timelines);

    // Transitions between stable states only; successor/predecessor sets
    // are computed within this restriction.
    let restricted: Vec<&TransitionCandidate> = accepted
        .iter()
        .filter(|c| stable.contains(&c.from) && stable.contains(&c.to))
        .collect();
    let mut successors: HashMap<CommunityId, Vec<CommunityId>> = HashMap::new();
    let mut predecessors: HashMap<CommunityId, Vec<CommunityId>> = HashMap::new();
    for candidate in &restricted {
        successors
            .entry(candidate.from)
            .or_default()
            .push(candidate.to);
        predecessors
            .entry(candidate.to)
            .or_default()
            .push(candidate.from);
    }

    let mut events = Vec::new();
    for candidate in &restricted {
        let from = store[&candidate.from];
        let to = store[&candidate.to];
        let succ = &successors[&candidate.from];
        let pred = &predecessors[&candidate.to];

        let fan_out = if succ.len() > 1 {
            let largest_succ = largest(succ, &store);
            if params.size_ratio * to.len() as f64 <= largest_succ.len() as f64 {
                BranchLabel::Deletion
            } else if largest_succ.id == to.id {
                BranchLabel::FallThrough
            } else {
                BranchLabel::Split
            }
        } else {
            BranchLabel::NotApplicable
        };
        let fan_in = if pred.len() > 1 {
            let largest_pred = largest(pred, &store);
            if params.size_ratio * from.len() as f64 <= largest_pred.len() as f64 {
                BranchLabel::Addition
            } else if largest_pred.id == from.id {
                BranchLabel::FallThrough
            } else {
                BranchLabel::Merge
            }
        } else {
            BranchLabel::NotApplicable
        };

        let kind = match (fan_out, fan_in) {
            (_, BranchLabel::Addition) => EventKind::Addition,
            (BranchLabel::Deletion | BranchLabel::Split, BranchLabel::Merge) => {
                EventKind::SplitMerge
            }
            (BranchLabel::Deletion, _) => EventKind::Deletion,
            (BranchLabel::Split, _) => EventKind::Split,
            (_, BranchLabel::Merge) => EventKind::Merge,
            _ => {
                let delta = from.len().abs_diff(to.len());
                if delta <= params.constancy_delta as usize {
                    EventKind::Constancy
                } else {
                    EventKind::ChangeSize
                }
            }
        };

        let mut measures = BTreeMap::new();
        measures.insert("mj".to_string(), candidate.mj);
        measures.insert("jaccard".to_string(), candidate.jaccard);
        events.push(EvolutionEvent::new(
            kind,
            from.slot_index,
            vec![from.id],
            vec![to.id],
            measures,
        ));
    }

    // Decay: stable states before the horizon with no stable successor.
    let with_successor: HashSet<CommunityId> = successors.keys().copied().collect();
    for id in &stable {
        let community = store.get(id).ok_or_else(|| {
            Error::Mismatch(format!("timeline references unknown community {id}"))
        })?;
        if community.slot_index + 1 < slot_count && !with_successor.contains(id) {
            events.push(EvolutionEvent::new(
                EventKind::Decay,
                community.slot_index,
                vec![*id],
                Vec::new(),
                BTreeMap::new(),
            ));
        }
    }

    crate::event::sort_events(&mut events);
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracking::{assemble_timelines, match_continuations, MatchParams};

    fn com(slot: u32, rank: u32, members: &[&str]) -> Community {
        let mut members: Vec<String> = members.iter().map(|m| m.to_string()).collect();
        members.sort();
        Community {
            id: CommunityId { slot, k: 3, rank },
            slot_index: slot as usize,
            k: 3,
            members,
        }
    }

    fn users(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i:03}")).collect()
    }

    fn com_n(slot: u32, rank: u32, members: &[String]) -> Community {
        let mut members = members.to_vec();
        members.sort();
        Community {
            id: CommunityId { slot, k: 3, rank },
            slot_index: slot as usize,
            k: 3,
            members,
        }
    }

    /// Run matching + timelines + classification over per-slot communities.
    fn classify(by_slot: &[Vec<Community>], params: &SgciParams) -> Vec<EvolutionEvent> {
        let flat: Vec<Community> = by_slot.iter().flatten().cloned().collect();
        let mut candidates = Vec::new();
        for window in by_slot.windows(2) {
            candidates.extend(
                match_continuations(&window[0], &window[1], &MatchParams::default()).unwrap(),
            );
        }
        let timelines = assemble_timelines(&candidates, &flat, 3);
        let accepted: Vec<TransitionCandidate> =
            candidates.into_iter().filter(|c| c.accepted).collect();
        classify_sgci(&accepted, &flat, &timelines, by_slot.len(), params).unwrap()
    }

    fn kinds_at(events: &[EvolutionEvent], slot_from: usize) -> Vec<EventKind> {
        events
            .iter()
            .filter(|e| e.slot_from == slot_from)
            .map(|e| e.kind)
            .collect()
    }

    /// Pad a community list with three constant slots so timelines on both
    /// sides of a transition at (2,3) are stable.
    fn pad(prefixes: &[(&str, usize)], tail: &[Vec<Community>]) -> Vec<Vec<Community>> {
        let mut by_slot: Vec<Vec<Community>> = (0..3u32)
            .map(|slot| {
                prefixes
                    .iter()
                    .enumerate()
                    .map(|(rank, (prefix, n))| com_n(slot, rank as u32, &users(prefix, *n)))
                    .collect()
            })
            .collect();
        by_slot.extend_from_slice(tail);
        by_slot
    }

    #[test]
    fn deletion_and_constancy_for_uneven_fanout() {
        // A (50) -> B1 (48 of A), B2 (4 of A): 48/4 = 12 >= 10 gives
        // deletion on the small branch; the largest branch falls through
        // with |50-48| <= 3, so constancy.
        let a = users("a", 50);
        let tail: Vec<Vec<Community>> = (3..6u32)
            .map(|slot| {
                vec![
                    com_n(slot, 0, &a[..48]),
                    com_n(
                        slot,
                        1,
                        &a[48..]
                            .iter()
                            .cloned()
                            .chain(users("x", 2))
                            .collect::<Vec<_>>(),
                    ),
                ]
            })
            .collect();
        let by_slot = pad(&[("a", 50)], &tail);
        let events = classify(&by_slot, &SgciParams::default());
        let at_junction = kinds_at(&events, 2);
        assert!(at_junction.contains(&EventKind::Deletion));
        assert!(at_junction.contains(&EventKind::Constancy));
        assert_eq!(at_junction.len(), 2);
    }

    #[test]
    fn merge_and_change_size_for_fanin() {
        // A1 (40), A2 (35) -> B (70): neither is 10x smaller; the largest
        // predecessor's edge falls through to change_size (|40-70| > 3),
        // the other is merge.
        let a1 = users("a", 40);
        let a2 = users("b", 35);
        let union: Vec<String> = a1[..35].iter().chain(a2.iter()).cloned().collect();
        let tail: Vec<Vec<Community>> =
            (3..6u32).map(|slot| vec![com_n(slot, 0, &union)]).collect();
        let by_slot = pad(&[("a", 40), ("b", 35)], &tail);
        let events = classify(&by_slot, &SgciParams::default());
        let at_junction = kinds_at(&events, 2);
        assert!(at_junction.contains(&EventKind::Merge));
        assert!(at_junction.contains(&EventKind::ChangeSize));
        assert_eq!(at_junction.len(), 2);
    }

    #[test]
    fn stable_group_without_successor_decays() {
        let mut by_slot: Vec<Vec<Community>> = (0..3u32)
            .map(|slot| {
                vec![
                    com(slot, 0, &["a", "b", "c", "d"]),
                    com(slot, 1, &["k", "l", "m"]),
                ]
            })
            .collect();
        // Only the anchor k/l/m survives past slot 2.
        by_slot.extend((3..5u32).map(|slot| vec![com(slot, 0, &["k", "l", "m"])]));
        let events = classify(&by_slot, &SgciParams::default());
        let decays: Vec<&EvolutionEvent> = events
            .iter()
            .filter(|e| e.kind == EventKind::Decay)
            .collect();
        assert_eq!(decays.len(), 1);
        assert_eq!(decays[0].slot_from, 2);
        assert!(decays[0].to_ids.is_empty());
    }

    #[test]
    fn final_slot_groups_are_censored_not_decayed() {
        let by_slot: Vec<Vec<Community>> = (0..3u32)
            .map(|slot| vec![com(slot, 0, &["a", "b", "c"])])
            .collect();
        let events = classify(&by_slot, &SgciParams::default());
        assert!(events.iter().all(|e| e.kind != EventKind::Decay));
    }

    #[test]
    fn simple_transition_constancy_vs_change_size() {
        // 20 -> 22 is constancy (delta 2 <= 3); 20 -> 30 is change_size.
        let base = users("a", 20);
        let grown_small: Vec<String> = base.iter().cloned().chain(users("n", 2)).collect();
        let tail: Vec<Vec<Community>> = (3..6u32)
            .map(|slot| vec![com_n(slot, 0, &grown_small)])
            .collect();
        let by_slot = pad(&[("a", 20)], &tail);
        let events = classify(&by_slot, &SgciParams::default());
        assert_eq!(kinds_at(&events, 2), vec![EventKind::Constancy]);

        let grown_large: Vec<String> = base.iter().cloned().chain(users("n", 10)).collect();
        let tail: Vec<Vec<Community>> = (3..6u32)
            .map(|slot| vec![com_n(slot, 0, &grown_large)])
            .collect();
        let by_slot = pad(&[("a", 20)], &tail);
        let events = classify(&by_slot, &SgciParams::default());
        assert_eq!(kinds_at(&events, 2), vec![EventKind::ChangeSize]);
    }

    #[test]
    fn addition_wins_over_split_merge() {
        // Small A joins a group 10x larger while also splitting toward a
        // second successor: the fan-in side says addition, which beats any
        // split-family label.
        let a = users("a", 8);
        let big = users("g", 80);
        let b: Vec<String> = big.iter().chain(a[..4].iter()).cloned().collect();
        let b_prime: Vec<String> = a[4..].iter().cloned().chain(users("f", 1)).collect();
        let tail: Vec<Vec<Community>> = (3..6u32)
            .map(|slot| vec![com_n(slot, 0, &b), com_n(slot, 1, &b_prime)])
            .collect();
        let by_slot = pad(&[("a", 8), ("g", 80)], &tail);
        let events = classify(&by_slot, &SgciParams::default());
        let at_junction = kinds_at(&events, 2);
        assert!(at_junction.contains(&EventKind::Addition));
        assert!(!at_junction.contains(&EventKind::SplitMerge));
    }

    #[test]
    fn every_transition_gets_exactly_one_label() {
        let a = users("a", 14);
        let c1 = a[..10].to_vec();
        let c2 = a[10..].to_vec();
        let tail: Vec<Vec<Community>> = (3..6u32)
            .map(|slot| vec![com_n(slot, 0, &c1), com_n(slot, 1, &c2)])
            .collect();
        let by_slot = pad(&[("a", 14)], &tail);
        let flat: Vec<Community> = by_slot.iter().flatten().cloned().collect();
        let mut candidates = Vec::new();
        for window in by_slot.windows(2) {
            candidates.extend(
                match_continuations(&window[0], &window[1], &MatchParams::default()).unwrap(),
            );
        }
        let timelines = assemble_timelines(&candidates, &flat, 3);
        let accepted: Vec<TransitionCandidate> =
            candidates.into_iter().filter(|c| c.accepted).collect();
        let events = classify_sgci(
            &accepted,
            &flat,
            &timelines,
            by_slot.len(),
            &SgciParams::default(),
        )
        .unwrap();
        let stable = stable_state_set(&timelines);
        let restricted: Vec<&TransitionCandidate> = accepted
            .iter()
            .filter(|c| stable.contains(&c.from) && stable.contains(&c.to))
            .collect();
        let transition_events = events.iter().filter(|e| e.kind != EventKind::Decay).count();
        assert_eq!(transition_events, restricted.len());
        for candidate in restricted {
            let labels = events
                .iter()
                .filter(|e| e.from_ids == vec![candidate.from] && e.to_ids == vec![candidate.to])
                .count();
            assert_eq!(labels, 1, "{} -> {}", candidate.from, candidate.to);
        }
    }

    #[test]
    fn rejected_transition_is_an_error() {
        let rejected = TransitionCandidate {
            from: CommunityId {
                slot: 0,
                k: 3,
                rank: 0,
            },
            to: CommunityId {
                slot: 1,
                k: 3,
                rank: 0,
            },
            mj: 0.1,
            jaccard: 0.05,
            accepted: false,
        };
        let err = classify_sgci(&[rejected], &[], &[], 2, &SgciParams::default());
        assert!(err.is_err());
    }

    #[test]
    fn unbounded_size_ratio_suppresses_deletion_and_addition() {
        let a = users("a", 50);
        let tail: Vec<Vec<Community>> = (3..6u32)
            .map(|slot| {
                vec![
                    com_n(slot, 0, &a[..48]),
                    com_n(
                        slot,
                        1,
                        &a[48..]
                            .iter()
                            .cloned()
                            .chain(users("x", 2))
                            .collect::<Vec<_>>(),
                    ),
                ]
            })
            .collect();
        let by_slot = pad(&[("a", 50)], &tail);
        let huge_ratio = SgciParams {
            size_ratio: 1e12,
            ..SgciParams::default()
        };
        let events = classify(&by_slot, &huge_ratio);
        assert!(events
            .iter()
            .all(|e| e.kind != EventKind::Deletion && e.kind != EventKind::Addition));
        // The formerly-deleted branch is now an ordinary split.
        assert!(kinds_at(&events, 2).contains(&EventKind::Split));
    }

    #[test]
    fn zero_constancy_delta_requires_equal_sizes() {
        let base = users("a", 20);
        let grown: Vec<String> = base.iter().cloned().chain(users("n", 1)).collect();
        let tail: Vec<Vec<Community>> =
            (3..6u32).map(|slot| vec![com_n(slot, 0, &grown)]).collect();
        let by_slot = pad(&[("a", 20)], &tail);
        let strict = SgciParams {
            constancy_delta: 0,
            ..SgciParams::default()
        };
        let events = classify(&by_slot, &strict);
        assert_eq!(kinds_at(&events, 2), vec![EventKind::ChangeSize]);
    }
}
