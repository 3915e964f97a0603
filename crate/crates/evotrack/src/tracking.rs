//! Cross-slot group continuation and stable-timeline assembly.
//!
//! Communities of consecutive slots are compared pairwise with the modified
//! Jaccard measure (intersection over the smaller of the two own-size
//! ratios' denominators, i.e. the larger ratio). A continuation is accepted
//! when that measure clears its threshold; an additional plain-Jaccard
//! guard weeds out continuations between groups of hugely different sizes.
//! Accepted links are threaded into timelines, and timelines shorter than
//! the stability minimum are marked unstable and excluded from stable-group
//! analysis.

use serde::{Deserialize, Serialize};

use crate::cpm::{Community, CommunityId};
use crate::error::{Error, Result};

/// Count of common elements of two sorted slices.
pub fn intersection_size<T: Ord>(a: &[T], b: &[T]) -> usize {
    let mut count = 0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Modified Jaccard: `max(|a∩b|/|a|, |a∩b|/|b|)`, or 0 when either set is
/// empty. Inputs must be sorted.
pub fn modified_jaccard<T: Ord>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let common = intersection_size(a, b) as f64;
    (common / a.len() as f64).max(common / b.len() as f64)
}

/// Plain Jaccard: `|a∩b|/|a∪b|`, or 0 when both sets are empty. Inputs must
/// be sorted.
pub fn jaccard<T: Ord>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let common = intersection_size(a, b);
    let union = a.len() + b.len() - common;
    common as f64 / union as f64
}

/// Which continuation conditions apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionMode {
    /// Modified Jaccard threshold alone.
    MjOnly,
    /// Modified Jaccard threshold plus the low plain-Jaccard guard.
    MjAndJaccard,
}

impl std::fmt::Display for ConditionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConditionMode::MjOnly => write!(f, "mj_only"),
            ConditionMode::MjAndJaccard => write!(f, "mj_and_jaccard"),
        }
    }
}

impl std::str::FromStr for ConditionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<ConditionMode> {
        match s {
            "mj_only" => Ok(ConditionMode::MjOnly),
            "mj_and_jaccard" => Ok(ConditionMode::MjAndJaccard),
            other => Err(Error::InvalidParameter(format!(
                "unknown condition mode `{other}` (expected mj_only|mj_and_jaccard)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchParams {
    pub mj_threshold: f64,
    pub jaccard_min: f64,
    pub condition: ConditionMode,
}

impl Default for MatchParams {
    fn default() -> MatchParams {
        MatchParams {
            mj_threshold: 0.5,
            jaccard_min: 0.01,
            condition: ConditionMode::MjAndJaccard,
        }
    }
}

impl MatchParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mj_threshold) {
            return Err(Error::InvalidParameter(format!(
                "mj_threshold must be in [0,1] (got {})",
                self.mj_threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.jaccard_min) {
            return Err(Error::InvalidParameter(format!(
                "jaccard_min must be in [0,1] (got {})",
                self.jaccard_min
            )));
        }
        Ok(())
    }
}

/// One evaluated (prev, next) community pair. All evaluated pairs are
/// retained, accepted or not, for downstream diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCandidate {
    pub from: CommunityId,
    pub to: CommunityId,
    pub mj: f64,
    pub jaccard: f64,
    pub accepted: bool,
}

/// Evaluate every (prev, next) pair of one consecutive slot pair.
///
/// A pair is accepted when its modified Jaccard clears `mj_threshold` and,
/// under `MjAndJaccard`, its plain Jaccard clears `jaccard_min`. A
/// community may take part in several accepted transitions.
pub fn match_continuations(
    prev: &[Community],
    next: &[Community],
    params: &MatchParams,
) -> Result<Vec<TransitionCandidate>> {
    params.validate()?;
    if let (Some(first_prev), Some(first_next)) = (prev.first(), next.first()) {
        let slot = first_prev.slot_index;
        let k = first_prev.k;
        if first_next.slot_index != slot + 1 {
            return Err(Error::Mismatch(format!(
                "next communities must come from slot {} (got {})",
                slot + 1,
                first_next.slot_index
            )));
        }
        for community in prev.iter().chain(next.iter()) {
            if community.k != k {
                return Err(Error::Mismatch(format!(
                    "community {} has k {}, expected {k}",
                    community.id, community.k
                )));
            }
        }
        if prev.iter().any(|c| c.slot_index != slot)
            || next.iter().any(|c| c.slot_index != slot + 1)
        {
            return Err(Error::Mismatch("communities from mixed slots".to_string()));
        }
    }
    let mut candidates = Vec::with_capacity(prev.len() * next.len());
    for from in prev {
        for to in next {
            let mj = modified_jaccard(&from.members, &to.members);
            let jac = jaccard(&from.members, &to.members);
            let accepted = mj >= params.mj_threshold
                && (params.condition == ConditionMode::MjOnly || jac >= params.jaccard_min);
            candidates.push(TransitionCandidate {
                from: from.id,
                to: to.id,
                mj,
                jaccard: jac,
                accepted,
            });
        }
    }
    Ok(candidates)
}

/// A chain of per-slot community states over strictly consecutive slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTimeline {
    pub id: u32,
    pub states: Vec<CommunityId>,
    pub stable: bool,
}

impl GroupTimeline {
    pub fn first_slot(&self) -> u32 {
        self.states.first().map_or(0, |id| id.slot)
    }

    pub fn last_slot(&self) -> u32 {
        self.states.last().map_or(0, |id| id.slot)
    }
}

fn community<'a>(
    communities: &'a [Community],
    index: &std::collections::HashMap<CommunityId, usize>,
    id: CommunityId,
) -> &'a Community {
    &communities[index[&id]]
}

/// Thread accepted transitions into timelines.
///
/// When a community has several accepted successors (or predecessors) the
/// chain follows the highest-mj link, ties broken by larger intersection,
/// then by the lexicographically smallest sorted member list. A community
/// continues an earlier timeline only when the best-successor and
/// best-predecessor choices agree, so timelines never merge; the remaining
/// accepted links stay available to event classification as branch
/// transitions.
pub fn assemble_timelines(
    candidates: &[TransitionCandidate],
    communities: &[Community],
    stability_min_slots: usize,
) -> Vec<GroupTimeline> {
    use std::collections::HashMap;

    let index: HashMap<CommunityId, usize> = communities
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id, i))
        .collect();

    // (mj, intersection) ranking with the member-list tie break; `better`
    // returns true when `challenger` should replace `best`.
    let better = |challenger: &TransitionCandidate,
                  best: &TransitionCandidate,
                  endpoint: fn(&TransitionCandidate) -> CommunityId| {
        if challenger.mj != best.mj {
            return challenger.mj > best.mj;
        }
        let ch_from = community(communities, &index, challenger.from);
        let ch_to = community(communities, &index, challenger.to);
        let be_from = community(communities, &index, best.from);
        let be_to = community(communities, &index, best.to);
        let ch_common = intersection_size(&ch_from.members, &ch_to.members);
        let be_common = intersection_size(&be_from.members, &be_to.members);
        if ch_common != be_common {
            return ch_common > be_common;
        }
        let ch_members = &community(communities, &index, endpoint(challenger)).members;
        let be_members = &community(communities, &index, endpoint(best)).members;
        ch_members < be_members
    };

    let mut best_succ: HashMap<CommunityId, &TransitionCandidate> = HashMap::new();
    let mut best_pred: HashMap<CommunityId, &TransitionCandidate> = HashMap::new();
    for candidate in candidates.iter().filter(|c| c.accepted) {
        match best_succ.entry(candidate.from) {
            std::collections::hash_map::Entry::Occupied(mut entry) => {
                if better(candidate, entry.get(), |c| c.to) {
                    entry.insert(candidate);
                }
            }
            std::collections::hash_map::Entry::Vacant(entry) => {
                entry.insert(candidate);
            }
        }
        match best_pred.entry(candidate.to) {
            std::collections::hash_map::Entry::Occupied(mut entry) => {
                if better(candidate, entry.get(), |c| c.from) {
                    entry.insert(candidate);
                }
            }
            std::collections::hash_map::Entry::Vacant(entry) => {
                entry.insert(candidate);
            }
        }
    }

    // Chain link a -> b iff each is the other's best choice.
    let mut chain_next: HashMap<CommunityId, CommunityId> = HashMap::new();
    let mut chained_to: std::collections::HashSet<CommunityId> = std::collections::HashSet::new();
    for (from, candidate) in &best_succ {
        if best_pred.get(&candidate.to).map(|c| c.from) == Some(*from) {
            chain_next.insert(*from, candidate.to);
            chained_to.insert(candidate.to);
        }
    }

    let mut sorted_ids: Vec<CommunityId> = communities.iter().map(|c| c.id).collect();
    sorted_ids.sort();
    let mut timelines = Vec::new();
    for start in sorted_ids {
        if chained_to.contains(&start) {
            continue;
        }
        let mut states = vec![start];
        let mut cursor = start;
        while let Some(next) = chain_next.get(&cursor) {
            states.push(*next);
            cursor = *next;
        }
        let stable = states.len() >= stability_min_slots;
        timelines.push(GroupTimeline {
            id: timelines.len() as u32,
            states,
            stable,
        });
    }
    timelines
}

/// Ids of communities that sit on a stable timeline.
pub fn stable_state_set(timelines: &[GroupTimeline]) -> std::collections::HashSet<CommunityId> {
    timelines
        .iter()
        .filter(|t| t.stable)
        .flat_map(|t| t.states.iter().copied())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn com(slot: u32, k: u32, rank: u32, members: &[&str]) -> Community {
        let mut members: Vec<String> = members.iter().map(|m| m.to_string()).collect();
        members.sort();
        Community {
            id: CommunityId { slot, k, rank },
            slot_index: slot as usize,
            k: k as usize,
            members,
        }
    }

    #[test]
    fn modified_jaccard_takes_the_larger_ratio() {
        let a = [1, 2, 3];
        let b = [2, 3];
        assert_eq!(modified_jaccard(&a, &b), 1.0);
    }

    #[test]
    fn modified_jaccard_of_identical_sets_is_one() {
        let a = ["x", "y", "z"];
        assert_eq!(modified_jaccard(&a, &a), 1.0);
    }

    #[test]
    fn modified_jaccard_with_empty_side_is_zero() {
        let a = [1, 2];
        let empty: [i32; 0] = [];
        assert_eq!(modified_jaccard(&a, &empty), 0.0);
        assert_eq!(modified_jaccard(&empty, &a), 0.0);
        assert_eq!(modified_jaccard(&empty, &empty), 0.0);
    }

    #[test]
    fn jaccard_textbook_cases() {
        assert!((jaccard(&[1, 2, 3], &[2, 3]) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(jaccard(&[1, 2], &[3, 4]), 0.0);
        assert_eq!(jaccard(&[1, 2], &[1, 2]), 1.0);
        let empty: [i32; 0] = [];
        assert_eq!(jaccard(&empty, &empty), 0.0);
    }

    #[test]
    fn accepts_subset_continuation() {
        let prev = vec![com(
            0,
            3,
            0,
            &["u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8", "u9", "ua"],
        )];
        let next = vec![com(1, 3, 0, &["u1", "u2", "u3", "u4", "u5"])];
        let candidates = match_continuations(&prev, &next, &MatchParams::default()).unwrap();
        assert_eq!(candidates.len(), 1);
        assert!(candidates[0].accepted);
        assert_eq!(candidates[0].mj, 1.0);
        assert_eq!(candidates[0].jaccard, 0.5);
    }

    #[test]
    fn jaccard_guard_rejects_huge_size_gap() {
        // 1000-member group against a 4-member group sharing 2 members:
        // mj = 2/4 = 0.5 passes, jaccard = 2/1002 fails the 0.01 guard.
        let big: Vec<String> = (0..1000).map(|i| format!("u{i:04}")).collect();
        let prev = vec![Community {
            id: CommunityId {
                slot: 0,
                k: 3,
                rank: 0,
            },
            slot_index: 0,
            k: 3,
            members: big,
        }];
        let next = vec![com(1, 3, 0, &["u0000", "u0001", "x", "y"])];

        let mj_only = MatchParams {
            condition: ConditionMode::MjOnly,
            ..MatchParams::default()
        };
        let with_guard = MatchParams::default();
        let accepted_mj_only = match_continuations(&prev, &next, &mj_only).unwrap();
        let accepted_guarded = match_continuations(&prev, &next, &with_guard).unwrap();
        assert!(accepted_mj_only[0].accepted);
        assert!(!accepted_guarded[0].accepted);
        assert!(accepted_guarded[0].jaccard < 0.01);
    }

    #[test]
    fn disjoint_pair_is_rejected() {
        let prev = vec![com(0, 3, 0, &["a", "b", "c"])];
        let next = vec![com(1, 3, 0, &["x", "y", "z"])];
        let candidates = match_continuations(&prev, &next, &MatchParams::default()).unwrap();
        assert!(!candidates[0].accepted);
        assert_eq!(candidates[0].mj, 0.0);
    }

    #[test]
    fn slot_and_k_mismatches_error() {
        let prev = vec![com(0, 3, 0, &["a", "b", "c"])];
        let wrong_slot = vec![com(2, 3, 0, &["a", "b", "c"])];
        assert!(match_continuations(&prev, &wrong_slot, &MatchParams::default()).is_err());
        let wrong_k = vec![com(1, 4, 0, &["a", "b", "c", "d"])];
        assert!(match_continuations(&prev, &wrong_k, &MatchParams::default()).is_err());
    }

    fn all_candidates(by_slot: &[Vec<Community>]) -> Vec<TransitionCandidate> {
        let mut out = Vec::new();
        for window in by_slot.windows(2) {
            out.extend(
                match_continuations(&window[0], &window[1], &MatchParams::default()).unwrap(),
            );
        }
        out
    }

    #[test]
    fn constant_community_forms_one_stable_timeline() {
        let by_slot: Vec<Vec<Community>> = (0..3)
            .map(|slot| vec![com(slot, 3, 0, &["a", "b", "c", "d"])])
            .collect();
        let flat: Vec<Community> = by_slot.iter().flatten().cloned().collect();
        let timelines = assemble_timelines(&all_candidates(&by_slot), &flat, 3);
        assert_eq!(timelines.len(), 1);
        assert_eq!(timelines[0].states.len(), 3);
        assert!(timelines[0].stable);
    }

    #[test]
    fn two_slot_timeline_is_unstable() {
        let by_slot: Vec<Vec<Community>> = (0..2)
            .map(|slot| vec![com(slot, 3, 0, &["a", "b", "c"])])
            .collect();
        let flat: Vec<Community> = by_slot.iter().flatten().cloned().collect();
        let timelines = assemble_timelines(&all_candidates(&by_slot), &flat, 3);
        assert_eq!(timelines.len(), 1);
        assert!(!timelines[0].stable);
    }

    #[test]
    fn broken_chain_ends_the_timeline() {
        let mut by_slot: Vec<Vec<Community>> = (0..4)
            .map(|slot| vec![com(slot, 3, 0, &["a", "b", "c"])])
            .collect();
        by_slot.push(vec![com(4, 3, 0, &["x", "y", "z"])]);
        let flat: Vec<Community> = by_slot.iter().flatten().cloned().collect();
        let timelines = assemble_timelines(&all_candidates(&by_slot), &flat, 3);
        assert_eq!(timelines.len(), 2);
        assert_eq!(timelines[0].states.len(), 4);
        assert_eq!(timelines[0].last_slot(), 3);
        assert!(!timelines[1].stable);
    }

    #[test]
    fn merge_keeps_identity_of_the_strongest_branch() {
        // a-group and b-group both continue into the union; only the
        // higher-mj predecessor chains, so no timeline merges.
        let a = ["a1", "a2", "a3", "a4", "a5", "a6"];
        let b = ["b1", "b2", "b3"];
        let union: Vec<&str> = a.iter().chain(b.iter()).copied().collect();
        let by_slot = vec![
            vec![com(0, 3, 0, &a), com(0, 3, 1, &b)],
            vec![com(1, 3, 0, &union)],
        ];
        let flat: Vec<Community> = by_slot.iter().flatten().cloned().collect();
        let timelines = assemble_timelines(&all_candidates(&by_slot), &flat, 3);
        assert_eq!(timelines.len(), 2);
        let with_union: Vec<&GroupTimeline> =
            timelines.iter().filter(|t| t.states.len() == 2).collect();
        assert_eq!(with_union.len(), 1);
        // mj(a, union) = 6/6 = 1; mj(b, union) = 3/3 = 1; tie broken by the
        // larger intersection, so the a-group wins the chain.
        assert_eq!(with_union[0].states[0].rank, 0);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;
        use std::collections::BTreeSet;

        proptest! {
            #[test]
            fn jaccard_below_mj_below_one(a: BTreeSet<u8>, b: BTreeSet<u8>) {
                let a: Vec<u8> = a.into_iter().collect();
                let b: Vec<u8> = b.into_iter().collect();
                let mj = modified_jaccard(&a, &b);
                let j = jaccard(&a, &b);
                prop_assert!(j <= mj + 1e-15);
                prop_assert!((0.0..=1.0).contains(&mj));
                prop_assert!((0.0..=1.0).contains(&j));
                prop_assert_eq!(mj, modified_jaccard(&b, &a));
                prop_assert_eq!(j, jaccard(&b, &a));
            }

            #[test]
            fn mj_is_one_iff_containment(a: BTreeSet<u8>, b: BTreeSet<u8>) {
                let av: Vec<u8> = a.iter().copied().collect();
                let bv: Vec<u8> = b.iter().copied().collect();
                let mj = modified_jaccard(&av, &bv);
                let contained =
                    !a.is_empty() && !b.is_empty() && (a.is_subset(&b) || b.is_subset(&a));
                prop_assert_eq!(mj == 1.0, contained);
            }

            #[test]
            fn tightening_thresholds_never_accepts_more(
                seed in 0u64..1000,
                loose_mj in 0.0f64..0.5,
                tight_extra in 0.0f64..0.5,
            ) {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let make = |slot: u32, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Community> {
                    (0..4u32)
                        .map(|rank| {
                            let size = rng.gen_range(3..10usize);
                            let mut members: BTreeSet<String> = BTreeSet::new();
                            while members.len() < size {
                                members.insert(format!("u{:02}", rng.gen_range(0..20)));
                            }
                            Community {
                                id: CommunityId { slot, k: 3, rank },
                                slot_index: slot as usize,
                                k: 3,
                                members: members.into_iter().collect(),
                            }
                        })
                        .collect()
                };
                let prev = make(0, &mut rng);
                let next = make(1, &mut rng);
                let accepted_at = |mj: f64, jmin: f64| -> usize {
                    let params = MatchParams {
                        mj_threshold: mj,
                        jaccard_min: jmin,
                        condition: ConditionMode::MjAndJaccard,
                    };
                    match_continuations(&prev, &next, &params)
                        .unwrap()
                        .iter()
                        .filter(|c| c.accepted)
                        .count()
                };
                let tight_mj = loose_mj + tight_extra;
                prop_assert!(accepted_at(tight_mj, 0.01) <= accepted_at(loose_mj, 0.01));
                prop_assert!(accepted_at(0.5, 0.3) <= accepted_at(0.5, 0.01));
            }
        }
    }

    #[test]
    fn stable_timelines_link_every_consecutive_pair() {
        let by_slot: Vec<Vec<Community>> = (0..5)
            .map(|slot| vec![com(slot, 3, 0, &["a", "b", "c", "d"])])
            .collect();
        let flat: Vec<Community> = by_slot.iter().flatten().cloned().collect();
        let candidates = all_candidates(&by_slot);
        let timelines = assemble_timelines(&candidates, &flat, 3);
        for timeline in timelines.iter().filter(|t| t.stable) {
            for pair in timeline.states.windows(2) {
                assert_eq!(pair[1].slot, pair[0].slot + 1);
                assert!(candidates
                    .iter()
                    .any(|c| c.accepted && c.from == pair[0] && c.to == pair[1]));
            }
        }
    }
}
