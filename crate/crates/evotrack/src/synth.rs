//! Synthetic interaction logs with planted group evolution.
//!
//! A scenario script lists groups (member sets per slot) and the evolution
//! events they are meant to produce. Rendering emits, for every group and
//! slot, enough comments that the group forms one percolation community at
//! the configured k: members get an arbitrary total order (their sorted
//! order) and every ordered pair receives `comments_per_pair` comments,
//! which yields a transitive tournament containing cliques of every size up
//! to the group size. Optional background noise adds comment pairs between
//! users of different groups only, so planted structure survives.
//!
//! Scripts are rendered into disjoint slot windows (step = length): with
//! overlapping windows every interior instant belongs to two slots, which
//! would smear planted membership across neighbouring slots.
//!
//! `expected_events` applies both classifiers directly to the planted
//! member sets, skipping the graph stage entirely; at zero noise the full
//! pipeline must reproduce it exactly, which is what the acceptance suite
//! checks.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cpm::{Community, CommunityId};
use crate::error::{Error, Result};
use crate::event::{EventKind, EvolutionEvent};
use crate::ged::{classify_ged, GedParams, ImportanceKind};
use crate::ingest::{InteractionRecord, SECONDS_PER_DAY};
use crate::sgci::{classify_sgci, SgciParams};
use crate::tracking::{assemble_timelines, match_continuations, MatchParams, TransitionCandidate};

/// 2008-01-01T00:00:00Z; scripts render from this midnight so the default
/// origin detection reproduces it exactly.
pub const RENDER_ORIGIN: i64 = 1_199_145_600;

/// One scripted group: its member set per slot it exists in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedGroup {
    pub name: String,
    pub members_by_slot: BTreeMap<usize, Vec<String>>,
}

impl PlantedGroup {
    /// A group whose member set is the same over a slot range.
    pub fn constant(
        name: &str,
        slots: std::ops::RangeInclusive<usize>,
        members: &[String],
    ) -> PlantedGroup {
        let mut sorted = members.to_vec();
        sorted.sort();
        PlantedGroup {
            name: name.to_string(),
            members_by_slot: slots.map(|slot| (slot, sorted.clone())).collect(),
        }
    }
}

/// A scripted evolution event, naming the groups on each side of the slot
/// junction it happens at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedEvent {
    pub slot_from: usize,
    pub kind: EventKind,
    pub from_groups: Vec<String>,
    pub to_groups: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioScript {
    pub name: String,
    pub seed: u64,
    pub slots: usize,
    /// Length of each (disjoint) rendered slot window.
    pub slot_days: u32,
    /// Comments emitted per ordered in-group pair; must reach the ingest
    /// weight threshold for the group to survive.
    pub comments_per_pair: u32,
    /// Clique size the script is designed for.
    pub k: usize,
    /// Probability that an ordered cross-group user pair receives a noise
    /// edge in a slot.
    pub noise: f64,
    /// Users beyond the planted members, available as noise endpoints.
    pub extra_users: Vec<String>,
    pub groups: Vec<PlantedGroup>,
    pub planted_events: Vec<PlantedEvent>,
}

impl ScenarioScript {
    pub fn new(name: &str, slots: usize, k: usize) -> ScenarioScript {
        ScenarioScript {
            name: name.to_string(),
            seed: 7,
            slots,
            slot_days: 30,
            comments_per_pair: 2,
            k,
            noise: 0.0,
            extra_users: Vec::new(),
            groups: Vec::new(),
            planted_events: Vec::new(),
        }
    }

    fn members_at(&self, group: &str, slot: usize) -> Option<&Vec<String>> {
        self.groups
            .iter()
            .find(|g| g.name == group)
            .and_then(|g| g.members_by_slot.get(&slot))
    }

    /// Check the structural invariants the oracle relies on.
    ///
    /// Groups must be at least k strong wherever they exist, distinct
    /// same-slot groups may share at most k-2 members (a larger overlap
    /// would chain their cliques into one community), and planted events
    /// must be consistent with the member sets they reference.
    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::InvalidParameter(format!(
                "scenario k must be >= 3 (got {})",
                self.k
            )));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return Err(Error::InvalidParameter(format!(
                "noise must be in [0,1] (got {})",
                self.noise
            )));
        }
        let mut seen_names = HashSet::new();
        for group in &self.groups {
            if !seen_names.insert(group.name.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate group name `{}`",
                    group.name
                )));
            }
            for (&slot, members) in &group.members_by_slot {
                if slot >= self.slots {
                    return Err(Error::InvalidParameter(format!(
                        "group `{}` placed in slot {slot}, but the script has {} slots",
                        group.name, self.slots
                    )));
                }
                if members.len() < self.k {
                    return Err(Error::InvalidParameter(format!(
                        "group `{}` has {} members in slot {slot}, below k = {}",
                        group.name,
                        members.len(),
                        self.k
                    )));
                }
                let mut sorted = members.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != members.len() {
                    return Err(Error::InvalidParameter(format!(
                        "group `{}` has duplicate members in slot {slot}",
                        group.name
                    )));
                }
            }
        }
        for slot in 0..self.slots {
            let sets: Vec<(&str, HashSet<&str>)> = self
                .groups
                .iter()
                .filter_map(|g| {
                    g.members_by_slot
                        .get(&slot)
                        .map(|m| (g.name.as_str(), m.iter().map(|s| s.as_str()).collect()))
                })
                .collect();
            for i in 0..sets.len() {
                for j in (i + 1)..sets.len() {
                    let shared = sets[i].1.intersection(&sets[j].1).count();
                    if shared > self.k - 2 {
                        return Err(Error::InvalidParameter(format!(
                            "groups `{}` and `{}` share {shared} members in slot {slot}; \
                             more than k-2 = {} would percolate them together",
                            sets[i].0,
                            sets[j].0,
                            self.k - 2
                        )));
                    }
                }
            }
        }
        for event in &self.planted_events {
            self.validate_event(event)?;
        }
        Ok(())
    }

    fn validate_event(&self, event: &PlantedEvent) -> Result<()> {
        let junction = (event.slot_from, event.slot_from + 1);
        let inconsistent = |detail: String| {
            Error::InvalidParameter(format!(
                "planted {} at ({}, {}): {detail}",
                event.kind, junction.0, junction.1
            ))
        };
        let from_sets: Vec<HashSet<&str>> = event
            .from_groups
            .iter()
            .map(|name| {
                self.members_at(name, junction.0)
                    .map(|m| m.iter().map(|s| s.as_str()).collect())
                    .ok_or_else(|| {
                        inconsistent(format!("group `{name}` absent in slot {}", junction.0))
                    })
            })
            .collect::<Result<_>>()?;
        let to_sets: Vec<HashSet<&str>> = event
            .to_groups
            .iter()
            .map(|name| {
                self.members_at(name, junction.1)
                    .map(|m| m.iter().map(|s| s.as_str()).collect())
                    .ok_or_else(|| {
                        inconsistent(format!("group `{name}` absent in slot {}", junction.1))
                    })
            })
            .collect::<Result<_>>()?;
        match event.kind {
            EventKind::Decay | EventKind::Dissolving => {
                let name = event.from_groups.first().ok_or_else(|| {
                    inconsistent("needs the dissolving group on the from side".to_string())
                })?;
                if self.members_at(name, junction.1).is_some() {
                    return Err(inconsistent(format!(
                        "group `{name}` still exists in slot {}",
                        junction.1
                    )));
                }
            }
            EventKind::Forming => {
                let name = event.to_groups.first().ok_or_else(|| {
                    inconsistent("needs the forming group on the to side".to_string())
                })?;
                if self.members_at(name, junction.0).is_some() {
                    return Err(inconsistent(format!(
                        "group `{name}` already exists in slot {}",
                        junction.0
                    )));
                }
            }
            _ => {
                // Transition events: each side must share members across
                // the junction.
                for (i, from) in from_sets.iter().enumerate() {
                    if !to_sets.iter().any(|to| from.intersection(to).count() > 0) {
                        return Err(inconsistent(format!(
                            "from group `{}` shares no member with any to group",
                            event.from_groups[i]
                        )));
                    }
                }
                for (j, to) in to_sets.iter().enumerate() {
                    if !from_sets
                        .iter()
                        .any(|from| from.intersection(to).count() > 0)
                    {
                        return Err(inconsistent(format!(
                            "to group `{}` shares no member with any from group",
                            event.to_groups[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every user a script can reference, sorted.
    pub fn universe(&self) -> Vec<String> {
        let mut users: HashSet<String> = self.extra_users.iter().cloned().collect();
        for group in &self.groups {
            for members in group.members_by_slot.values() {
                users.extend(members.iter().cloned());
            }
        }
        let mut users: Vec<String> = users.into_iter().collect();
        users.sort();
        users
    }
}

/// Render a script into an interaction log. Equal seeds render
/// byte-identical logs.
pub fn render_scenario(script: &ScenarioScript) -> Result<Vec<InteractionRecord>> {
    script.validate()?;
    let slot_seconds = i64::from(script.slot_days) * SECONDS_PER_DAY;
    let universe = script.universe();
    let mut records = Vec::new();
    for slot in 0..script.slots {
        let window_start = RENDER_ORIGIN + slot as i64 * slot_seconds;
        let mut tick = 0i64;
        let mut next_ts = || {
            let ts = window_start + tick.rem_euclid(slot_seconds);
            tick += 1;
            ts
        };

        let mut same_group: HashMap<&str, Vec<usize>> = HashMap::new();
        for (g, group) in script.groups.iter().enumerate() {
            let members = match group.members_by_slot.get(&slot) {
                Some(members) => members,
                None => continue,
            };
            for member in members {
                same_group.entry(member.as_str()).or_default().push(g);
            }
            let mut ordered = members.clone();
            ordered.sort();
            for i in 0..ordered.len() {
                for j in (i + 1)..ordered.len() {
                    for _ in 0..script.comments_per_pair {
                        records.push(InteractionRecord {
                            source: ordered[i].clone(),
                            target: ordered[j].clone(),
                            timestamp: next_ts(),
                        });
                    }
                }
            }
        }

        if script.noise > 0.0 && universe.len() > 1 {
            let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
            rng.set_stream(slot as u64 + 1);
            let possible = universe.len() * (universe.len() - 1);
            let target = (script.noise * possible as f64).round() as usize;
            let mut chosen: HashSet<(usize, usize)> = HashSet::new();
            let mut attempts = 0usize;
            while chosen.len() < target && attempts < target.saturating_mul(20) + 100 {
                attempts += 1;
                let u = rng.gen_range(0..universe.len());
                let v = rng.gen_range(0..universe.len());
                if u == v {
                    continue;
                }
                let shares_group = match (
                    same_group.get(universe[u].as_str()),
                    same_group.get(universe[v].as_str()),
                ) {
                    (Some(a), Some(b)) => a.iter().any(|g| b.contains(g)),
                    _ => false,
                };
                if shares_group {
                    continue;
                }
                chosen.insert((u, v));
            }
            let mut chosen: Vec<(usize, usize)> = chosen.into_iter().collect();
            chosen.sort_unstable();
            for (u, v) in chosen {
                for _ in 0..script.comments_per_pair {
                    records.push(InteractionRecord {
                        source: universe[u].clone(),
                        target: universe[v].clone(),
                        timestamp: next_ts(),
                    });
                }
            }
        }
    }
    Ok(records)
}

/// The planted member sets of one slot as communities, with ids assigned
/// the way extraction assigns them (rank of the sorted member list).
/// Groups smaller than `k` form no community and are dropped.
pub fn planted_communities(script: &ScenarioScript, k: usize) -> Vec<Community> {
    let mut communities = Vec::new();
    for slot in 0..script.slots {
        let mut sets: Vec<Vec<String>> = script
            .groups
            .iter()
            .filter_map(|g| g.members_by_slot.get(&slot))
            .filter(|members| members.len() >= k)
            .map(|members| {
                let mut sorted = members.clone();
                sorted.sort();
                sorted
            })
            .collect();
        sets.sort();
        sets.dedup();
        for (rank, members) in sets.into_iter().enumerate() {
            communities.push(Community {
                id: CommunityId {
                    slot: slot as u32,
                    k: k as u32,
                    rank: rank as u32,
                },
                slot_index: slot,
                k,
                members,
            });
        }
    }
    communities
}

/// Classification parameters shared by the oracle and the pipeline run it
/// is compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventParams {
    pub k: usize,
    pub match_params: MatchParams,
    pub stability_min_slots: usize,
    pub sgci: SgciParams,
    pub ged: GedParams,
}

impl Default for EventParams {
    fn default() -> EventParams {
        EventParams {
            k: 3,
            match_params: MatchParams::default(),
            stability_min_slots: 3,
            sgci: SgciParams::default(),
            ged: GedParams::default(),
        }
    }
}

/// Ground truth for one scenario: both classifiers applied directly to the
/// planted member sets, with no graph stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedEvents {
    pub communities: Vec<Community>,
    pub candidates: Vec<TransitionCandidate>,
    pub sgci: Vec<EvolutionEvent>,
    pub ged: Vec<EvolutionEvent>,
}

pub fn expected_events(script: &ScenarioScript, params: &EventParams) -> Result<ExpectedEvents> {
    script.validate()?;
    if params.ged.metric != ImportanceKind::Uniform {
        return Err(Error::InvalidParameter(
            "the planted-set oracle supports only the uniform importance metric (no graphs exist)"
                .to_string(),
        ));
    }
    let communities = planted_communities(script, params.k);
    let mut by_slot: Vec<Vec<Community>> = vec![Vec::new(); script.slots];
    for community in &communities {
        by_slot[community.slot_index].push(community.clone());
    }
    let mut candidates = Vec::new();
    for window in by_slot.windows(2) {
        candidates.extend(match_continuations(
            &window[0],
            &window[1],
            &params.match_params,
        )?);
    }
    let timelines = assemble_timelines(&candidates, &communities, params.stability_min_slots);
    let accepted: Vec<TransitionCandidate> =
        candidates.iter().filter(|c| c.accepted).cloned().collect();
    let sgci = classify_sgci(
        &accepted,
        &communities,
        &timelines,
        script.slots,
        &params.sgci,
    )?;
    let ged = classify_ged(&communities, &[], script.slots, &params.ged)?;
    Ok(ExpectedEvents {
        communities,
        candidates,
        sgci,
        ged,
    })
}

pub mod scenarios {
    //! The scripted scenario suite: every event type of both taxonomies is
    //! planted by at least one scenario, each hand-sized so the two
    //! classifiers agree wherever their taxonomies correspond.

    use super::*;

    fn users(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i:03}")).collect()
    }

    fn planted(
        slot_from: usize,
        kind: EventKind,
        from_groups: &[&str],
        to_groups: &[&str],
    ) -> PlantedEvent {
        PlantedEvent {
            slot_from,
            kind,
            from_groups: from_groups.iter().map(|s| s.to_string()).collect(),
            to_groups: to_groups.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// One five-member group lasting the whole script: pure constancy /
    /// continuing.
    pub fn constant_group() -> ScenarioScript {
        let mut script = ScenarioScript::new("constant_group", 6, 3);
        script
            .groups
            .push(PlantedGroup::constant("g", 0..=5, &users("g", 5)));
        script.planted_events = vec![
            planted(0, EventKind::Constancy, &["g"], &["g"]),
            planted(0, EventKind::Continuing, &["g"], &["g"]),
        ];
        script
    }

    /// 10 -> 14 members at slot 3: change_size / growing. The jump of 4
    /// keeps the backward inclusion at (10/14)^2 just above 0.5.
    pub fn grow_step() -> ScenarioScript {
        let mut script = ScenarioScript::new("grow_step", 6, 3);
        let mut group = PlantedGroup::constant("g", 0..=2, &users("g", 10));
        let grown = users("g", 14);
        for slot in 3..=5 {
            group.members_by_slot.insert(slot, grown.clone());
        }
        script.groups.push(group);
        script.planted_events = vec![
            planted(2, EventKind::ChangeSize, &["g"], &["g"]),
            planted(2, EventKind::Growing, &["g"], &["g"]),
        ];
        script
    }

    /// 14 -> 10 members at slot 3: change_size / shrinking.
    pub fn shrink_step() -> ScenarioScript {
        let mut script = ScenarioScript::new("shrink_step", 6, 3);
        let mut group = PlantedGroup::constant("g", 0..=2, &users("g", 14));
        let shrunk = users("g", 10);
        for slot in 3..=5 {
            group.members_by_slot.insert(slot, shrunk.clone());
        }
        script.groups.push(group);
        script.planted_events = vec![
            planted(2, EventKind::ChangeSize, &["g"], &["g"]),
            planted(2, EventKind::Shrinking, &["g"], &["g"]),
        ];
        script
    }

    /// A six-member group vanishing after slot 2 while an anchor group
    /// keeps every slot populated: decay / dissolving.
    pub fn dissolve_with_anchor() -> ScenarioScript {
        let mut script = ScenarioScript::new("dissolve_with_anchor", 6, 3);
        script
            .groups
            .push(PlantedGroup::constant("anchor", 0..=5, &users("k", 4)));
        script
            .groups
            .push(PlantedGroup::constant("g", 0..=2, &users("g", 6)));
        script.planted_events = vec![
            planted(2, EventKind::Decay, &["g"], &[]),
            planted(2, EventKind::Dissolving, &["g"], &[]),
        ];
        script
    }

    /// A(14) splits into C1 (its first 10) and C2 (its last 4): the small
    /// branch is a split, the dominant branch a change_size; the inclusion
    /// method sees splitting and shrinking.
    pub fn split_two_way() -> ScenarioScript {
        split_scenario("split_two_way", 3)
    }

    /// The same split validated and tracked at k = 4.
    pub fn split_at_k4() -> ScenarioScript {
        split_scenario("split_at_k4", 4)
    }

    fn split_scenario(name: &str, k: usize) -> ScenarioScript {
        let mut script = ScenarioScript::new(name, 6, k);
        let a = users("a", 14);
        script.groups.push(PlantedGroup::constant("a", 0..=2, &a));
        script
            .groups
            .push(PlantedGroup::constant("c1", 3..=5, &a[..10]));
        script
            .groups
            .push(PlantedGroup::constant("c2", 3..=5, &a[10..]));
        script.planted_events = vec![
            planted(2, EventKind::Split, &["a"], &["c2"]),
            planted(2, EventKind::ChangeSize, &["a"], &["c1"]),
            planted(2, EventKind::Splitting, &["a"], &["c2"]),
            planted(2, EventKind::Shrinking, &["a"], &["c1"]),
        ];
        script
    }

    /// A1(10) and A2(4) merge into their 14-member union: merge on the
    /// small branch, change_size on the dominant one; merging and growing
    /// on the inclusion side.
    pub fn merge_two_way() -> ScenarioScript {
        let mut script = ScenarioScript::new("merge_two_way", 6, 3);
        let a1 = users("a", 10);
        let a2 = users("b", 4);
        let union: Vec<String> = a1.iter().chain(a2.iter()).cloned().collect();
        script.groups.push(PlantedGroup::constant("a1", 0..=2, &a1));
        script.groups.push(PlantedGroup::constant("a2", 0..=2, &a2));
        script
            .groups
            .push(PlantedGroup::constant("b", 3..=5, &union));
        script.planted_events = vec![
            planted(2, EventKind::Merge, &["a2"], &["b"]),
            planted(2, EventKind::ChangeSize, &["a1"], &["b"]),
            planted(2, EventKind::Merging, &["a2"], &["b"]),
            planted(2, EventKind::Growing, &["a1"], &["b"]),
        ];
        script
    }

    /// A seven-member group feeds four members into a group ten times its
    /// size (addition: the fan-in rule outranks the simultaneous fan-out)
    /// and keeps three as a splinter, which the big branch dwarfs past the
    /// deletion ratio.
    pub fn addition_priority() -> ScenarioScript {
        let mut script = ScenarioScript::new("addition_priority", 6, 3);
        let big = users("g", 70);
        let a = users("a", 7);
        let b: Vec<String> = big.iter().chain(a[..4].iter()).cloned().collect();
        let b_splinter = a[4..].to_vec();
        script
            .groups
            .push(PlantedGroup::constant("big", 0..=2, &big));
        script.groups.push(PlantedGroup::constant("a", 0..=2, &a));
        script.groups.push(PlantedGroup::constant("b", 3..=5, &b));
        script
            .groups
            .push(PlantedGroup::constant("b_splinter", 3..=5, &b_splinter));
        script.planted_events = vec![
            planted(2, EventKind::Addition, &["a"], &["b"]),
            planted(2, EventKind::Deletion, &["a"], &["b_splinter"]),
            planted(2, EventKind::ChangeSize, &["big"], &["b"]),
            planted(2, EventKind::Splitting, &["a"], &["b_splinter"]),
            planted(2, EventKind::Growing, &["big"], &["b"]),
        ];
        script
    }

    /// Two groups swap fragments into a fresh six-member group: the
    /// fragment transition out of `a` sees both fan-out and fan-in
    /// (split_merge), the one out of `a2` is a plain split, and the fresh
    /// group registers as forming for the inclusion method.
    pub fn split_merge_cross() -> ScenarioScript {
        let mut script = ScenarioScript::new("split_merge_cross", 6, 3);
        let a = users("a", 14);
        let a2 = users("b", 16);
        let c1 = a[..10].to_vec();
        let bridge: Vec<String> = a[10..13].iter().chain(a2[13..].iter()).cloned().collect();
        let a2_next: Vec<String> = a2[..13].iter().cloned().chain(users("n", 3)).collect();
        script.groups.push(PlantedGroup::constant("a", 0..=2, &a));
        script.groups.push(PlantedGroup::constant("a2", 0..=2, &a2));
        script.groups.push(PlantedGroup::constant("c1", 3..=5, &c1));
        script
            .groups
            .push(PlantedGroup::constant("bridge", 3..=5, &bridge));
        script
            .groups
            .push(PlantedGroup::constant("a2_next", 3..=5, &a2_next));
        script.planted_events = vec![
            planted(2, EventKind::SplitMerge, &["a"], &["bridge"]),
            planted(2, EventKind::Split, &["a2"], &["bridge"]),
            planted(2, EventKind::ChangeSize, &["a"], &["c1"]),
            planted(2, EventKind::Constancy, &["a2"], &["a2_next"]),
            planted(2, EventKind::Forming, &[], &["bridge"]),
            planted(2, EventKind::Shrinking, &["a"], &["c1"]),
            planted(2, EventKind::Continuing, &["a2"], &["a2_next"]),
        ];
        script
    }

    /// A group alive for just two slots next to a stable anchor: the
    /// inclusion method reports forming, continuing, and dissolving for
    /// it, all invisible to the stable-group method.
    pub fn transient_group() -> ScenarioScript {
        let mut script = ScenarioScript::new("transient_group", 6, 3);
        script
            .groups
            .push(PlantedGroup::constant("anchor", 0..=5, &users("k", 4)));
        script
            .groups
            .push(PlantedGroup::constant("u", 2..=3, &users("u", 4)));
        script.planted_events = vec![
            planted(1, EventKind::Forming, &[], &["u"]),
            planted(2, EventKind::Continuing, &["u"], &["u"]),
            planted(3, EventKind::Dissolving, &["u"], &[]),
        ];
        script
    }

    /// A stable nine-member group dies while one member drifts into a
    /// short-lived fragment: the continuation is too weak to accept, so
    /// both methods see the death, and the fragment only lives in the
    /// inclusion method's books.
    pub fn decay_to_fragment() -> ScenarioScript {
        let mut script = ScenarioScript::new("decay_to_fragment", 6, 3);
        let a = users("a", 9);
        let fragment: Vec<String> = a[..1].iter().cloned().chain(users("f", 3)).collect();
        script
            .groups
            .push(PlantedGroup::constant("anchor", 0..=5, &users("k", 4)));
        script.groups.push(PlantedGroup::constant("a", 0..=2, &a));
        script
            .groups
            .push(PlantedGroup::constant("fragment", 3..=4, &fragment));
        script.planted_events = vec![
            planted(2, EventKind::Decay, &["a"], &[]),
            planted(2, EventKind::Dissolving, &["a"], &[]),
            planted(2, EventKind::Forming, &[], &["fragment"]),
            planted(3, EventKind::Continuing, &["fragment"], &["fragment"]),
            planted(4, EventKind::Dissolving, &["fragment"], &[]),
        ];
        script
    }

    /// Two constant groups sharing exactly one member: community overlap
    /// within a slot, and users with multiplicity-two membership.
    pub fn overlapping_pair() -> ScenarioScript {
        let mut script = ScenarioScript::new("overlapping_pair", 6, 3);
        let g1 = users("a", 4);
        let g2: Vec<String> = g1[3..].iter().cloned().chain(users("c", 3)).collect();
        script.groups.push(PlantedGroup::constant("g1", 0..=5, &g1));
        script.groups.push(PlantedGroup::constant("g2", 0..=5, &g2));
        script.planted_events = vec![
            planted(0, EventKind::Constancy, &["g1"], &["g1"]),
            planted(0, EventKind::Continuing, &["g2"], &["g2"]),
        ];
        script
    }

    /// Merge at slot 3, split back apart at slot 6, over nine slots.
    pub fn merge_then_split() -> ScenarioScript {
        let mut script = ScenarioScript::new("merge_then_split", 9, 3);
        let a1 = users("a", 10);
        let a2 = users("b", 4);
        let union: Vec<String> = a1.iter().chain(a2.iter()).cloned().collect();
        script.groups.push(PlantedGroup::constant("a1", 0..=2, &a1));
        script.groups.push(PlantedGroup::constant("a2", 0..=2, &a2));
        script
            .groups
            .push(PlantedGroup::constant("b", 3..=5, &union));
        script.groups.push(PlantedGroup::constant("c1", 6..=8, &a1));
        script.groups.push(PlantedGroup::constant("c2", 6..=8, &a2));
        script.planted_events = vec![
            planted(2, EventKind::Merge, &["a2"], &["b"]),
            planted(2, EventKind::Merging, &["a2"], &["b"]),
            planted(5, EventKind::Split, &["b"], &["c2"]),
            planted(5, EventKind::Splitting, &["b"], &["c2"]),
        ];
        script
    }

    /// The full suite in a fixed order.
    pub fn suite() -> Vec<ScenarioScript> {
        vec![
            constant_group(),
            grow_step(),
            shrink_step(),
            dissolve_with_anchor(),
            split_two_way(),
            merge_two_way(),
            addition_priority(),
            split_merge_cross(),
            transient_group(),
            decay_to_fragment(),
            split_at_k4(),
            overlapping_pair(),
            merge_then_split(),
        ]
    }

    pub fn by_name(name: &str) -> Option<ScenarioScript> {
        suite().into_iter().find(|s| s.name == name)
    }

    /// A deterministic large corpus: banded groups that drift, with
    /// periodic disappearances and light cross-group noise. Sized so the
    /// defaults (5000 users, 20 slots) render roughly 200k records.
    pub fn scale_corpus(
        user_count: usize,
        slots: usize,
        group_count: usize,
        seed: u64,
    ) -> ScenarioScript {
        let mut script = ScenarioScript::new("scale_corpus", slots, 3);
        script.seed = seed;
        script.extra_users = (0..user_count).map(|i| format!("u{i:05}")).collect();
        let band = user_count / group_count.max(1);
        for g in 0..group_count {
            let size = 6 + g % 5;
            let base = g * band;
            let mut group = PlantedGroup {
                name: format!("band{g:03}"),
                members_by_slot: BTreeMap::new(),
            };
            for slot in 0..slots {
                // Every seventh group goes dark on alternating stretches.
                if g % 7 == 0 && (slot / 3) % 2 == 1 {
                    continue;
                }
                let offset = slot % 3;
                let members: Vec<String> = (0..size)
                    .map(|i| format!("u{:05}", base + offset + i))
                    .collect();
                group.members_by_slot.insert(slot, members);
            }
            script.groups.push(group);
        }
        // Background edge probability tuned for about 1800 noise edges per
        // slot at the default population.
        script.noise = 1800.0 / (user_count as f64 * (user_count as f64 - 1.0));
        script
    }
}
