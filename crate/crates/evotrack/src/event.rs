//! Labeled group-evolution events shared by both classifiers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cpm::CommunityId;
use crate::error::{Error, Result};

/// The classification method an event belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    Sgci,
    Ged,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Sgci => write!(f, "SGCI"),
            Method::Ged => write!(f, "GED"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "SGCI" => Ok(Method::Sgci),
            "GED" => Ok(Method::Ged),
            other => Err(Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }
}

/// Every event type of both taxonomies. SGCI labels transitions between
/// states of stable groups; GED labels pairs over all groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    // SGCI
    Split,
    Deletion,
    Merge,
    Addition,
    SplitMerge,
    Decay,
    Constancy,
    ChangeSize,
    // GED
    Continuing,
    Growing,
    Shrinking,
    Merging,
    Splitting,
    Dissolving,
    Forming,
}

pub const SGCI_KINDS: [EventKind; 8] = [
    EventKind::Split,
    EventKind::Deletion,
    EventKind::Merge,
    EventKind::Addition,
    EventKind::SplitMerge,
    EventKind::Decay,
    EventKind::Constancy,
    EventKind::ChangeSize,
];

pub const GED_KINDS: [EventKind; 7] = [
    EventKind::Continuing,
    EventKind::Growing,
    EventKind::Shrinking,
    EventKind::Merging,
    EventKind::Splitting,
    EventKind::Dissolving,
    EventKind::Forming,
];

impl EventKind {
    pub fn method(self) -> Method {
        match self {
            EventKind::Split
            | EventKind::Deletion
            | EventKind::Merge
            | EventKind::Addition
            | EventKind::SplitMerge
            | EventKind::Decay
            | EventKind::Constancy
            | EventKind::ChangeSize => Method::Sgci,
            _ => Method::Ged,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Split => "split",
            EventKind::Deletion => "deletion",
            EventKind::Merge => "merge",
            EventKind::Addition => "addition",
            EventKind::SplitMerge => "split_merge",
            EventKind::Decay => "decay",
            EventKind::Constancy => "constancy",
            EventKind::ChangeSize => "change_size",
            EventKind::Continuing => "continuing",
            EventKind::Growing => "growing",
            EventKind::Shrinking => "shrinking",
            EventKind::Merging => "merging",
            EventKind::Splitting => "splitting",
            EventKind::Dissolving => "dissolving",
            EventKind::Forming => "forming",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<EventKind> {
        SGCI_KINDS
            .iter()
            .chain(GED_KINDS.iter())
            .copied()
            .find(|kind| kind.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown event type `{s}`")))
    }
}

/// One labeled transition. `slot_to = slot_from + 1`; decay and dissolving
/// carry an empty `to_ids` list, forming an empty `from_ids` list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionEvent {
    pub method: Method,
    pub kind: EventKind,
    pub slot_from: usize,
    pub slot_to: usize,
    pub from_ids: Vec<CommunityId>,
    pub to_ids: Vec<CommunityId>,
    pub measures: BTreeMap<String, f64>,
}

impl EvolutionEvent {
    pub fn new(
        kind: EventKind,
        slot_from: usize,
        from_ids: Vec<CommunityId>,
        to_ids: Vec<CommunityId>,
        measures: BTreeMap<String, f64>,
    ) -> EvolutionEvent {
        EvolutionEvent {
            method: kind.method(),
            kind,
            slot_from,
            slot_to: slot_from + 1,
            from_ids,
            to_ids,
            measures,
        }
    }

    /// Identity used for cross-method matching: the slot pair plus both id
    /// sets, ignoring the label.
    pub fn match_key(&self) -> (usize, Vec<CommunityId>, Vec<CommunityId>) {
        (self.slot_from, self.from_ids.clone(), self.to_ids.clone())
    }

    pub fn sort_key(&self) -> (usize, Vec<CommunityId>, Vec<CommunityId>, &'static str) {
        (
            self.slot_from,
            self.from_ids.clone(),
            self.to_ids.clone(),
            self.kind.as_str(),
        )
    }
}

/// Canonical event ordering: slot pair, then ids, then label.
pub fn sort_events(events: &mut [EvolutionEvent]) {
    events.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}
