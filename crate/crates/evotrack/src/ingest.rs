//! Interaction-log parsing, sliding time slots, and per-slot snapshot graphs.
//!
//! An interaction log is a sequence of `commenter -> author` events. The
//! analysed period is cut into fixed-length slots that may overlap (the
//! default is 30-day slots stepped every 15 days, so interior records fall
//! into exactly two slots). Each slot becomes one directed weighted graph
//! after dropping self-loops and edges below the weight threshold.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::{NaiveDate, NaiveDateTime};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SECONDS_PER_DAY: i64 = 86_400;

/// One timestamped directed interaction: `source` commented on a post by
/// `target`. Self-comments are kept at parse time and dropped when the
/// snapshot graph is built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub source: String,
    pub target: String,
    /// UTC seconds.
    pub timestamp: i64,
}

/// Timestamp encoding of an interaction CSV, detected once per file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimestampFormat {
    EpochSeconds,
    Rfc3339,
    /// `%Y-%m-%dT%H:%M:%S` without an offset, read as UTC.
    NaiveDateTime,
    /// `%Y-%m-%d %H:%M:%S` without an offset, read as UTC.
    NaiveDateTimeSpace,
    /// `%Y-%m-%d`, read as midnight UTC.
    NaiveDate,
}

impl TimestampFormat {
    fn detect(raw: &str) -> Option<TimestampFormat> {
        [
            TimestampFormat::EpochSeconds,
            TimestampFormat::Rfc3339,
            TimestampFormat::NaiveDateTime,
            TimestampFormat::NaiveDateTimeSpace,
            TimestampFormat::NaiveDate,
        ]
        .into_iter()
        .find(|fmt| fmt.parse(raw).is_some())
    }

    fn parse(self, raw: &str) -> Option<i64> {
        let raw = raw.trim();
        match self {
            TimestampFormat::EpochSeconds => raw.parse::<i64>().ok(),
            TimestampFormat::Rfc3339 => chrono::DateTime::parse_from_rfc3339(raw)
                .ok()
                .map(|dt| dt.timestamp()),
            TimestampFormat::NaiveDateTime => {
                NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S")
                    .ok()
                    .map(|dt| dt.and_utc().timestamp())
            }
            TimestampFormat::NaiveDateTimeSpace => {
                NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S")
                    .ok()
                    .map(|dt| dt.and_utc().timestamp())
            }
            TimestampFormat::NaiveDate => NaiveDate::parse_from_str(raw, "%Y-%m-%d")
                .ok()
                .map(|d| d.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp()),
        }
    }
}

/// Parse an interaction CSV with header `source,target,timestamp`.
///
/// The timestamp encoding is detected from the first data row and applied
/// to the whole file; a row that does not parse under the detected format
/// is an error naming the row. Empty input yields an empty list.
pub fn parse_interactions<R: Read>(reader: R) -> Result<(Vec<InteractionRecord>, TimestampFormat)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    {
        let headers = csv_reader.headers()?;
        if !headers.is_empty() {
            let expected = ["source", "target", "timestamp"];
            let got: Vec<&str> = headers.iter().collect();
            if got != expected {
                return Err(Error::MalformedRow {
                    row: 0,
                    field: "header",
                    message: format!(
                        "expected `source,target,timestamp`, got `{}`",
                        got.join(",")
                    ),
                });
            }
        }
    }

    let mut records = Vec::new();
    let mut format = None;
    for (i, row) in csv_reader.records().enumerate() {
        let row = row?;
        let data_row = i + 1;
        if row.len() != 3 {
            return Err(Error::MalformedRow {
                row: data_row,
                field: "row",
                message: format!("expected 3 fields, got {}", row.len()),
            });
        }
        let source = row[0].to_string();
        let target = row[1].to_string();
        if source.is_empty() || target.is_empty() {
            let field = if source.is_empty() {
                "source"
            } else {
                "target"
            };
            return Err(Error::MalformedRow {
                row: data_row,
                field,
                message: "empty user id".to_string(),
            });
        }
        let raw_ts = &row[2];
        let fmt = match format {
            Some(fmt) => fmt,
            None => {
                let detected = TimestampFormat::detect(raw_ts).ok_or(Error::MalformedRow {
                    row: data_row,
                    field: "timestamp",
                    message: format!("unrecognised timestamp `{raw_ts}`"),
                })?;
                format = Some(detected);
                detected
            }
        };
        let timestamp = fmt.parse(raw_ts).ok_or(Error::MalformedRow {
            row: data_row,
            field: "timestamp",
            message: format!("`{raw_ts}` does not match the detected format {fmt:?}"),
        })?;
        records.push(InteractionRecord {
            source,
            target,
            timestamp,
        });
    }
    Ok((records, format.unwrap_or(TimestampFormat::EpochSeconds)))
}

/// Slot layout: window `i` covers `[origin + i*step, origin + i*step + length)`.
///
/// Windows are half-open so every instant belongs to an unambiguous set of
/// slots. `step == length` gives disjoint windows; `step < length` makes
/// them overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpec {
    /// UTC seconds of the slot-0 window start.
    pub origin: i64,
    pub slot_length: i64,
    pub slot_step: i64,
}

impl SlotSpec {
    pub fn new(origin: i64, slot_length: i64, slot_step: i64) -> Result<SlotSpec> {
        if slot_length <= 0 || slot_step <= 0 || slot_step > slot_length {
            return Err(Error::InvalidParameter(format!(
                "slot step must satisfy 0 < step <= length (got step {slot_step}, length {slot_length})"
            )));
        }
        Ok(SlotSpec {
            origin,
            slot_length,
            slot_step,
        })
    }

    pub fn from_days(origin: i64, length_days: u32, step_days: u32) -> Result<SlotSpec> {
        SlotSpec::new(
            origin,
            i64::from(length_days) * SECONDS_PER_DAY,
            i64::from(step_days) * SECONDS_PER_DAY,
        )
    }

    /// Half-open window `[start, end)` of slot `i`.
    pub fn window(&self, slot: usize) -> (i64, i64) {
        let start = self.origin + slot as i64 * self.slot_step;
        (start, start + self.slot_length)
    }

    /// Every slot whose window contains `t`. Empty when `t < origin`.
    pub fn slots_for(&self, t: i64) -> std::ops::RangeInclusive<usize> {
        if t < self.origin {
            #[allow(clippy::reversed_empty_ranges)]
            return 1..=0;
        }
        let offset = t - self.origin;
        let hi = offset.div_euclid(self.slot_step);
        let lo = ((offset - self.slot_length).div_euclid(self.slot_step) + 1).max(0);
        (lo as usize)..=(hi as usize)
    }
}

/// Earliest record timestamp truncated to midnight UTC, the default window
/// origin when none is configured.
pub fn default_origin(records: &[InteractionRecord]) -> Option<i64> {
    records
        .iter()
        .map(|r| r.timestamp)
        .min()
        .map(|t| t - t.rem_euclid(SECONDS_PER_DAY))
}

/// Assign every record to every slot whose window contains it.
///
/// Returns a dense per-slot partition covering slots `0..=last` where
/// `last` is the highest slot containing any record. Slot assignment is a
/// pure function of `(timestamp, spec)`; a record before the origin is an
/// error because data precedes the configured analysis window.
pub fn assign_slots(
    records: &[InteractionRecord],
    spec: &SlotSpec,
) -> Result<Vec<Vec<InteractionRecord>>> {
    let mut slots: Vec<Vec<InteractionRecord>> = Vec::new();
    for (index, record) in records.iter().enumerate() {
        if record.timestamp < spec.origin {
            return Err(Error::RecordBeforeOrigin {
                index,
                timestamp: record.timestamp,
                origin: spec.origin,
            });
        }
        for slot in spec.slots_for(record.timestamp) {
            if slots.len() <= slot {
                slots.resize_with(slot + 1, Vec::new);
            }
            slots[slot].push(record.clone());
        }
    }
    Ok(slots)
}

/// Directed weighted graph of one time slot after edge thresholding.
///
/// Every stored edge has weight >= the threshold it was built with, edge
/// endpoints are always members of `nodes`, and nodes with no surviving
/// edge are absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotGraph {
    pub slot_index: usize,
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), u32>,
}

impl SnapshotGraph {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: &str, to: &str) -> bool {
        self.edges.contains_key(&(from.to_string(), to.to_string()))
    }
}

/// Build the thresholded snapshot of one slot.
///
/// An edge `(u, v)` exists iff `u` commented on `v`'s posts at least
/// `min_edge_weight` times within the slot; its weight is the count.
/// Self-loops are dropped before counting and isolated nodes are removed.
pub fn build_snapshot(
    records: &[InteractionRecord],
    slot_index: usize,
    min_edge_weight: u32,
) -> SnapshotGraph {
    let mut counts: BTreeMap<(String, String), u32> = BTreeMap::new();
    for record in records {
        if record.source == record.target {
            continue;
        }
        *counts
            .entry((record.source.clone(), record.target.clone()))
            .or_insert(0) += 1;
    }
    counts.retain(|_, weight| *weight >= min_edge_weight);
    let mut nodes = BTreeSet::new();
    for (source, target) in counts.keys() {
        nodes.insert(source.clone());
        nodes.insert(target.clone());
    }
    SnapshotGraph {
        slot_index,
        nodes,
        edges: counts,
    }
}

/// Build all per-slot snapshots. Slots are independent and processed in
/// parallel; the output is indexed by slot.
pub fn build_snapshots(
    slotted: &[Vec<InteractionRecord>],
    min_edge_weight: u32,
) -> Vec<SnapshotGraph> {
    slotted
        .par_iter()
        .enumerate()
        .map(|(slot, records)| build_snapshot(records, slot, min_edge_weight))
        .collect()
}

/// Parse the pre-aggregated alternative format `source,target,slot_index,weight`
/// into snapshots, applying the same self-loop and threshold rules.
pub fn parse_preaggregated<R: Read>(reader: R, min_edge_weight: u32) -> Result<Vec<SnapshotGraph>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = csv_reader.headers()?;
        if !headers.is_empty() {
            let got: Vec<&str> = headers.iter().collect();
            if got != ["source", "target", "slot_index", "weight"] {
                return Err(Error::MalformedRow {
                    row: 0,
                    field: "header",
                    message: format!(
                        "expected `source,target,slot_index,weight`, got `{}`",
                        got.join(",")
                    ),
                });
            }
        }
    }
    let mut by_slot: BTreeMap<usize, BTreeMap<(String, String), u32>> = BTreeMap::new();
    for (i, row) in csv_reader.records().enumerate() {
        let row = row?;
        let data_row = i + 1;
        let slot: usize = row
            .get(2)
            .and_then(|s| s.parse().ok())
            .ok_or(Error::MalformedRow {
                row: data_row,
                field: "slot_index",
                message: "not a non-negative integer".to_string(),
            })?;
        let weight: u32 = row
            .get(3)
            .and_then(|s| s.parse().ok())
            .ok_or(Error::MalformedRow {
                row: data_row,
                field: "weight",
                message: "not a non-negative integer".to_string(),
            })?;
        let source = row[0].to_string();
        let target = row[1].to_string();
        if source == target {
            continue;
        }
        *by_slot
            .entry(slot)
            .or_default()
            .entry((source, target))
            .or_insert(0) += weight;
    }
    let slot_count = by_slot.keys().next_back().map_or(0, |last| last + 1);
    let mut snapshots = Vec::with_capacity(slot_count);
    for slot in 0..slot_count {
        let mut counts = by_slot.remove(&slot).unwrap_or_default();
        counts.retain(|_, w| *w >= min_edge_weight);
        let mut nodes = BTreeSet::new();
        for (s, t) in counts.keys() {
            nodes.insert(s.clone());
            nodes.insert(t.clone());
        }
        snapshots.push(SnapshotGraph {
            slot_index: slot,
            nodes,
            edges: counts,
        });
    }
    Ok(snapshots)
}
