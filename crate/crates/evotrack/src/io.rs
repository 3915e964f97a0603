//! Stage artifact files: the CSV dumps each pipeline stage writes and the
//! next one consumes, plus the JSON config echo and run metadata.
//!
//! All writes go through a temp file renamed into place on success, so a
//! failing stage never leaves a partial artifact. Floating-point columns
//! use the shortest round-trip representation, which keeps re-parsed
//! measures bit-identical.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::analytics::{ComparisonReport, HistogramSpec, MembershipCounts};
use crate::config::PipelineConfig;
use crate::cpm::{Community, CommunityId};
use crate::error::{Error, Result};
use crate::event::{EventKind, EvolutionEvent, Method};
use crate::ingest::{SnapshotGraph, TimestampFormat};
use crate::tracking::TransitionCandidate;

pub const CONFIG_FILE: &str = "config.json";
pub const META_FILE: &str = "meta.json";
pub const RECORDS_FILE: &str = "records.csv";
pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const COMMUNITIES_FILE: &str = "communities.csv";
pub const TRANSITIONS_FILE: &str = "transitions.csv";
pub const EVENTS_SGCI_FILE: &str = "events_sgci.csv";
pub const EVENTS_GED_FILE: &str = "events_ged.csv";

/// Facts about a run that later stages need and the config does not carry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub slot_count: usize,
    pub record_count: usize,
    pub origin: Option<i64>,
    pub timestamp_format: Option<TimestampFormat>,
    pub pre_aggregated: bool,
}

fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::MissingArtifact(path.to_path_buf()))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    require(path)?;
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

pub fn write_config(out: &Path, config: &PipelineConfig) -> Result<()> {
    write_json(&out.join(CONFIG_FILE), config)
}

pub fn write_meta(out: &Path, meta: &RunMeta) -> Result<()> {
    write_json(&out.join(META_FILE), meta)
}

pub fn read_meta(out: &Path) -> Result<RunMeta> {
    read_json(&out.join(META_FILE))
}

fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    require(path)?;
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordRow {
    source: String,
    target: String,
    timestamp: i64,
}

pub fn write_records(path: &Path, records: &[crate::ingest::InteractionRecord]) -> Result<()> {
    let rows: Vec<RecordRow> = records
        .iter()
        .map(|r| RecordRow {
            source: r.source.clone(),
            target: r.target.clone(),
            timestamp: r.timestamp,
        })
        .collect();
    atomic_write(path, &csv_bytes(&rows)?)
}

#[derive(Debug, Serialize, Deserialize)]
struct SnapshotRow {
    slot_index: usize,
    source: String,
    target: String,
    weight: u32,
}

pub fn write_snapshots(path: &Path, snapshots: &[SnapshotGraph]) -> Result<()> {
    let mut rows = Vec::new();
    for snapshot in snapshots {
        for ((source, target), weight) in &snapshot.edges {
            rows.push(SnapshotRow {
                slot_index: snapshot.slot_index,
                source: source.clone(),
                target: target.clone(),
                weight: *weight,
            });
        }
    }
    atomic_write(path, &csv_bytes(&rows)?)
}

pub fn read_snapshots(path: &Path, slot_count: usize) -> Result<Vec<SnapshotGraph>> {
    let rows: Vec<SnapshotRow> = read_rows(path)?;
    let mut snapshots: Vec<SnapshotGraph> = (0..slot_count)
        .map(|slot_index| SnapshotGraph {
            slot_index,
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        })
        .collect();
    for row in rows {
        if row.slot_index >= snapshots.len() {
            snapshots.resize_with(row.slot_index + 1, || SnapshotGraph {
                slot_index: 0,
                nodes: BTreeSet::new(),
                edges: BTreeMap::new(),
            });
            for (i, snapshot) in snapshots.iter_mut().enumerate() {
                snapshot.slot_index = i;
            }
        }
        let snapshot = &mut snapshots[row.slot_index];
        snapshot.nodes.insert(row.source.clone());
        snapshot.nodes.insert(row.target.clone());
        snapshot.edges.insert((row.source, row.target), row.weight);
    }
    Ok(snapshots)
}

#[derive(Debug, Serialize, Deserialize)]
struct CommunityRow {
    slot_index: usize,
    k: usize,
    community_id: String,
    member: String,
}

pub fn write_communities(path: &Path, communities: &[Community]) -> Result<()> {
    let mut rows = Vec::new();
    for community in communities {
        for member in &community.members {
            rows.push(CommunityRow {
                slot_index: community.slot_index,
                k: community.k,
                community_id: community.id.to_string(),
                member: member.clone(),
            });
        }
    }
    atomic_write(path, &csv_bytes(&rows)?)
}

pub fn read_communities(path: &Path) -> Result<Vec<Community>> {
    let rows: Vec<CommunityRow> = read_rows(path)?;
    let mut grouped: BTreeMap<CommunityId, Community> = BTreeMap::new();
    for row in rows {
        let id: CommunityId = row.community_id.parse()?;
        if id.slot as usize != row.slot_index || id.k as usize != row.k {
            return Err(Error::Mismatch(format!(
                "community row for {id} disagrees with slot {} / k {}",
                row.slot_index, row.k
            )));
        }
        grouped
            .entry(id)
            .or_insert_with(|| Community {
                id,
                slot_index: row.slot_index,
                k: row.k,
                members: Vec::new(),
            })
            .members
            .push(row.member);
    }
    let mut communities: Vec<Community> = grouped.into_values().collect();
    for community in &mut communities {
        community.members.sort();
    }
    communities.sort_by_key(|c| (c.k, c.id));
    Ok(communities)
}

#[derive(Debug, Serialize, Deserialize)]
struct TransitionRow {
    slot: usize,
    k: usize,
    from_id: String,
    to_id: String,
    mj: f64,
    jaccard: f64,
    accepted: bool,
}

pub fn write_transitions(path: &Path, candidates: &[TransitionCandidate]) -> Result<()> {
    let rows: Vec<TransitionRow> = candidates
        .iter()
        .map(|c| TransitionRow {
            slot: c.from.slot as usize,
            k: c.from.k as usize,
            from_id: c.from.to_string(),
            to_id: c.to.to_string(),
            mj: c.mj,
            jaccard: c.jaccard,
            accepted: c.accepted,
        })
        .collect();
    atomic_write(path, &csv_bytes(&rows)?)
}

pub fn read_transitions(path: &Path) -> Result<Vec<TransitionCandidate>> {
    let rows: Vec<TransitionRow> = read_rows(path)?;
    rows.into_iter()
        .map(|row| {
            Ok(TransitionCandidate {
                from: row.from_id.parse()?,
                to: row.to_id.parse()?,
                mj: row.mj,
                jaccard: row.jaccard,
                accepted: row.accepted,
            })
        })
        .collect()
}

fn join_ids(ids: &[CommunityId]) -> String {
    ids.iter()
        .map(|id| id.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn split_ids(joined: &str) -> Result<Vec<CommunityId>> {
    if joined.is_empty() {
        return Ok(Vec::new());
    }
    joined.split(';').map(|part| part.parse()).collect()
}

/// Measure column names for a method's event dump.
fn measure_names(method: Method) -> (&'static str, &'static str) {
    match method {
        Method::Sgci => ("mj", "jaccard"),
        Method::Ged => ("i_forward", "i_backward"),
    }
}

/// Write one method's events. The two measure columns are named after the
/// method's measures (mj/jaccard or i_forward/i_backward).
pub fn write_events(path: &Path, events: &[EvolutionEvent], method: Method) -> Result<()> {
    let (name_a, name_b) = measure_names(method);
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "method",
        "event_type",
        "slot_from",
        "slot_to",
        "from_ids",
        "to_ids",
        name_a,
        name_b,
    ])?;
    for event in events {
        if event.method != method {
            return Err(Error::Mismatch(format!(
                "{} event in a {method} dump",
                event.method
            )));
        }
        let a = event
            .measures
            .get(name_a)
            .map(|v| v.to_string())
            .unwrap_or_default();
        let b = event
            .measures
            .get(name_b)
            .map(|v| v.to_string())
            .unwrap_or_default();
        writer.write_record([
            event.method.to_string().as_str(),
            event.kind.as_str(),
            &event.slot_from.to_string(),
            &event.slot_to.to_string(),
            &join_ids(&event.from_ids),
            &join_ids(&event.to_ids),
            &a,
            &b,
        ])?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e)))?;
    atomic_write(path, &bytes)
}

pub fn read_events(path: &Path) -> Result<Vec<EvolutionEvent>> {
    require(path)?;
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let mut events = Vec::new();
    for row in reader.records() {
        let row = row?;
        let get = |name: &str| -> Option<&str> {
            headers
                .iter()
                .position(|h| h == name)
                .and_then(|i| row.get(i))
        };
        let method: Method = get("method")
            .ok_or_else(|| Error::Mismatch("event dump lacks a method column".to_string()))?
            .parse()?;
        let kind: EventKind = get("event_type")
            .ok_or_else(|| Error::Mismatch("event dump lacks an event_type column".to_string()))?
            .parse()?;
        let slot_from: usize = get("slot_from")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Mismatch("bad slot_from".to_string()))?;
        let slot_to: usize = get("slot_to")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Mismatch("bad slot_to".to_string()))?;
        let from_ids = split_ids(get("from_ids").unwrap_or_default())?;
        let to_ids = split_ids(get("to_ids").unwrap_or_default())?;
        let mut measures = BTreeMap::new();
        let (name_a, name_b) = measure_names(method);
        for name in [name_a, name_b] {
            if let Some(raw) = get(name) {
                if !raw.is_empty() {
                    let value: f64 = raw.parse().map_err(|_| {
                        Error::Mismatch(format!("bad measure `{name}` value `{raw}`"))
                    })?;
                    measures.insert(name.to_string(), value);
                }
            }
        }
        events.push(EvolutionEvent {
            method,
            kind,
            slot_from,
            slot_to,
            from_ids,
            to_ids,
            measures,
        });
    }
    Ok(events)
}

#[derive(Debug, Serialize)]
struct HistogramRow<'a> {
    bin_low: f64,
    bin_high: f64,
    #[serde(rename = "count")]
    value: f64,
    #[serde(skip)]
    _marker: std::marker::PhantomData<&'a ()>,
}

pub fn write_histogram(path: &Path, histogram: &HistogramSpec) -> Result<()> {
    let rows: Vec<HistogramRow> = histogram
        .counts
        .iter()
        .enumerate()
        .map(|(i, &value)| HistogramRow {
            bin_low: histogram.bin_edges[i],
            bin_high: histogram.bin_edges[i + 1],
            value,
            _marker: std::marker::PhantomData,
        })
        .collect();
    atomic_write(path, &csv_bytes(&rows)?)
}

#[derive(Debug, Serialize)]
struct MembershipRow {
    slot: usize,
    users_in_1: usize,
    users_in_2: usize,
    users_in_3: usize,
}

#[derive(Debug, Serialize)]
struct MembershipSummaryRow {
    multiplicity: usize,
    first_half_mean: f64,
    first_half_std: f64,
    second_half_mean: f64,
    second_half_std: f64,
}

pub fn write_membership(
    per_slot_path: &Path,
    summary_path: &Path,
    counts: &MembershipCounts,
) -> Result<()> {
    let rows: Vec<MembershipRow> = counts
        .per_slot
        .iter()
        .enumerate()
        .map(|(slot, m)| MembershipRow {
            slot,
            users_in_1: m[0],
            users_in_2: m[1],
            users_in_3: m[2],
        })
        .collect();
    atomic_write(per_slot_path, &csv_bytes(&rows)?)?;
    let summary: Vec<MembershipSummaryRow> = counts
        .summary
        .iter()
        .enumerate()
        .map(|(i, stats)| MembershipSummaryRow {
            multiplicity: i + 1,
            first_half_mean: stats.first_mean,
            first_half_std: stats.first_std,
            second_half_mean: stats.second_mean,
            second_half_std: stats.second_std,
        })
        .collect();
    atomic_write(summary_path, &csv_bytes(&summary)?)
}

#[derive(Debug, Serialize)]
struct EventCountRow<'a> {
    method: &'a str,
    event_type: &'a str,
    count: usize,
}

pub fn write_event_counts(
    path: &Path,
    sgci: &BTreeMap<EventKind, usize>,
    ged: &BTreeMap<EventKind, usize>,
) -> Result<()> {
    let mut rows = Vec::new();
    for (kind, count) in sgci {
        rows.push(EventCountRow {
            method: "SGCI",
            event_type: kind.as_str(),
            count: *count,
        });
    }
    for (kind, count) in ged {
        rows.push(EventCountRow {
            method: "GED",
            event_type: kind.as_str(),
            count: *count,
        });
    }
    atomic_write(path, &csv_bytes(&rows)?)
}

#[derive(Debug, Serialize)]
struct ComparisonRow {
    section: String,
    label: String,
    sgci: String,
    ged: String,
}

pub fn write_comparison_csv(path: &Path, report: &ComparisonReport) -> Result<()> {
    let mut rows = Vec::new();
    for aggregate in &report.aggregates {
        rows.push(ComparisonRow {
            section: "aggregate".to_string(),
            label: aggregate.label.clone(),
            sgci: aggregate.sgci_count.to_string(),
            ged: aggregate.ged_count.to_string(),
        });
    }
    rows.push(ComparisonRow {
        section: "total".to_string(),
        label: "events".to_string(),
        sgci: report.sgci_total.to_string(),
        ged: report.ged_total.to_string(),
    });
    rows.push(ComparisonRow {
        section: "matched".to_string(),
        label: "events".to_string(),
        sgci: report.matched.to_string(),
        ged: report.matched.to_string(),
    });
    rows.push(ComparisonRow {
        section: "only_in".to_string(),
        label: "events".to_string(),
        sgci: report.only_in_sgci.len().to_string(),
        ged: report.only_in_ged.len().to_string(),
    });
    for (reason, count) in report.miss_reason_counts() {
        rows.push(ComparisonRow {
            section: "only_in_ged_reason".to_string(),
            label: reason.to_string(),
            sgci: String::new(),
            ged: count.to_string(),
        });
    }
    rows.push(ComparisonRow {
        section: "distinct_union".to_string(),
        label: "events".to_string(),
        sgci: report.distinct_union.to_string(),
        ged: report.distinct_union.to_string(),
    });
    atomic_write(path, &csv_bytes(&rows)?)
}

/// Artifact path inside an output directory.
pub fn artifact(out: &Path, name: &str) -> PathBuf {
    out.join(name)
}

pub fn report_csv_name(table: &str, k: usize) -> String {
    format!("report_{table}_{k}.csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::EvolutionEvent;
    use tempfile::tempdir;

    #[test]
    fn snapshots_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join(SNAPSHOTS_FILE);
        let mut edges = BTreeMap::new();
        edges.insert(("a".to_string(), "b".to_string()), 3);
        let snapshot = SnapshotGraph {
            slot_index: 1,
            nodes: ["a", "b"].iter().map(|s| s.to_string()).collect(),
            edges,
        };
        let empty = SnapshotGraph {
            slot_index: 0,
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        };
        write_snapshots(&path, &[empty.clone(), snapshot.clone()]).unwrap();
        let back = read_snapshots(&path, 2).unwrap();
        assert_eq!(back, vec![empty, snapshot]);
    }

    #[test]
    fn communities_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join(COMMUNITIES_FILE);
        let community = Community {
            id: CommunityId {
                slot: 2,
                k: 3,
                rank: 1,
            },
            slot_index: 2,
            k: 3,
            members: vec!["a".to_string(), "b".to_string(), "c".to_string()],
        };
        write_communities(&path, std::slice::from_ref(&community)).unwrap();
        assert_eq!(read_communities(&path).unwrap(), vec![community]);
    }

    #[test]
    fn transitions_round_trip_preserves_measure_bits() {
        let dir = tempdir().unwrap();
        let path = dir.path().join(TRANSITIONS_FILE);
        let candidate = TransitionCandidate {
            from: CommunityId {
                slot: 0,
                k: 3,
                rank: 0,
            },
            to: CommunityId {
                slot: 1,
                k: 3,
                rank: 2,
            },
            mj: 2.0 / 3.0,
            jaccard: 0.1 + 0.2,
            accepted: true,
        };
        write_transitions(&path, std::slice::from_ref(&candidate)).unwrap();
        let back = read_transitions(&path).unwrap();
        assert_eq!(back[0].mj.to_bits(), candidate.mj.to_bits());
        assert_eq!(back[0].jaccard.to_bits(), candidate.jaccard.to_bits());
    }

    #[test]
    fn events_round_trip_with_method_columns() {
        let dir = tempdir().unwrap();
        let sgci_path = dir.path().join(EVENTS_SGCI_FILE);
        let mut measures = BTreeMap::new();
        measures.insert("mj".to_string(), 0.75);
        measures.insert("jaccard".to_string(), 1.0 / 3.0);
        let event = EvolutionEvent::new(
            EventKind::Split,
            4,
            vec![CommunityId {
                slot: 4,
                k: 3,
                rank: 0,
            }],
            vec![CommunityId {
                slot: 5,
                k: 3,
                rank: 1,
            }],
            measures,
        );
        let decay = EvolutionEvent::new(
            EventKind::Decay,
            4,
            vec![CommunityId {
                slot: 4,
                k: 3,
                rank: 2,
            }],
            Vec::new(),
            BTreeMap::new(),
        );
        write_events(&sgci_path, &[event.clone(), decay.clone()], Method::Sgci).unwrap();
        let text = std::fs::read_to_string(&sgci_path).unwrap();
        assert!(text.starts_with("method,event_type,slot_from,slot_to,from_ids,to_ids,mj,jaccard"));
        let back = read_events(&sgci_path).unwrap();
        assert_eq!(back, vec![event, decay]);

        let ged_path = dir.path().join(EVENTS_GED_FILE);
        let mut measures = BTreeMap::new();
        measures.insert("i_forward".to_string(), 0.25);
        measures.insert("i_backward".to_string(), 1.0);
        let ged_event = EvolutionEvent::new(
            EventKind::Splitting,
            4,
            vec![CommunityId {
                slot: 4,
                k: 3,
                rank: 0,
            }],
            vec![CommunityId {
                slot: 5,
                k: 3,
                rank: 1,
            }],
            measures,
        );
        write_events(&ged_path, std::slice::from_ref(&ged_event), Method::Ged).unwrap();
        let text = std::fs::read_to_string(&ged_path).unwrap();
        assert!(text.contains("i_forward,i_backward"));
        assert_eq!(read_events(&ged_path).unwrap(), vec![ged_event]);
    }

    #[test]
    fn missing_artifact_error_names_the_file() {
        let dir = tempdir().unwrap();
        let path = dir.path().join(TRANSITIONS_FILE);
        match read_transitions(&path) {
            Err(Error::MissingArtifact(p)) => assert_eq!(p, path),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_method_in_dump_is_rejected() {
        let dir = tempdir().unwrap();
        let event = EvolutionEvent::new(
            EventKind::Forming,
            0,
            Vec::new(),
            vec![CommunityId {
                slot: 1,
                k: 3,
                rank: 0,
            }],
            BTreeMap::new(),
        );
        assert!(write_events(&dir.path().join("x.csv"), &[event], Method::Sgci).is_err());
    }
}
