//! Stage orchestration. Every stage reads the previous stage's dump files
//! from the output directory and writes its own, so a full run and the
//! same stages invoked one by one produce byte-identical artifacts.

use std::path::Path;

use rayon::prelude::*;

use crate::analytics::{
    compare_methods, event_counts, group_size_distribution, membership_counts,
    transition_overlap_distribution, within_slot_overlap, CompareContext, HistogramSpec,
    MembershipCounts,
};
use crate::config::PipelineConfig;
use crate::cpm::{extract_communities, Community};
use crate::error::{Error, Result};
use crate::event::{EvolutionEvent, Method};
use crate::ged::classify_ged;
use crate::ingest::{
    assign_slots, build_snapshots, default_origin, parse_interactions, parse_preaggregated,
    SlotSpec,
};
use crate::io::{self, RunMeta};
use crate::sgci::classify_sgci;
use crate::synth::{render_scenario, ScenarioScript};
use crate::tracking::{
    assemble_timelines, match_continuations, GroupTimeline, TransitionCandidate,
};

/// Worker cap: the explicit config value, else `EVOTRACK_THREADS`.
pub fn resolve_threads(config: &PipelineConfig) -> Option<usize> {
    config.threads.or_else(|| {
        std::env::var("EVOTRACK_THREADS")
            .ok()
            .and_then(|raw| raw.parse().ok())
    })
}

/// Run `f` inside a rayon pool capped at `threads`, or on the default pool
/// when no cap is set. Outputs do not depend on the pool size.
pub fn with_thread_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> Result<T> + Send,
) -> Result<T> {
    match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(f)
        }
        _ => f(),
    }
}

/// Render a scenario script into `records.csv` plus a script echo.
pub fn stage_synth(script: &ScenarioScript, out: &Path) -> Result<()> {
    let records = render_scenario(script)?;
    std::fs::create_dir_all(out)?;
    io::write_records(&io::artifact(out, io::RECORDS_FILE), &records)?;
    io::write_json(&io::artifact(out, "scenario.json"), script)?;
    Ok(())
}

/// Parse the interaction log, window it, and write the per-slot snapshot
/// dump plus run metadata and the config echo.
pub fn stage_ingest(input: &Path, out: &Path, config: &PipelineConfig) -> Result<RunMeta> {
    config.validate()?;
    std::fs::create_dir_all(out)?;
    if !input.exists() {
        return Err(Error::MissingArtifact(input.to_path_buf()));
    }
    let file = std::fs::File::open(input)?;
    let meta = if config.pre_aggregated {
        let snapshots = parse_preaggregated(file, config.min_edge_weight)?;
        let meta = RunMeta {
            slot_count: snapshots.len(),
            // Rows of a pre-aggregated file are edges, not single comments.
            record_count: 0,
            origin: None,
            timestamp_format: None,
            pre_aggregated: true,
        };
        io::write_snapshots(&io::artifact(out, io::SNAPSHOTS_FILE), &snapshots)?;
        meta
    } else {
        let (records, format) = parse_interactions(file)?;
        let origin = match config.origin_seconds()? {
            Some(origin) => origin,
            None => default_origin(&records).unwrap_or(0),
        };
        let spec = SlotSpec::from_days(origin, config.slot_days, config.slot_step_days)?;
        let slotted = assign_slots(&records, &spec)?;
        let snapshots = build_snapshots(&slotted, config.min_edge_weight);
        let meta = RunMeta {
            slot_count: slotted.len(),
            record_count: records.len(),
            origin: Some(origin),
            timestamp_format: Some(format),
            pre_aggregated: false,
        };
        io::write_snapshots(&io::artifact(out, io::SNAPSHOTS_FILE), &snapshots)?;
        meta
    };
    io::write_meta(out, &meta)?;
    io::write_config(out, config)?;
    Ok(meta)
}

/// Extract communities for every (slot, k) from the snapshot dump.
pub fn stage_extract(out: &Path, config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    let meta = io::read_meta(out)?;
    let snapshots = io::read_snapshots(&io::artifact(out, io::SNAPSHOTS_FILE), meta.slot_count)?;
    let jobs: Vec<(u32, usize)> = config
        .k
        .iter()
        .flat_map(|&k| (0..snapshots.len()).map(move |slot| (k, slot)))
        .collect();
    let extracted: Vec<Vec<Community>> = jobs
        .par_iter()
        .map(|&(k, slot)| {
            extract_communities(
                &snapshots[slot],
                k as usize,
                config.clique_mode,
                config.clique_intensity,
            )
        })
        .collect::<Result<_>>()?;
    let communities: Vec<Community> = extracted.into_iter().flatten().collect();
    io::write_communities(&io::artifact(out, io::COMMUNITIES_FILE), &communities)?;
    io::write_config(out, config)?;
    Ok(())
}

fn communities_for_k(communities: &[Community], k: usize) -> Vec<Community> {
    communities.iter().filter(|c| c.k == k).cloned().collect()
}

fn by_slot(communities: &[Community], slot_count: usize) -> Vec<Vec<Community>> {
    let mut slots: Vec<Vec<Community>> = vec![Vec::new(); slot_count];
    for community in communities {
        if community.slot_index < slot_count {
            slots[community.slot_index].push(community.clone());
        }
    }
    slots
}

fn candidates_for_k(candidates: &[TransitionCandidate], k: usize) -> Vec<TransitionCandidate> {
    candidates
        .iter()
        .filter(|c| c.from.k as usize == k)
        .cloned()
        .collect()
}

fn events_for_k(events: &[EvolutionEvent], k: usize) -> Vec<EvolutionEvent> {
    events
        .iter()
        .filter(|e| {
            e.from_ids
                .iter()
                .chain(e.to_ids.iter())
                .next()
                .is_some_and(|id| id.k as usize == k)
        })
        .cloned()
        .collect()
}

/// Evaluate every consecutive-slot community pair and write the transition
/// dump (every evaluated pair, accepted or not).
pub fn stage_track(out: &Path, config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    let meta = io::read_meta(out)?;
    let communities = io::read_communities(&io::artifact(out, io::COMMUNITIES_FILE))?;
    let params = config.match_params();
    let mut candidates = Vec::new();
    for &k in &config.k {
        let for_k = communities_for_k(&communities, k as usize);
        let slots = by_slot(&for_k, meta.slot_count);
        let per_pair: Vec<Vec<TransitionCandidate>> = (0..meta.slot_count.saturating_sub(1))
            .into_par_iter()
            .map(|t| match_continuations(&slots[t], &slots[t + 1], &params))
            .collect::<Result<_>>()?;
        candidates.extend(per_pair.into_iter().flatten());
    }
    io::write_transitions(&io::artifact(out, io::TRANSITIONS_FILE), &candidates)?;
    io::write_config(out, config)?;
    Ok(())
}

fn timelines_for_k(
    candidates: &[TransitionCandidate],
    communities: &[Community],
    config: &PipelineConfig,
) -> Vec<GroupTimeline> {
    assemble_timelines(candidates, communities, config.stability_min_slots)
}

/// Label stable-group transitions and write the SGCI event dump.
pub fn stage_events_sgci(out: &Path, config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    let meta = io::read_meta(out)?;
    let communities = io::read_communities(&io::artifact(out, io::COMMUNITIES_FILE))?;
    let candidates = io::read_transitions(&io::artifact(out, io::TRANSITIONS_FILE))?;
    let mut events = Vec::new();
    for &k in &config.k {
        let for_k = communities_for_k(&communities, k as usize);
        let candidates_k = candidates_for_k(&candidates, k as usize);
        let timelines = timelines_for_k(&candidates_k, &for_k, config);
        let accepted: Vec<TransitionCandidate> = candidates_k
            .iter()
            .filter(|c| c.accepted)
            .cloned()
            .collect();
        events.extend(classify_sgci(
            &accepted,
            &for_k,
            &timelines,
            meta.slot_count,
            &config.sgci_params(),
        )?);
    }
    io::write_events(
        &io::artifact(out, io::EVENTS_SGCI_FILE),
        &events,
        Method::Sgci,
    )?;
    io::write_config(out, config)?;
    Ok(())
}

/// Classify all group pairs with the inclusion rules and write the GED
/// event dump.
pub fn stage_events_ged(out: &Path, config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    let meta = io::read_meta(out)?;
    let communities = io::read_communities(&io::artifact(out, io::COMMUNITIES_FILE))?;
    let snapshots = io::read_snapshots(&io::artifact(out, io::SNAPSHOTS_FILE), meta.slot_count)?;
    let mut events = Vec::new();
    for &k in &config.k {
        let for_k = communities_for_k(&communities, k as usize);
        events.extend(classify_ged(
            &for_k,
            &snapshots,
            meta.slot_count,
            &config.ged_params(),
        )?);
    }
    io::write_events(
        &io::artifact(out, io::EVENTS_GED_FILE),
        &events,
        Method::Ged,
    )?;
    io::write_config(out, config)?;
    Ok(())
}

#[derive(Debug, serde::Serialize)]
struct StatsReport {
    k: usize,
    slot_count: usize,
    group_sizes: HistogramSpec,
    transition_overlap: HistogramSpec,
    transition_overlap_accepted: HistogramSpec,
    within_slot_overlap: HistogramSpec,
    membership: MembershipCounts,
    sgci_event_counts: std::collections::BTreeMap<String, usize>,
    ged_event_counts: std::collections::BTreeMap<String, usize>,
}

/// Emit the descriptive-statistics tables per k, as flat CSVs plus one
/// nested JSON.
pub fn stage_stats(out: &Path, config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    let meta = io::read_meta(out)?;
    let communities = io::read_communities(&io::artifact(out, io::COMMUNITIES_FILE))?;
    let candidates = io::read_transitions(&io::artifact(out, io::TRANSITIONS_FILE))?;
    let sgci_events = io::read_events(&io::artifact(out, io::EVENTS_SGCI_FILE))?;
    let ged_events = io::read_events(&io::artifact(out, io::EVENTS_GED_FILE))?;
    for &k in &config.k {
        let k = k as usize;
        let for_k = communities_for_k(&communities, k);
        let candidates_k = candidates_for_k(&candidates, k);
        let timelines = timelines_for_k(&candidates_k, &for_k, config);
        let sgci_k = events_for_k(&sgci_events, k);
        let ged_k = events_for_k(&ged_events, k);

        let group_sizes = group_size_distribution(&for_k, meta.slot_count);
        let overlap_all = transition_overlap_distribution(&candidates_k, &for_k, false);
        let overlap_accepted = transition_overlap_distribution(&candidates_k, &for_k, true);
        let within = within_slot_overlap(&for_k, meta.slot_count);
        let membership = membership_counts(&for_k, &timelines, meta.slot_count);
        let sgci_counts = event_counts(&sgci_k, Method::Sgci);
        let ged_counts = event_counts(&ged_k, Method::Ged);

        io::write_histogram(
            &out.join(io::report_csv_name("group_sizes", k)),
            &group_sizes,
        )?;
        io::write_histogram(
            &out.join(io::report_csv_name("transition_overlap", k)),
            &overlap_all,
        )?;
        io::write_histogram(
            &out.join(io::report_csv_name("transition_overlap_accepted", k)),
            &overlap_accepted,
        )?;
        io::write_histogram(
            &out.join(io::report_csv_name("within_slot_overlap", k)),
            &within,
        )?;
        io::write_membership(
            &out.join(io::report_csv_name("membership", k)),
            &out.join(io::report_csv_name("membership_summary", k)),
            &membership,
        )?;
        io::write_event_counts(
            &out.join(io::report_csv_name("event_counts", k)),
            &sgci_counts,
            &ged_counts,
        )?;
        let report = StatsReport {
            k,
            slot_count: meta.slot_count,
            group_sizes,
            transition_overlap: overlap_all,
            transition_overlap_accepted: overlap_accepted,
            within_slot_overlap: within,
            membership,
            sgci_event_counts: sgci_counts
                .into_iter()
                .map(|(kind, n)| (kind.as_str().to_string(), n))
                .collect(),
            ged_event_counts: ged_counts
                .into_iter()
                .map(|(kind, n)| (kind.as_str().to_string(), n))
                .collect(),
        };
        io::write_json(&out.join(format!("report_stats_{k}.json")), &report)?;
    }
    io::write_config(out, config)?;
    Ok(())
}

/// Align the two event dumps per k and write the comparison report.
pub fn stage_compare(out: &Path, config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    let meta = io::read_meta(out)?;
    let sgci_events = io::read_events(&io::artifact(out, io::EVENTS_SGCI_FILE))?;
    let ged_events = io::read_events(&io::artifact(out, io::EVENTS_GED_FILE))?;
    let communities = io::read_communities(&io::artifact(out, io::COMMUNITIES_FILE))?;
    let candidates = io::read_transitions(&io::artifact(out, io::TRANSITIONS_FILE))?;
    let snapshots = io::read_snapshots(&io::artifact(out, io::SNAPSHOTS_FILE), meta.slot_count)?;
    for &k in &config.k {
        let k = k as usize;
        let for_k = communities_for_k(&communities, k);
        let candidates_k = candidates_for_k(&candidates, k);
        let timelines = timelines_for_k(&candidates_k, &for_k, config);
        let ctx = CompareContext {
            communities: &for_k,
            timelines: &timelines,
            graphs: &snapshots,
            ged_params: config.ged_params(),
            k,
        };
        let report = compare_methods(
            &events_for_k(&sgci_events, k),
            &events_for_k(&ged_events, k),
            &ctx,
        )?;
        io::write_comparison_csv(&out.join(io::report_csv_name("comparison", k)), &report)?;
        io::write_json(&out.join(format!("report_comparison_{k}.json")), &report)?;
    }
    io::write_config(out, config)?;
    Ok(())
}

/// Run every stage in order over one input file. Rerunning with the same
/// input and config rewrites byte-identical artifacts.
pub fn run_pipeline(input: &Path, out: &Path, config: &PipelineConfig) -> Result<()> {
    config.validate()?;
    with_thread_pool(resolve_threads(config), || {
        stage_ingest(input, out, config).map_err(|e| e.in_stage("ingest"))?;
        stage_extract(out, config).map_err(|e| e.in_stage("extract"))?;
        stage_track(out, config).map_err(|e| e.in_stage("track"))?;
        stage_events_sgci(out, config).map_err(|e| e.in_stage("events-sgci"))?;
        stage_events_ged(out, config).map_err(|e| e.in_stage("events-ged"))?;
        stage_stats(out, config).map_err(|e| e.in_stage("stats"))?;
        stage_compare(out, config).map_err(|e| e.in_stage("compare"))?;
        Ok(())
    })
}
