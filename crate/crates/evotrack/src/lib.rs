//! EvoTrack tracks how overlapping social groups evolve in temporal
//! interaction networks.
//!
//! The pipeline ingests timestamped `commenter -> author` interaction logs,
//! cuts them into (optionally overlapping) time slots, builds one
//! thresholded directed graph per slot, extracts overlapping communities by
//! directed k-clique percolation, and then labels how groups change from
//! slot to slot with two independent classifiers:
//!
//! * stable-group change identification over timelines that persist for a
//!   minimum number of slots (split, deletion, merge, addition,
//!   split_merge, decay, constancy, change_size), and
//! * inclusion-based group evolution discovery over all groups
//!   (continuing, growing, shrinking, merging, splitting, dissolving,
//!   forming).
//!
//! A comparison harness aligns the two event streams, a statistics module
//! reproduces the usual descriptive tables, and a synthetic-scenario
//! generator renders interaction logs with planted evolution events plus
//! the ground-truth event list they must yield.
//!
//! Start with the runnable examples (`cargo run --example full_pipeline`)
//! or the `evotrack` binary, which exposes every stage as a subcommand.

pub mod analytics;
pub mod config;
pub mod cpm;
pub mod error;
pub mod event;
pub mod ged;
pub mod ingest;
pub mod io;
pub mod pipeline;
pub mod sgci;
pub mod synth;
pub mod tracking;

pub use config::PipelineConfig;
pub use cpm::{Community, CommunityId};
pub use error::{Error, Result};
pub use event::{EventKind, EvolutionEvent, Method};
pub use ingest::{InteractionRecord, SlotSpec, SnapshotGraph};
pub use tracking::{GroupTimeline, TransitionCandidate};
