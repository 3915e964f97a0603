//! Thin command-line front end: every pipeline stage as a subcommand, plus
//! `run` for the whole chain. All logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use evotrack::config::PipelineConfig;
use evotrack::error::{Error, Result};
use evotrack::io;
use evotrack::pipeline::{
    resolve_threads, run_pipeline, stage_compare, stage_events_ged, stage_events_sgci,
    stage_extract, stage_ingest, stage_stats, stage_synth, stage_track, with_thread_pool,
};
use evotrack::synth::{scenarios, ScenarioScript};

#[derive(Parser)]
#[command(
    name = "evotrack",
    about = "Track the evolution of overlapping social groups in temporal interaction networks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Pipeline parameters; flags override values from `--config`.
#[derive(Args, Debug, Default)]
struct ConfigArgs {
    /// JSON config file with flat keys mirroring these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Slot window length in days.
    #[arg(long)]
    slot_days: Option<u32>,
    /// Slot step in days; equal to the length gives disjoint windows.
    #[arg(long)]
    slot_step_days: Option<u32>,
    /// Slot-0 window start (`YYYY-MM-DD` or UTC seconds); defaults to the
    /// earliest record's midnight.
    #[arg(long)]
    origin: Option<String>,
    /// Minimum comment count for an edge to survive.
    #[arg(long)]
    min_edge_weight: Option<u32>,
    /// Clique sizes to run, comma separated (e.g. 3,4,5).
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// directed (transitive tournament) or undirected.
    #[arg(long)]
    clique_mode: Option<String>,
    /// Optional clique-intensity floor (geometric mean of edge weights).
    #[arg(long)]
    clique_intensity: Option<f64>,
    /// Modified-Jaccard acceptance threshold.
    #[arg(long)]
    mj_threshold: Option<f64>,
    /// Plain-Jaccard guard threshold.
    #[arg(long)]
    jaccard_min: Option<f64>,
    /// mj_only or mj_and_jaccard.
    #[arg(long)]
    condition: Option<String>,
    /// Slots a timeline must span to count as stable.
    #[arg(long)]
    stability_min_slots: Option<usize>,
    /// Branch-size ratio for deletion/addition.
    #[arg(long)]
    size_ratio: Option<f64>,
    /// Largest size change still labelled constancy.
    #[arg(long)]
    constancy_delta: Option<u32>,
    /// Forward inclusion threshold.
    #[arg(long)]
    alpha: Option<f64>,
    /// Backward inclusion threshold.
    #[arg(long)]
    beta: Option<f64>,
    /// Size difference still labelled continuing.
    #[arg(long)]
    ged_continuity_delta: Option<u32>,
    /// uniform, in_degree, or total_degree.
    #[arg(long)]
    importance: Option<String>,
    /// Input is pre-aggregated `source,target,slot_index,weight`.
    #[arg(long)]
    pre_aggregated: bool,
    /// Seed for synthetic generation.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker cap (also via EVOTRACK_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

impl ConfigArgs {
    fn build(&self) -> Result<PipelineConfig> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::from_json_file(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.slot_days {
            config.slot_days = v;
        }
        if let Some(v) = self.slot_step_days {
            config.slot_step_days = v;
        }
        if let Some(v) = &self.origin {
            config.origin = Some(v.clone());
        }
        if let Some(v) = self.min_edge_weight {
            config.min_edge_weight = v;
        }
        if let Some(v) = &self.k {
            config.k = v.clone();
        }
        if let Some(v) = &self.clique_mode {
            config.clique_mode = v.parse()?;
        }
        if let Some(v) = self.clique_intensity {
            config.clique_intensity = Some(v);
        }
        if let Some(v) = self.mj_threshold {
            config.mj_threshold = v;
        }
        if let Some(v) = self.jaccard_min {
            config.jaccard_min = v;
        }
        if let Some(v) = &self.condition {
            config.condition = v.parse()?;
        }
        if let Some(v) = self.stability_min_slots {
            config.stability_min_slots = v;
        }
        if let Some(v) = self.size_ratio {
            config.size_ratio = v;
        }
        if let Some(v) = self.constancy_delta {
            config.constancy_delta = v;
        }
        if let Some(v) = self.alpha {
            config.alpha = v;
        }
        if let Some(v) = self.beta {
            config.beta = v;
        }
        if let Some(v) = self.ged_continuity_delta {
            config.ged_continuity_delta = v;
        }
        if let Some(v) = &self.importance {
            config.importance = v.parse()?;
        }
        if self.pre_aggregated {
            config.pre_aggregated = true;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.threads {
            config.threads = Some(v);
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run every stage over an interaction log.
    Run {
        /// Interaction CSV (`source,target,timestamp`).
        #[arg(long)]
        input: PathBuf,
        /// Output directory for all artifacts.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Parse the log and write per-slot snapshot graphs.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Extract communities from the snapshot dump.
    Extract {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Evaluate cross-slot continuations.
    Track {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Label stable-group transitions.
    EventsSgci {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Classify all group pairs with the inclusion rules.
    EventsGed {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Emit descriptive-statistics tables.
    Stats {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Align the two event dumps and report matches and misses.
    Compare {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Render a scenario script into an interaction log.
    Synth {
        /// Scenario script JSON.
        #[arg(long, conflicts_with = "builtin")]
        scenario: Option<PathBuf>,
        /// Name of a built-in scenario (see --list).
        #[arg(long)]
        builtin: Option<String>,
        /// List built-in scenarios and exit.
        #[arg(long)]
        list: bool,
        #[arg(long, required_unless_present = "list")]
        out: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

fn load_scenario(
    scenario: &Option<PathBuf>,
    builtin: &Option<String>,
    cfg: &ConfigArgs,
) -> Result<ScenarioScript> {
    let mut script = match (scenario, builtin) {
        (Some(path), _) => io::read_json::<ScenarioScript>(path)?,
        (None, Some(name)) => scenarios::by_name(name).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown built-in scenario `{name}` (try --list)"))
        })?,
        (None, None) => {
            return Err(Error::InvalidParameter(
                "synth needs --scenario or --builtin".to_string(),
            ))
        }
    };
    if let Some(seed) = cfg.seed {
        script.seed = seed;
    }
    Ok(script)
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run { input, out, cfg } => {
            let config = cfg.build()?;
            run_pipeline(&input, &out, &config)?;
            println!("pipeline complete; artifacts in {}", out.display());
        }
        Command::Ingest { input, out, cfg } => {
            let config = cfg.build()?;
            let meta = with_thread_pool(resolve_threads(&config), || {
                stage_ingest(&input, &out, &config).map_err(|e| e.in_stage("ingest"))
            })?;
            println!(
                "ingested {} records into {} slots",
                meta.record_count, meta.slot_count
            );
        }
        Command::Extract { out, cfg } => {
            let config = cfg.build()?;
            with_thread_pool(resolve_threads(&config), || {
                stage_extract(&out, &config).map_err(|e| e.in_stage("extract"))
            })?;
            println!(
                "communities written to {}",
                out.join(io::COMMUNITIES_FILE).display()
            );
        }
        Command::Track { out, cfg } => {
            let config = cfg.build()?;
            with_thread_pool(resolve_threads(&config), || {
                stage_track(&out, &config).map_err(|e| e.in_stage("track"))
            })?;
            println!(
                "transitions written to {}",
                out.join(io::TRANSITIONS_FILE).display()
            );
        }
        Command::EventsSgci { out, cfg } => {
            let config = cfg.build()?;
            stage_events_sgci(&out, &config).map_err(|e| e.in_stage("events-sgci"))?;
            println!(
                "events written to {}",
                out.join(io::EVENTS_SGCI_FILE).display()
            );
        }
        Command::EventsGed { out, cfg } => {
            let config = cfg.build()?;
            stage_events_ged(&out, &config).map_err(|e| e.in_stage("events-ged"))?;
            println!(
                "events written to {}",
                out.join(io::EVENTS_GED_FILE).display()
            );
        }
        Command::Stats { out, cfg } => {
            let config = cfg.build()?;
            stage_stats(&out, &config).map_err(|e| e.in_stage("stats"))?;
            println!("reports written to {}", out.display());
        }
        Command::Compare { out, cfg } => {
            let config = cfg.build()?;
            stage_compare(&out, &config).map_err(|e| e.in_stage("compare"))?;
            println!("comparison written to {}", out.display());
        }
        Command::Synth {
            scenario,
            builtin,
            list,
            out,
            cfg,
        } => {
            if list {
                for script in scenarios::suite() {
                    println!("{}", script.name);
                }
                return Ok(());
            }
            let script = load_scenario(&scenario, &builtin, &cfg)?;
            let out = out.expect("clap enforces --out unless --list");
            stage_synth(&script, &out).map_err(|e| e.in_stage("synth"))?;
            println!(
                "scenario `{}` rendered to {}",
                script.name,
                out.join(io::RECORDS_FILE).display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::FAILURE
        }
    }
}
