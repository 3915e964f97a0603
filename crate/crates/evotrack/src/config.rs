//! Declarative pipeline configuration.
//!
//! Defaults: 30-day slots stepped every 15 days, edge weight threshold 2,
//! k in 3..=5, modified Jaccard threshold 0.5 with the 0.01 plain-Jaccard
//! guard, three-slot stability, size ratio 10, constancy delta 3, and
//! inclusion thresholds 0.5/0.5.

use serde::{Deserialize, Serialize};

use crate::cpm::CliqueMode;
use crate::error::{Error, Result};
use crate::ged::{GedParams, ImportanceKind};
use crate::sgci::SgciParams;
use crate::tracking::{ConditionMode, MatchParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub slot_days: u32,
    pub slot_step_days: u32,
    /// Slot-0 window start as `YYYY-MM-DD` or UTC seconds; when absent, the
    /// earliest record truncated to midnight UTC.
    pub origin: Option<String>,
    pub min_edge_weight: u32,
    pub k: Vec<u32>,
    pub clique_mode: CliqueMode,
    /// Optional clique-intensity floor (geometric mean of member edge
    /// weights); cliques below it are pruned. Off by default.
    pub clique_intensity: Option<f64>,
    pub mj_threshold: f64,
    pub jaccard_min: f64,
    pub condition: ConditionMode,
    pub stability_min_slots: usize,
    pub size_ratio: f64,
    pub constancy_delta: u32,
    pub alpha: f64,
    pub beta: f64,
    pub ged_continuity_delta: u32,
    pub importance: ImportanceKind,
    /// Treat the input as pre-aggregated `source,target,slot_index,weight`.
    pub pre_aggregated: bool,
    /// Seed for synthetic generation; the analysis pipeline itself is
    /// randomness-free.
    pub seed: u64,
    /// Worker cap; `None` defers to `EVOTRACK_THREADS` or the default pool.
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            slot_days: 30,
            slot_step_days: 15,
            origin: None,
            min_edge_weight: 2,
            k: vec![3, 4, 5],
            clique_mode: CliqueMode::Directed,
            clique_intensity: None,
            mj_threshold: 0.5,
            jaccard_min: 0.01,
            condition: ConditionMode::MjAndJaccard,
            stability_min_slots: 3,
            size_ratio: 10.0,
            constancy_delta: 3,
            alpha: 0.5,
            beta: 0.5,
            ged_continuity_delta: 0,
            importance: ImportanceKind::Uniform,
            pre_aggregated: false,
            seed: 0,
            threads: None,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.slot_days == 0 || self.slot_step_days == 0 || self.slot_step_days > self.slot_days {
            return Err(Error::InvalidParameter(format!(
                "slot step must satisfy 0 < step <= length (got {}/{} days)",
                self.slot_days, self.slot_step_days
            )));
        }
        if self.min_edge_weight == 0 {
            return Err(Error::InvalidParameter(
                "min_edge_weight must be >= 1".to_string(),
            ));
        }
        if self.k.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one k required".to_string(),
            ));
        }
        if let Some(bad) = self.k.iter().find(|&&k| k < 3) {
            return Err(Error::InvalidParameter(format!(
                "k must be >= 3 (got {bad})"
            )));
        }
        if self.stability_min_slots == 0 {
            return Err(Error::InvalidParameter(
                "stability_min_slots must be >= 1".to_string(),
            ));
        }
        if let Some(intensity) = self.clique_intensity {
            if intensity < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "clique_intensity must be >= 0 (got {intensity})"
                )));
            }
        }
        self.match_params().validate()?;
        self.sgci_params().validate()?;
        self.ged_params().validate()?;
        self.origin_seconds()?;
        Ok(())
    }

    pub fn match_params(&self) -> MatchParams {
        MatchParams {
            mj_threshold: self.mj_threshold,
            jaccard_min: self.jaccard_min,
            condition: self.condition,
        }
    }

    pub fn sgci_params(&self) -> SgciParams {
        SgciParams {
            size_ratio: self.size_ratio,
            constancy_delta: self.constancy_delta,
        }
    }

    pub fn ged_params(&self) -> GedParams {
        GedParams {
            alpha: self.alpha,
            beta: self.beta,
            metric: self.importance,
            continuity_delta: self.ged_continuity_delta,
        }
    }

    /// The configured origin as UTC seconds, when one is set.
    pub fn origin_seconds(&self) -> Result<Option<i64>> {
        let raw = match &self.origin {
            Some(raw) => raw.trim(),
            None => return Ok(None),
        };
        if let Ok(seconds) = raw.parse::<i64>() {
            return Ok(Some(seconds));
        }
        if let Ok(date) = chrono::NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
            return Ok(Some(
                date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp(),
            ));
        }
        Err(Error::InvalidParameter(format!(
            "origin `{raw}` is neither UTC seconds nor YYYY-MM-DD"
        )))
    }

    /// Load from a JSON file with flat keys mirroring the flag names.
    pub fn from_json_file(path: &std::path::Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|_| Error::MissingArtifact(path.to_path_buf()))?;
        let config: PipelineConfig = serde_json::from_str(&text)?;
        Ok(config)
    }
}
