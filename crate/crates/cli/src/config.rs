//! Self-contained experiment configuration.
//!
//! One JSON document drives a whole experiment; every output embeds the
//! fully-resolved form (defaults expanded, seeds enumerated) so a run can be
//! reproduced from its own artifacts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use wfc_core::completers::{CompleterConfig, SvtOptions};
use wfc_core::hamiltonian::HamiltonianSpec;

use crate::RunError;

/// Seed list, either explicit or `base..base+count`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Range { base: u64, count: usize },
}

impl SeedSpec {
    pub fn resolve(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Range { base, count } => (0..*count as u64).map(|i| base + i).collect(),
        }
    }
}

/// One `(d, l)` cell of the exponential-fit experiment, with an optional
/// system-size list (smaller sizes are sensible at larger `d`).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DlPoint {
    pub d: usize,
    pub l: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
}

/// SVT knobs in config form (`None` picks the standard defaults).
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SvtConfig {
    pub tau: Option<f64>,
    pub delta: Option<f64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
}

impl SvtConfig {
    pub fn to_options(self) -> SvtOptions {
        let base = SvtOptions::default();
        SvtOptions {
            tau: self.tau.or(base.tau),
            delta: self.delta.or(base.delta),
            max_iters: self.max_iters.unwrap_or(base.max_iters),
            tol: self.tol.unwrap_or(base.tol),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Optional self-documentation; validated against the subcommand if set.
    pub experiment: Option<String>,
    pub hamiltonian: Option<HamiltonianSpec>,
    pub hamiltonians: Option<Vec<HamiltonianSpec>>,
    pub rate: Option<f64>,
    pub rates: Option<Vec<f64>>,
    pub mask_seeds: Option<SeedSpec>,
    pub ham_seeds: Option<SeedSpec>,
    /// System sizes for size sweeps; overrides the template's `n` per cell.
    pub ns: Option<Vec<usize>>,
    pub dl_points: Option<Vec<DlPoint>>,
    pub states_per_point: Option<usize>,
    pub pairs_per_state: Option<usize>,
    /// Number of (state, index) draws for the phase experiment.
    pub draws: Option<usize>,
    /// Seed stream for random coefficient/index choices.
    pub index_seed: Option<u64>,
    /// |S'| for the exact-vs-algorithm experiment.
    pub unsampled_count: Option<usize>,
    pub grid_points: Option<usize>,
    pub completer: Option<CompleterConfig>,
    pub svt: Option<SvtConfig>,
    pub solver_tol: Option<f64>,
    pub workers: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            hamiltonian: None,
            hamiltonians: None,
            rate: None,
            rates: None,
            mask_seeds: None,
            ham_seeds: None,
            ns: None,
            dl_points: None,
            states_per_point: None,
            pairs_per_state: None,
            draws: None,
            index_seed: None,
            unsampled_count: None,
            grid_points: None,
            completer: None,
            svt: None,
            solver_tol: None,
            workers: None,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        if let Some(h) = &cfg.hamiltonian {
            h.validate()?;
        }
        for h in cfg.hamiltonians.iter().flatten() {
            h.validate()?;
        }
        Ok(cfg)
    }

    pub fn check_experiment_tag(&self, subcommand: &str) -> Result<(), RunError> {
        if let Some(tag) = &self.experiment {
            if tag != subcommand {
                return Err(RunError::Config(format!(
                    "config is for experiment '{tag}', invoked as '{subcommand}'"
                )));
            }
        }
        Ok(())
    }

    pub fn completer(&self) -> CompleterConfig {
        self.completer.unwrap_or_default()
    }

    pub fn solver_tol(&self) -> f64 {
        self.solver_tol.unwrap_or(1e-12)
    }

    pub fn workers(&self) -> usize {
        self.workers.unwrap_or(1).max(1)
    }

    pub fn require_hamiltonian(&self) -> Result<HamiltonianSpec, RunError> {
        self.hamiltonian
            .ok_or_else(|| RunError::Config("missing required field 'hamiltonian'".into()))
    }
}
