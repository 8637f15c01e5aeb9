//! Singular-value spectra of ground states across the central cut.

use std::path::{Path, PathBuf};

use serde_json::json;

use wfc_core::qstate::{singular_values, Bipartition};

use crate::config::ExperimentConfig;
use crate::harness::solve_all;
use crate::output::{provenance, CsvSink};
use crate::RunError;

pub const EFFECTIVE_RANK_CUTOFF: f64 = 1e-10;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let specs = match (&cfg.hamiltonians, cfg.hamiltonian) {
        (Some(list), _) if !list.is_empty() => list.clone(),
        (_, Some(single)) => vec![single],
        _ => return Err(RunError::Config("spectra needs 'hamiltonian' or 'hamiltonians'".into())),
    };
    let tol = cfg.solver_tol();
    let results = solve_all(&specs, tol)?;

    let prov = provenance(
        "spectra",
        json!({
            "hamiltonians": specs,
            "solver_tol": tol,
            "effective_rank_cutoff": EFFECTIVE_RANK_CUTOFF,
        }),
    );
    let path = out_dir.join("spectra.csv");
    let mut sink = CsvSink::create(&path, &prov, "model,k,sigma_k,effective_rank")?;
    for (spec, gs) in specs.iter().zip(&results) {
        let cut = Bipartition::central(spec.num_sites).map_err(|e| RunError::Config(e.to_string()))?;
        let sv = singular_values(&gs.state, cut)?;
        let reff = sv.effective_rank(EFFECTIVE_RANK_CUTOFF);
        let label = spec.label();
        for (k, sigma) in sv.values().iter().enumerate() {
            sink.row(&format!("{label},{},{},{}", k + 1, sigma, reff))?;
        }
    }
    Ok(vec![sink.finish()?])
}
