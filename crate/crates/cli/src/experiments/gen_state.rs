//! Solve a ground state and save it as WFC1 plus a JSON sidecar.

use std::path::{Path, PathBuf};

use serde_json::json;

use wfc_core::io::write_state;

use crate::config::ExperimentConfig;
use crate::harness::solve_all;
use crate::output::write_json;
use crate::RunError;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let spec = cfg.require_hamiltonian()?;
    let tol = cfg.solver_tol();
    let gs = solve_all(&[spec], tol)?.remove(0);

    std::fs::create_dir_all(out_dir)?;
    let label = spec.label();
    let state_path = out_dir.join(format!("{label}.wfc1"));
    write_state(&state_path, &gs.state, spec.boundary)?;
    let sidecar_path = out_dir.join(format!("{label}.json"));
    write_json(
        &sidecar_path,
        &json!({
            "energy": gs.energy,
            "residual": gs.residual,
            "iterations": gs.iterations,
            "degenerate_flag": gs.degenerate,
            "spec": spec,
            "solver_tol": tol,
            "artifact_version": env!("CARGO_PKG_VERSION"),
        }),
    )?;
    Ok(vec![state_path, sidecar_path])
}
