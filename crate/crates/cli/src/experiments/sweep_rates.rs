//! Final fidelity error over a (system size × sample rate × mask seed) grid.

use std::path::{Path, PathBuf};

use serde_json::json;

use wfc_core::analysis::aggregate_trials;
use wfc_core::completers::tensor_complete;
use wfc_core::qstate::fidelity_error;
use wfc_core::sampling::draw_mask;

use crate::config::ExperimentConfig;
use crate::experiments::with_n;
use crate::harness::{parallel_map, solve_all};
use crate::output::{provenance, CsvSink};
use crate::RunError;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let template = cfg.require_hamiltonian()?;
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![template.num_sites]);
    let rates = cfg
        .rates
        .clone()
        .unwrap_or_else(|| vec![0.4, 0.5, 0.6, 0.8, 0.9, 0.99]);
    let seeds = cfg
        .mask_seeds
        .as_ref()
        .map(|s| s.resolve())
        .unwrap_or_else(|| (1..=5).collect());
    let completer = cfg.completer();
    let tol = cfg.solver_tol();

    let specs: Vec<_> = ns.iter().map(|&n| with_n(&template, n)).collect();
    let states = solve_all(&specs, tol)?;

    let mut cells = Vec::new();
    for (ni, &n) in ns.iter().enumerate() {
        for &rate in &rates {
            for &seed in &seeds {
                cells.push((ni, n, rate, seed));
            }
        }
    }
    let results = parallel_map(cells.clone(), cfg.workers(), |&(ni, _n, rate, seed)| {
        let gs = &states[ni];
        let mask = draw_mask(&gs.state, rate, seed)?;
        let (done, _) = tensor_complete(specs[ni].shape(), &mask, &completer, None)?;
        Ok(fidelity_error(&done, &gs.state)?)
    })?;

    let resolved = json!({
        "hamiltonian_template": template,
        "ns": ns,
        "rates": rates,
        "mask_seeds": seeds,
        "completer": completer,
        "solver_tol": tol,
    });
    let path = out_dir.join("sweep_rates.csv");
    let mut sink = CsvSink::create(
        &path,
        &provenance("sweep-rates", resolved.clone()),
        "n,rate,seed,final_fidelity_error",
    )?;
    for ((_, n, rate, seed), err) in cells.iter().zip(&results) {
        sink.row(&format!("{n},{rate},{seed},{err}"))?;
    }
    let path = sink.finish()?;

    let agg_path = out_dir.join("sweep_rates_agg.csv");
    let mut agg = CsvSink::create(
        &agg_path,
        &provenance("sweep-rates", resolved),
        "n,rate,min,q1,median,q3,max,count",
    )?;
    for (ni, &n) in ns.iter().enumerate() {
        for &rate in &rates {
            let vals: Vec<f64> = cells
                .iter()
                .zip(&results)
                .filter(|((ci, _, r, _), _)| *ci == ni && *r == rate)
                .map(|(_, &e)| e)
                .collect();
            let a = aggregate_trials(&vals).map_err(|e| RunError::Solver(e.to_string()))?;
            agg.row(&format!("{n},{rate},{},{},{},{},{},{}", a.min, a.q1, a.median, a.q3, a.max, a.n))?;
        }
    }
    Ok(vec![path, agg.finish()?])
}
