//! SVT vs matrix vs tensor completion on identical masks.

use std::path::{Path, PathBuf};

use serde_json::json;

use wfc_core::analysis::median;
use wfc_core::completers::{matrix_complete, svt_complete, tensor_complete};
use wfc_core::qstate::fidelity_error;
use wfc_core::sampling::draw_mask;

use crate::config::ExperimentConfig;
use crate::experiments::with_seed;
use crate::harness::{parallel_map, solve_all};
use crate::output::{provenance, CsvSink};
use crate::RunError;

pub const METHODS: [&str; 3] = ["svt", "matrix", "tensor"];

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let (rows, medians, resolved) = compute(cfg)?;

    let path = out_dir.join("compare_methods.csv");
    let mut sink = CsvSink::create(
        &path,
        &provenance("compare-methods", resolved.clone()),
        "method,rate,trial,ham_seed,mask_seed,fidelity_error",
    )?;
    for r in &rows {
        sink.row(&format!("{},{},{},{},{},{}", r.method, r.rate, r.trial, r.ham_seed, r.mask_seed, r.error))?;
    }
    let path = sink.finish()?;

    let med_path = out_dir.join("compare_methods_medians.csv");
    let mut med = CsvSink::create(
        &med_path,
        &provenance("compare-methods", resolved),
        "rate,method,median_fidelity_error",
    )?;
    for (rate, method, value) in &medians {
        med.row(&format!("{rate},{method},{value}"))?;
    }
    Ok(vec![path, med.finish()?])
}

pub struct CompareRow {
    pub method: &'static str,
    pub rate: f64,
    pub trial: usize,
    pub ham_seed: u64,
    pub mask_seed: u64,
    pub error: f64,
}

/// Paired-mask comparison, reusable by the acceptance suite.
pub fn compute(
    cfg: &ExperimentConfig,
) -> Result<(Vec<CompareRow>, Vec<(f64, &'static str, f64)>, serde_json::Value), RunError> {
    let template = cfg.require_hamiltonian()?;
    let rates = cfg.rates.clone().unwrap_or_else(|| vec![0.4, 0.5, 0.6]);
    let ham_seeds = cfg
        .ham_seeds
        .as_ref()
        .map(|s| s.resolve())
        .unwrap_or_else(|| (1..=10).collect());
    let mask_seeds: Vec<u64> = cfg
        .mask_seeds
        .as_ref()
        .map(|s| s.resolve())
        .unwrap_or_else(|| ham_seeds.iter().map(|s| 7_700_000 + s).collect());
    if mask_seeds.len() != ham_seeds.len() {
        return Err(RunError::Config(
            "compare-methods needs one mask seed per Hamiltonian seed".into(),
        ));
    }
    let completer = cfg.completer();
    let svt_opts = cfg.svt.unwrap_or_default().to_options();
    let tol = cfg.solver_tol();

    let specs: Vec<_> = ham_seeds.iter().map(|&s| with_seed(&template, s)).collect();
    let states = solve_all(&specs, tol)?;

    let mut cells = Vec::new();
    for (trial, (&hs, &ms)) in ham_seeds.iter().zip(&mask_seeds).enumerate() {
        for &rate in &rates {
            cells.push((trial, hs, ms, rate));
        }
    }
    // one cell = three methods on the same mask
    let cell_rows = parallel_map(cells, cfg.workers(), |&(trial, hs, ms, rate)| {
        let gs = &states[trial];
        let shape = specs[trial].shape();
        let mask = draw_mask(&gs.state, rate, ms)?;
        let (svt_state, _) = svt_complete(shape, &mask, &svt_opts, None)?;
        let (mat_state, _) = matrix_complete(shape, &mask, &completer, None)?;
        let (ten_state, _) = tensor_complete(shape, &mask, &completer, None)?;
        Ok([
            CompareRow { method: "svt", rate, trial, ham_seed: hs, mask_seed: ms, error: fidelity_error(&svt_state, &gs.state)? },
            CompareRow { method: "matrix", rate, trial, ham_seed: hs, mask_seed: ms, error: fidelity_error(&mat_state, &gs.state)? },
            CompareRow { method: "tensor", rate, trial, ham_seed: hs, mask_seed: ms, error: fidelity_error(&ten_state, &gs.state)? },
        ])
    })?;
    let rows: Vec<CompareRow> = cell_rows.into_iter().flatten().collect();

    let mut medians = Vec::new();
    for &rate in &rates {
        for method in METHODS {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.rate == rate && r.method == method)
                .map(|r| r.error)
                .collect();
            let m = median(&vals).map_err(|e| RunError::Solver(e.to_string()))?;
            medians.push((rate, method, m));
        }
    }
    let resolved = json!({
        "hamiltonian_template": template,
        "rates": rates,
        "ham_seeds": ham_seeds,
        "mask_seeds": mask_seeds,
        "completer": completer,
        "svt": {"tau": svt_opts.tau, "delta": svt_opts.delta, "max_iters": svt_opts.max_iters, "tol": svt_opts.tol},
        "solver_tol": tol,
    });
    Ok((rows, medians, resolved))
}
