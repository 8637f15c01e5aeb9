//! Per-coefficient errors: exact single-coefficient entanglement
//! minimization versus the full completion algorithm, on the same unsampled
//! set.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use wfc_core::analysis::aggregate_trials;
use wfc_core::completers::exact_min::{minimize_single_phase, EntropyObjective};
use wfc_core::completers::tensor_complete;
use wfc_core::qstate::Bipartition;
use wfc_core::sampling::SampleMask;
use wfc_core::C64;

use crate::config::ExperimentConfig;
use crate::experiments::with_n;
use crate::harness::solve_all;
use crate::output::{provenance, CsvSink};
use crate::RunError;

pub struct CoefficientRow {
    pub n: usize,
    pub index: usize,
    pub eps_exact_min: f64,
    pub eps_algorithm: f64,
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let (rows, resolved) = compute(cfg)?;

    let path = out_dir.join("exact_vs_alg.csv");
    let mut sink = CsvSink::create(
        &path,
        &provenance("exact-vs-alg", resolved.clone()),
        "n,index,eps_exact_min,eps_algorithm",
    )?;
    for r in &rows {
        sink.row(&format!("{},{},{},{}", r.n, r.index, r.eps_exact_min, r.eps_algorithm))?;
    }
    let path = sink.finish()?;

    let agg_path = out_dir.join("exact_vs_alg_agg.csv");
    let mut agg = CsvSink::create(
        &agg_path,
        &provenance("exact-vs-alg", resolved),
        "n,method,min,q1,median,q3,max,count",
    )?;
    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();
    for &n in &ns {
        for (method, pick) in [
            ("exact_min", &(|r: &CoefficientRow| r.eps_exact_min) as &dyn Fn(&CoefficientRow) -> f64),
            ("algorithm", &|r: &CoefficientRow| r.eps_algorithm),
        ] {
            let vals: Vec<f64> = rows.iter().filter(|r| r.n == n).map(pick).collect();
            let a = aggregate_trials(&vals).map_err(|e| RunError::Solver(e.to_string()))?;
            agg.row(&format!("{n},{method},{},{},{},{},{},{}", a.min, a.q1, a.median, a.q3, a.max, a.n))?;
        }
    }
    Ok(vec![path, agg.finish()?])
}

/// The per-coefficient comparison, reusable by the acceptance suite.
pub fn compute(cfg: &ExperimentConfig) -> Result<(Vec<CoefficientRow>, serde_json::Value), RunError> {
    let template = cfg.require_hamiltonian()?;
    let ns = cfg.ns.clone().unwrap_or_else(|| vec![10, 12]);
    let unsampled_count = cfg.unsampled_count.unwrap_or(50);
    let index_seed = cfg.index_seed.unwrap_or(913);
    let completer = cfg.completer();
    let tol = cfg.solver_tol();

    let specs: Vec<_> = ns.iter().map(|&n| with_n(&template, n)).collect();
    let states = solve_all(&specs, tol)?;

    let resolved = json!({
        "hamiltonian_template": template,
        "ns": ns,
        "unsampled_count": unsampled_count,
        "index_seed": index_seed,
        "completer": completer,
        "solver_tol": tol,
    });

    let mut rows = Vec::new();
    for ((&n, spec), gs) in ns.iter().zip(&specs).zip(&states) {
        let dim = gs.state.dim();
        if unsampled_count == 0 || unsampled_count >= dim {
            return Err(RunError::Config(format!(
                "unsampled_count {unsampled_count} must lie in (0, {dim})"
            )));
        }
        // choose |S'| distinct unsampled indices with nonzero amplitudes
        let mut rng = ChaCha8Rng::seed_from_u64(index_seed);
        rng.set_stream(n as u64);
        let mut holes: Vec<usize> = Vec::with_capacity(unsampled_count);
        while holes.len() < unsampled_count {
            let i = rng.random_range(0..dim);
            if !holes.contains(&i) && gs.state.amplitudes()[i].norm() > 1e-12 {
                holes.push(i);
            }
        }
        let mut sorted_holes = holes.clone();
        sorted_holes.sort_unstable();

        // the mask is everything else
        let mut indices = Vec::with_capacity(dim - unsampled_count);
        let mut values: Vec<C64> = Vec::with_capacity(dim - unsampled_count);
        let mut hole_it = sorted_holes.iter().copied().peekable();
        for i in 0..dim {
            if hole_it.peek() == Some(&i) {
                hole_it.next();
            } else {
                indices.push(i);
                values.push(gs.state.amplitudes()[i]);
            }
        }
        let rate = indices.len() as f64 / dim as f64;
        let mask = SampleMask::from_parts(dim, indices, values, index_seed, rate)?;

        let (done, _) = tensor_complete(spec.shape(), &mask, &completer, None)?;
        let cut = Bipartition::central(n).map_err(|e| RunError::Config(e.to_string()))?;
        for &idx in &sorted_holes {
            let exact_c = gs.state.amplitudes()[idx];
            let single = minimize_single_phase(&gs.state, idx, EntropyObjective::SHalf, cut)?;
            let c_min = C64::from_polar(exact_c.norm(), single.theta_min);
            rows.push(CoefficientRow {
                n,
                index: idx,
                eps_exact_min: (exact_c - c_min).norm(),
                eps_algorithm: (exact_c - done.amplitudes()[idx]).norm(),
            });
        }
    }
    Ok((rows, resolved))
}
