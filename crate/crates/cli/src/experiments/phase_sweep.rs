//! Phase completion of single coefficients: the objective landscape over one
//! coefficient's phase, and the minimizing phases for both entanglement
//! measures over many (state, index) draws.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use wfc_core::completers::exact_min::{
    minimize_single_phase, phase_objective_curve, EntropyObjective,
};
use wfc_core::qstate::Bipartition;

use crate::config::ExperimentConfig;
use crate::experiments::with_seed;
use crate::harness::solve_all;
use crate::output::{provenance, CsvSink};
use crate::RunError;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let template = cfg.require_hamiltonian()?;
    let draws = cfg.draws.unwrap_or(20);
    let grid_points = cfg.grid_points.unwrap_or(256);
    let index_seed = cfg.index_seed.unwrap_or(1234);
    let ham_seeds = cfg
        .ham_seeds
        .as_ref()
        .map(|s| s.resolve())
        .unwrap_or_else(|| (0..5).map(|i| template.seed + i).collect());
    if ham_seeds.is_empty() || draws == 0 {
        return Err(RunError::Config("phase-sweep needs at least one seed and draw".into()));
    }
    let per_state = draws.div_ceil(ham_seeds.len());

    let specs: Vec<_> = ham_seeds.iter().map(|&s| with_seed(&template, s)).collect();
    let tol = cfg.solver_tol();
    let states = solve_all(&specs, tol)?;
    let cut = Bipartition::central(template.num_sites).map_err(|e| RunError::Config(e.to_string()))?;

    let resolved = json!({
        "hamiltonian_template": template,
        "ham_seeds": ham_seeds,
        "draws": draws,
        "grid_points": grid_points,
        "index_seed": index_seed,
        "solver_tol": tol,
    });

    // per-draw minimizers for both objectives
    let markers_path = out_dir.join("phase_markers.csv");
    let mut markers = CsvSink::create(
        &markers_path,
        &provenance("phase-sweep", resolved.clone()),
        "ham_seed,index,theta_exact,theta_s_half,theta_s_one,err_s_half,err_s_one,s_half_min,s_one_min",
    )?;
    let mut first_draw: Option<(usize, usize)> = None;
    let mut done = 0usize;
    'outer: for (si, gs) in states.iter().enumerate() {
        let dim = gs.state.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(index_seed);
        rng.set_stream(si as u64);
        for _ in 0..per_state {
            if done >= draws {
                break 'outer;
            }
            // skip indices whose magnitude is numerically zero
            let index = loop {
                let i = rng.random_range(0..dim);
                if gs.state.amplitudes()[i].norm() > 1e-12 {
                    break i;
                }
            };
            if first_draw.is_none() {
                first_draw = Some((si, index));
            }
            let half = minimize_single_phase(&gs.state, index, EntropyObjective::SHalf, cut)?;
            let one = minimize_single_phase(&gs.state, index, EntropyObjective::SOne, cut)?;
            markers.row(&format!(
                "{},{},{},{},{},{},{},{},{}",
                ham_seeds[si],
                index,
                half.theta_exact,
                half.theta_min,
                one.theta_min,
                half.phase_error(),
                one.phase_error(),
                half.objective_at_min,
                one.objective_at_min,
            ))?;
            done += 1;
        }
    }
    let markers_path = markers.finish()?;

    // full landscape for the first draw, with the three theta markers
    let (si, index) = first_draw.expect("draws >= 1");
    let gs = &states[si];
    let curve = phase_objective_curve(&gs.state, index, cut, grid_points)?;
    let half = minimize_single_phase(&gs.state, index, EntropyObjective::SHalf, cut)?;
    let one = minimize_single_phase(&gs.state, index, EntropyObjective::SOne, cut)?;
    let curve_path = out_dir.join("phase_curve.csv");
    let mut sink = CsvSink::create(
        &curve_path,
        &provenance("phase-sweep", json!({"curve_of": {"ham_seed": ham_seeds[si], "index": index}, "resolved": resolved})),
        "theta,s_half,s_one,marker",
    )?;
    for (theta, s_half, s_one) in &curve {
        sink.row(&format!("{theta},{s_half},{s_one},"))?;
    }
    sink.row(&format!("{},{},{},exact", half.theta_exact, half.objective_at_exact, one.objective_at_exact))?;
    sink.row(&format!("{},{},,s_half", half.theta_min, half.objective_at_min))?;
    sink.row(&format!("{},,{},s_one", one.theta_min, one.objective_at_min))?;
    Ok(vec![markers_path, sink.finish()?])
}
