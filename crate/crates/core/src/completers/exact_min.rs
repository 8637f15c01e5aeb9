//! Exact entanglement minimization for one or two unsampled coefficients.
//!
//! These are the smallest nontrivial completion problems: every amplitude is
//! known except the phase of one coefficient (its magnitude being pinned by
//! normalization), or except two complex coefficients whose magnitudes are
//! coupled through normalization (three free parameters). Both are minimized
//! by a coarse grid scan followed by Nelder-Mead refinement of the chosen
//! entanglement measure across a single bipartition.

use std::f64::consts::TAU;

use faer::Mat;
use serde::{Deserialize, Serialize};

use super::nelder_mead::{self, NmOptions};
use super::CompleterError;
use crate::qstate::{cut_gather_table, gather_into, Bipartition};
use crate::{C64, StateVector};

/// Which entanglement measure is minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyObjective {
    /// Nuclear norm `Σ_k σ_k`.
    SHalf,
    /// Von Neumann entropy `−Σ_k σ_k² ln σ_k²`.
    SOne,
}

/// Result of a single-coefficient phase minimization.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhaseMinimum {
    pub objective: EntropyObjective,
    /// Phase of the exact coefficient, in `[0, 2π)`.
    pub theta_exact: f64,
    /// Minimizing phase, in `[0, 2π)`.
    pub theta_min: f64,
    pub objective_at_min: f64,
    pub objective_at_exact: f64,
    pub evals: usize,
}

impl PhaseMinimum {
    /// Circular distance `|θ_min − θ_exact|` on the phase circle.
    pub fn phase_error(&self) -> f64 {
        let raw = (self.theta_min - self.theta_exact).rem_euclid(TAU);
        raw.min(TAU - raw)
    }
}

/// Result of the two-coefficient minimization.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairMinimum {
    pub c_free_exact: C64,
    /// Minimizing value of the coefficient whose magnitude varies.
    pub c_free_min: C64,
    /// `ε_c = |c − c_min|` for that coefficient.
    pub coefficient_error: f64,
    pub objective_at_min: f64,
    pub objective_at_exact: f64,
    pub evals: usize,
}

/// Shared evaluation core: the cut matricization with a handful of writable
/// slots, everything else frozen.
struct CutObjective {
    mat: Mat<C64>,
    slots: Vec<(usize, usize)>,
}

impl CutObjective {
    fn new(state: &StateVector, cut: Bipartition, free_indices: &[usize]) -> Result<Self, CompleterError> {
        let n = state.num_sites();
        let d = state.local_dim();
        let cut = Bipartition::new(cut.block_start(), cut.block_len(), n).map_err(CompleterError::QState)?;
        let table = cut_gather_table(n, d, cut);
        let rows = cut.rows(d);
        let mut mat = Mat::zeros(rows, cut.cols(n, d));
        gather_into(state.amplitudes(), &table, &mut mat);
        // invert the gather for the free indices only
        let mut slots = vec![(0usize, 0usize); free_indices.len()];
        for (pos, &flat) in table.iter().enumerate() {
            for (k, &want) in free_indices.iter().enumerate() {
                if flat as usize == want {
                    slots[k] = (pos % rows, pos / rows);
                }
            }
        }
        Ok(Self { mat, slots })
    }

    fn eval(&mut self, values: &[C64], objective: EntropyObjective) -> f64 {
        for (&(r, c), &v) in self.slots.iter().zip(values) {
            self.mat[(r, c)] = v;
        }
        let sv = self.mat.singular_values().expect("SVD of a finite matrix cannot fail");
        match objective {
            EntropyObjective::SHalf => sv.iter().sum(),
            EntropyObjective::SOne => sv
                .iter()
                .map(|&s| {
                    let p = s * s;
                    if p > 0.0 {
                        -p * p.ln()
                    } else {
                        0.0
                    }
                })
                .sum(),
        }
    }
}

fn wrap_phase(theta: f64) -> f64 {
    theta.rem_euclid(TAU)
}

/// Default number of coarse grid points for the single-phase scan.
pub const PHASE_GRID_POINTS: usize = 256;

/// Minimize the chosen entropy across `cut` over the phase of amplitude
/// `index`, holding its magnitude (and every other amplitude) fixed.
pub fn minimize_single_phase(
    state: &StateVector,
    index: usize,
    objective: EntropyObjective,
    cut: Bipartition,
) -> Result<PhaseMinimum, CompleterError> {
    let c_exact = state.amplitudes()[index];
    let magnitude = c_exact.norm();
    if magnitude == 0.0 {
        return Err(CompleterError::ZeroCoefficient(index));
    }
    let theta_exact = wrap_phase(c_exact.arg());
    let mut obj = CutObjective::new(state, cut, &[index])?;
    let mut evals = 0usize;
    let mut f = |theta: f64| -> f64 {
        evals += 1;
        obj.eval(&[C64::from_polar(magnitude, theta)], objective)
    };

    // coarse scan, then simplex refinement from the best grid point
    let mut best_theta = 0.0;
    let mut best_val = f64::INFINITY;
    for j in 0..PHASE_GRID_POINTS {
        let theta = TAU * j as f64 / PHASE_GRID_POINTS as f64;
        let v = f(theta);
        if v < best_val {
            best_val = v;
            best_theta = theta;
        }
    }
    let step = TAU / PHASE_GRID_POINTS as f64;
    let refined = nelder_mead::minimize(
        |x| f(x[0]),
        &[best_theta],
        &[step],
        &NmOptions::default(),
    );
    let objective_at_exact = f(theta_exact);
    Ok(PhaseMinimum {
        objective,
        theta_exact,
        theta_min: wrap_phase(refined.x[0]),
        objective_at_min: refined.fx,
        objective_at_exact,
        evals,
    })
}

/// Entropy of the state as a function of one coefficient's phase, sampled on
/// a uniform grid (for the phase-sweep experiment).
pub fn phase_objective_curve(
    state: &StateVector,
    index: usize,
    cut: Bipartition,
    grid_points: usize,
) -> Result<Vec<(f64, f64, f64)>, CompleterError> {
    let c_exact = state.amplitudes()[index];
    let magnitude = c_exact.norm();
    if magnitude == 0.0 {
        return Err(CompleterError::ZeroCoefficient(index));
    }
    let mut obj = CutObjective::new(state, cut, &[index])?;
    let mut out = Vec::with_capacity(grid_points + 1);
    for j in 0..=grid_points {
        let theta = TAU * j as f64 / grid_points as f64;
        let v = C64::from_polar(magnitude, theta);
        let s_half = obj.eval(&[v], EntropyObjective::SHalf);
        let s_one = obj.eval(&[v], EntropyObjective::SOne);
        out.push((theta, s_half, s_one));
    }
    Ok(out)
}

/// Parameterization of the pair problem: `(θ_a, θ_b, mix)` with
/// `c_a = r·cos(mix)·e^{iθ_a}` and `c_b = r·sin(mix)·e^{iθ_b}`, where `r²` is
/// the exact combined weight `|c_a|² + |c_b|²` pinned by normalization.
fn pair_values(r: f64, params: &[f64]) -> [C64; 2] {
    let (theta_a, theta_b, mix) = (params[0], params[1], params[2]);
    [
        C64::from_polar(r * mix.cos().abs(), theta_a),
        C64::from_polar(r * mix.sin().abs(), theta_b),
    ]
}

/// Minimize `S_1/2` across `cut` over two unsampled coefficients whose total
/// weight is fixed; reports the error of the first coefficient.
pub fn minimize_pair(
    state: &StateVector,
    idx_a: usize,
    idx_b: usize,
    cut: Bipartition,
) -> Result<PairMinimum, CompleterError> {
    if idx_a == idx_b {
        return Err(CompleterError::EqualIndices);
    }
    let c_a = state.amplitudes()[idx_a];
    let c_b = state.amplitudes()[idx_b];
    let r = (c_a.norm_sqr() + c_b.norm_sqr()).sqrt();
    if r == 0.0 {
        return Err(CompleterError::ZeroCoefficient(idx_a));
    }
    let mut obj = CutObjective::new(state, cut, &[idx_a, idx_b])?;
    let mut evals = 0usize;
    let mut f = |params: &[f64]| -> f64 {
        evals += 1;
        obj.eval(&pair_values(r, params), EntropyObjective::SHalf)
    };

    // coarse grid over both phases and the magnitude-mixing angle
    const PHASE_STEPS: usize = 12;
    const MIX_STEPS: usize = 9;
    let mut best = [0.0f64; 3];
    let mut best_val = f64::INFINITY;
    for ja in 0..PHASE_STEPS {
        let ta = TAU * ja as f64 / PHASE_STEPS as f64;
        for jb in 0..PHASE_STEPS {
            let tb = TAU * jb as f64 / PHASE_STEPS as f64;
            for jm in 0..=MIX_STEPS {
                let mix = std::f64::consts::FRAC_PI_2 * jm as f64 / MIX_STEPS as f64;
                let v = f(&[ta, tb, mix]);
                if v < best_val {
                    best_val = v;
                    best = [ta, tb, mix];
                }
            }
        }
    }
    let step = [
        TAU / PHASE_STEPS as f64,
        TAU / PHASE_STEPS as f64,
        std::f64::consts::FRAC_PI_2 / MIX_STEPS as f64,
    ];
    let refined = nelder_mead::minimize(
        &mut f,
        &best,
        &step,
        &NmOptions { max_evals: 800, ..Default::default() },
    );
    let minimizers = pair_values(r, &refined.x);
    let exact_mix = (c_b.norm() / r).asin();
    let objective_at_exact = f(&[wrap_phase(c_a.arg()), wrap_phase(c_b.arg()), exact_mix]);
    Ok(PairMinimum {
        c_free_exact: c_a,
        c_free_min: minimizers[0],
        coefficient_error: (c_a - minimizers[0]).norm(),
        objective_at_min: refined.fx,
        objective_at_exact,
        evals,
    })
}
