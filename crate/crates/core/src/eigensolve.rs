//! Ground states of [`HamiltonianSpec`] models.
//!
//! The workhorse is a restarted Lanczos iteration with full
//! reorthogonalization (cheap at these Krylov sizes and immune to ghost
//! eigenvalues); a dense eigendecomposition doubles as the oracle for small
//! systems.

use faer::{Mat, Side};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::hamiltonian::{HamiltonianError, HamiltonianOp, HamiltonianSpec, START_VECTOR_STREAM};
use crate::{C64, StateVector};

#[derive(Debug, Error)]
pub enum EigenError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error("Hilbert-space dimension {dim} exceeds the configured cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },
    #[error("Lanczos did not converge after {restarts} restarts (best residual {residual:.3e})")]
    NotConverged { restarts: usize, residual: f64 },
}

/// A converged ground-state eigenpair.
///
/// `degenerate` is a warning flag raised when the two lowest Ritz (or exact)
/// values sit within 1e-10 of each other; the returned state is then one
/// representative of the ground space.
#[derive(Clone, Debug)]
pub struct GroundStateResult {
    pub state: StateVector,
    pub energy: f64,
    pub residual: f64,
    pub iterations: usize,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct LanczosOptions {
    /// Convergence threshold on `‖Hψ − Eψ‖`.
    pub tol: f64,
    /// Krylov dimension per restart cycle; 0 picks a memory-aware default.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Refuse to solve above this Hilbert-space dimension.
    pub dim_cap: usize,
    /// Run the deflated second pass that detects degenerate ground spaces.
    pub detect_degeneracy: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-12, krylov_dim: 0, max_restarts: 50, dim_cap: 1 << 20, detect_degeneracy: true }
    }
}

const DEGENERACY_GAP: f64 = 1e-10;

/// Lowest eigenpair of `spec` to residual `tol` (see [`LanczosOptions`]).
pub fn ground_state(spec: &HamiltonianSpec, tol: f64) -> Result<GroundStateResult, EigenError> {
    let op = HamiltonianOp::new(spec)?;
    ground_state_of(&op, LanczosOptions { tol, ..Default::default() })
}

/// Lanczos on an already-prepared operator.
///
/// A Krylov space never splits an exactly degenerate eigenspace (H acts as a
/// scalar there), so after convergence a second, deflated pass estimates the
/// lowest energy orthogonal to the ground vector; the `degenerate` flag fires
/// when that energy sits within 1e-10 of the ground energy.
pub fn ground_state_of(op: &HamiltonianOp, opts: LanczosOptions) -> Result<GroundStateResult, EigenError> {
    let dim = op.dim();
    if dim > opts.dim_cap {
        return Err(EigenError::DimCapExceeded { dim, cap: opts.dim_cap });
    }
    let spec = op.spec();
    let kmax = if opts.krylov_dim > 0 {
        opts.krylov_dim.min(dim)
    } else {
        // keep the stored basis under ~256 MiB
        let mem_cap = if dim <= 1 << 17 { 100 } else { 60 };
        mem_cap.min(dim)
    };

    let start = seeded_start(dim, spec.seed, START_VECTOR_STREAM);
    let main = lanczos_lowest(op, start, None, opts.tol, kmax, opts.max_restarts)?;

    let mut degenerate = main.ritz_gap_small;
    if opts.detect_degeneracy && dim > 1 {
        let probe_start = seeded_start(dim, spec.seed, START_VECTOR_STREAM + 1);
        let probe = lanczos_lowest(op, probe_start, Some(&main.vector), 1e-10, kmax, 15);
        if let Ok(p) = probe {
            degenerate = degenerate || (p.energy - main.energy).abs() <= DEGENERACY_GAP;
        }
    }

    let mut state = StateVector::new(spec.num_sites, spec.local_dim, main.vector)
        .expect("dimension fixed by construction");
    fix_global_phase(&mut state);
    Ok(GroundStateResult {
        state,
        energy: main.energy,
        residual: main.residual,
        iterations: main.iterations,
        degenerate,
    })
}

fn seeded_start(dim: usize, seed: u64, stream: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let normal = StandardNormal;
    let mut x: Vec<C64> = (0..dim)
        .map(|_| C64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
        .collect();
    normalize(&mut x);
    x
}

struct LanczosOutcome {
    vector: Vec<C64>,
    energy: f64,
    residual: f64,
    iterations: usize,
    /// Two lowest Ritz values of the final cycle within the degeneracy gap.
    ritz_gap_small: bool,
}

/// Restarted Lanczos with full (two-pass) reorthogonalization; `deflate`
/// confines the iteration to the orthogonal complement of a converged vector.
fn lanczos_lowest(
    op: &HamiltonianOp,
    start: Vec<C64>,
    deflate: Option<&[C64]>,
    tol: f64,
    kmax: usize,
    max_restarts: usize,
) -> Result<LanczosOutcome, EigenError> {
    let dim = op.dim();
    let mut x = start;
    if let Some(d) = deflate {
        project_out(d, &mut x);
        normalize(&mut x);
    }

    let mut ws = op.workspace();
    let mut basis: Mat<C64> = Mat::zeros(dim, kmax);
    let mut h_next = vec![C64::ZERO; dim];
    let mut iterations = 0usize;
    let mut best_residual = f64::INFINITY;

    for _restart in 0..max_restarts {
        let mut alphas: Vec<f64> = Vec::with_capacity(kmax);
        let mut betas: Vec<f64> = Vec::with_capacity(kmax);
        for (i, v) in x.iter().enumerate() {
            basis[(i, 0)] = *v;
        }
        let mut steps = 0usize;
        for j in 0..kmax {
            let vj: Vec<C64> = (0..dim).map(|i| basis[(i, j)]).collect();
            op.apply_slices(&vj, &mut h_next, &mut ws);
            iterations += 1;
            let alpha: f64 = vj
                .iter()
                .zip(h_next.iter())
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            alphas.push(alpha);
            // w = H v_j − α v_j − β v_{j−1}, then reorthogonalize against the
            // whole basis twice (DGKS)
            for i in 0..dim {
                h_next[i] -= vj[i] * alpha;
            }
            if j > 0 {
                let beta_prev = betas[j - 1];
                for i in 0..dim {
                    h_next[i] -= basis[(i, j - 1)] * beta_prev;
                }
            }
            for _ in 0..2 {
                if let Some(d) = deflate {
                    project_out(d, &mut h_next);
                }
                reorthogonalize(&basis, j + 1, &mut h_next);
            }
            steps = j + 1;
            if j + 1 == kmax {
                break;
            }
            let beta = norm(&h_next);
            if beta < 1e-14 {
                break; // invariant subspace reached
            }
            betas.push(beta);
            let inv = 1.0 / beta;
            for i in 0..dim {
                basis[(i, j + 1)] = h_next[i] * inv;
            }
        }

        // Ritz pair from the tridiagonal projection
        let mut tri: Mat<f64> = Mat::zeros(steps, steps);
        for j in 0..steps {
            tri[(j, j)] = alphas[j];
            if j + 1 < steps {
                tri[(j, j + 1)] = betas[j];
                tri[(j + 1, j)] = betas[j];
            }
        }
        let eig = tri.self_adjoint_eigen(Side::Lower).expect("tridiagonal EVD");
        let evals = eig.S().column_vector();
        let evecs = eig.U();
        let ritz_gap_small = steps > 1 && (evals[1] - evals[0]).abs() <= DEGENERACY_GAP;

        let mut ritz = vec![C64::ZERO; dim];
        for j in 0..steps {
            let y = C64::new(evecs[(j, 0)], 0.0);
            for i in 0..dim {
                ritz[i] += basis[(i, j)] * y;
            }
        }
        if let Some(d) = deflate {
            project_out(d, &mut ritz);
        }
        normalize(&mut ritz);

        // exact residual and Rayleigh quotient of the Ritz vector
        op.apply_slices(&ritz, &mut h_next, &mut ws);
        iterations += 1;
        let rq: f64 = ritz
            .iter()
            .zip(h_next.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let mut residual_vec: Vec<C64> =
            (0..dim).map(|i| h_next[i] - ritz[i] * rq).collect();
        if let Some(d) = deflate {
            // residual measured within the deflated subspace
            project_out(d, &mut residual_vec);
        }
        let residual = norm(&residual_vec);
        x = ritz;
        if residual < best_residual {
            best_residual = residual;
        }
        if residual <= tol {
            return Ok(LanczosOutcome { vector: x, energy: rq, residual, iterations, ritz_gap_small });
        }
    }
    Err(EigenError::NotConverged { restarts: max_restarts, residual: best_residual })
}

fn project_out(direction: &[C64], v: &mut [C64]) {
    let mut ov = C64::ZERO;
    for (d, x) in direction.iter().zip(v.iter()) {
        ov += d.conj() * x;
    }
    for (d, x) in direction.iter().zip(v.iter_mut()) {
        *x -= d * ov;
    }
}

fn reorthogonalize(basis: &Mat<C64>, used: usize, w: &mut [C64]) {
    for j in 0..used {
        let mut ov = C64::ZERO;
        for (i, wi) in w.iter().enumerate() {
            ov += basis[(i, j)].conj() * wi;
        }
        for (i, wi) in w.iter_mut().enumerate() {
            *wi -= basis[(i, j)] * ov;
        }
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = norm(v);
    assert!(n > 0.0, "cannot normalize the zero vector");
    let inv = 1.0 / n;
    for a in v {
        *a *= inv;
    }
}

/// Rotate the global phase so the largest-magnitude amplitude is real and
/// positive (first such amplitude on ties). Idempotent.
pub fn fix_global_phase(state: &mut StateVector) {
    let amps = state.amplitudes();
    let mut best = 0usize;
    let mut best_mag = 0.0f64;
    for (i, a) in amps.iter().enumerate() {
        let m = a.norm_sqr();
        if m > best_mag {
            best_mag = m;
            best = i;
        }
    }
    if best_mag == 0.0 {
        return;
    }
    let a = state.amplitudes()[best];
    let phase = a.conj() / a.norm();
    for amp in state.amplitudes_mut() {
        *amp *= phase;
    }
    // kill the residual imaginary dust on the anchor amplitude
    let anchor = &mut state.amplitudes_mut()[best];
    *anchor = C64::new(anchor.re, 0.0);
}

/// Dense-eigendecomposition oracle; capped at `d^N ≤ 4096`.
pub fn dense_ground_state(spec: &HamiltonianSpec) -> Result<GroundStateResult, EigenError> {
    const DENSE_CAP: usize = 4096;
    let dim = spec.dim();
    if dim > DENSE_CAP {
        return Err(EigenError::DimCapExceeded { dim, cap: DENSE_CAP });
    }
    let op = HamiltonianOp::new(spec)?;
    let h = dense_matrix(&op);
    let eig = h.self_adjoint_eigen(Side::Lower).expect("Hermitian EVD");
    let evals = eig.S().column_vector();
    let evecs = eig.U();
    let energy = evals[0].re;
    let degenerate = dim > 1 && (evals[1].re - energy).abs() <= DEGENERACY_GAP;
    let amps: Vec<C64> = (0..dim).map(|i| evecs[(i, 0)]).collect();
    let mut state = StateVector::new(spec.num_sites, spec.local_dim, amps)
        .expect("dimension fixed by construction")
        .normalized()
        .expect("eigenvector is nonzero");
    fix_global_phase(&mut state);
    let h_psi = op.apply(&state)?;
    let mut res_sq = 0.0;
    for (a, b) in h_psi.amplitudes().iter().zip(state.amplitudes()) {
        res_sq += (a - b * C64::new(energy, 0.0)).norm_sqr();
    }
    Ok(GroundStateResult {
        state,
        energy,
        residual: res_sq.sqrt(),
        iterations: 1,
        degenerate,
    })
}

/// Explicit `d^N × d^N` matrix of the Hamiltonian (test oracle and SVT-scale
/// helper; do not call above the dense cap).
pub fn dense_matrix(op: &HamiltonianOp) -> Mat<C64> {
    let dim = op.dim();
    let spec = op.spec();
    let n = spec.num_sites;
    let d = spec.local_dim;
    let l = spec.interaction_len;
    let rows = crate::pow_usize(d, l);
    let cols = dim / rows;
    let mut h: Mat<C64> = Mat::zeros(dim, dim);
    for term in op.terms() {
        let table = crate::qstate::site_block_table(n, d, term.site, l);
        for c in 0..cols {
            let col = &table[c * rows..(c + 1) * rows];
            for r_out in 0..rows {
                for r_in in 0..rows {
                    let v = term.op[(r_out, r_in)];
                    if v != C64::ZERO {
                        h[(col[r_out] as usize, col[r_in] as usize)] += v;
                    }
                }
            }
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Boundary;

    #[test]
    fn xx_two_sites_ground_energy() {
        let spec = HamiltonianSpec::xx(2, Boundary::Open);
        let gs = ground_state(&spec, 1e-12).unwrap();
        assert!((gs.energy + 2.0).abs() < 1e-10);
        assert!(gs.residual <= 1e-12);
        assert!(gs.state.is_normalized(1e-12));
    }

    #[test]
    fn classical_ising_ground_energy_and_degeneracy() {
        let spec = HamiltonianSpec::transverse_ising(8, 0.0, Boundary::Periodic);
        let gs = ground_state(&spec, 1e-12).unwrap();
        assert!((gs.energy + 8.0).abs() < 1e-9);
        assert!(gs.degenerate, "classical Ising ground space is two-fold");
    }

    #[test]
    fn dense_ising_small() {
        let spec = HamiltonianSpec::transverse_ising(4, 0.0, Boundary::Periodic);
        let gs = dense_ground_state(&spec).unwrap();
        assert!((gs.energy + 4.0).abs() < 1e-12);
    }

    #[test]
    fn dense_cap_enforced() {
        let spec = HamiltonianSpec::random_inhomogeneous(13, 2, 2, Boundary::Periodic, 0);
        assert!(matches!(dense_ground_state(&spec), Err(EigenError::DimCapExceeded { .. })));
    }

    #[test]
    fn phase_fix_is_idempotent() {
        let spec = HamiltonianSpec::random_inhomogeneous(5, 2, 2, Boundary::Periodic, 11);
        let gs = ground_state(&spec, 1e-12).unwrap();
        let mut once = gs.state.clone();
        fix_global_phase(&mut once);
        assert_eq!(once.amplitudes(), gs.state.amplitudes());
    }

    #[test]
    fn variational_bound_holds() {
        let spec = HamiltonianSpec::random_inhomogeneous(5, 2, 2, Boundary::Periodic, 23);
        let op = HamiltonianOp::new(&spec).unwrap();
        let gs = ground_state(&spec, 1e-12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let normal = StandardNormal;
        for _ in 0..10 {
            let amps: Vec<C64> = (0..32)
                .map(|_| C64::new(normal.sample(&mut rng), normal.sample(&mut rng)))
                .collect();
            let trial = StateVector::new(5, 2, amps).unwrap().normalized().unwrap();
            assert!(op.expectation(&trial).unwrap() >= gs.energy - 1e-12);
        }
    }
}
