//! Singular value thresholding on the central-cut matricization.
//!
//! The classic noiseless matrix-completion iteration: `Y⁰ = 0`, then
//! `X = shrink_τ(Y)` followed by `Y ← Y + δ·P_Ω(M − X)`, where `P_Ω` keeps the
//! sampled entries. Soft-thresholding works unchanged on complex matrices
//! since it only touches singular values.

use faer::Mat;

use super::{CompleterError, ConvergenceTrace, TraceRecord};
use crate::qstate::{self, Bipartition};
use crate::sampling::{self, SampleMask};
use crate::{C64, LatticeShape, StateVector};

#[derive(Clone, Copy, Debug)]
pub struct SvtOptions {
    /// Shrinkage threshold; `None` picks the standard `5·√(rows·cols)`.
    pub tau: Option<f64>,
    /// Step size; `None` picks `1.2 / rate`.
    pub delta: Option<f64>,
    pub max_iters: usize,
    /// Stop when `‖P_Ω(X − M)‖ / ‖P_Ω(M)‖` drops below this.
    pub tol: f64,
}

impl Default for SvtOptions {
    fn default() -> Self {
        Self { tau: None, delta: None, max_iters: 2000, tol: 1e-7 }
    }
}

/// Soft-threshold the singular values of a matrix by `tau` (`tau = 0` is an
/// exact SVD round trip). Returns the shrunk matrix and its post-shrink rank.
pub fn soft_threshold(mat: &Mat<C64>, tau: f64) -> (Mat<C64>, usize) {
    let svd = mat.thin_svd().expect("SVD of a finite matrix cannot fail");
    let u = svd.U();
    let s = svd.S().column_vector();
    let v = svd.V();
    let k = s.nrows();
    let mut rank = 0;
    for j in 0..k {
        if s[j].re - tau > 0.0 {
            rank += 1;
        }
    }
    let mut us: Mat<C64> = Mat::zeros(mat.nrows(), rank);
    for j in 0..rank {
        let sj = s[j].re - tau;
        for i in 0..mat.nrows() {
            us[(i, j)] = u[(i, j)] * C64::new(sj, 0.0);
        }
    }
    if rank == 0 {
        return (Mat::zeros(mat.nrows(), mat.ncols()), 0);
    }
    (&us * v.get(.., ..rank).adjoint(), rank)
}

/// SVT completion of the central-cut matricization of a masked state.
pub fn svt_complete(
    shape: LatticeShape,
    mask: &SampleMask,
    opts: &SvtOptions,
    exact: Option<&StateVector>,
) -> Result<(StateVector, ConvergenceTrace), CompleterError> {
    if mask.total() != shape.dim() {
        return Err(CompleterError::ShapeMismatch { mask: mask.total(), lattice: shape.dim() });
    }
    let n = shape.num_sites;
    let d = shape.local_dim;
    let cut = Bipartition::central(n)?;
    let rows = cut.rows(d);
    let cols = cut.cols(n, d);
    let tau = opts.tau.unwrap_or(5.0 * ((rows * cols) as f64).sqrt());
    let delta = opts.delta.unwrap_or(1.2 / mask.rate());
    if !(tau >= 0.0) || !(delta > 0.0) {
        return Err(CompleterError::BadConfig("svt needs tau >= 0 and delta > 0".into()));
    }

    // sampled entries in matrix coordinates (central prefix cut: the reshape
    // is index arithmetic, no permutation)
    let omega: Vec<(usize, usize, C64)> = mask
        .indices()
        .iter()
        .zip(mask.values())
        .map(|(&i, &v)| (i / cols, i % cols, v))
        .collect();
    let norm_m: f64 = omega.iter().map(|&(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt();
    if norm_m == 0.0 {
        return Err(CompleterError::BadConfig("all sampled values are zero".into()));
    }

    let mut y: Mat<C64> = Mat::zeros(rows, cols);
    let mut x: Mat<C64> = Mat::zeros(rows, cols);
    let mut trace = ConvergenceTrace::default();
    let mut converged = false;
    for iter in 1..=opts.max_iters {
        let (shrunk, rank) = soft_threshold(&y, tau);
        x = shrunk;
        let mut res = 0.0f64;
        for &(r, c, v) in &omega {
            res += (x[(r, c)] - v).norm_sqr();
        }
        let rel = res.sqrt() / norm_m;
        let fidelity_error = match exact {
            Some(e) => {
                let st = state_from_matrix(&x, shape, cut)?;
                if st.norm_sqr() > 0.0 {
                    Some(qstate::fidelity_error(&st, e)?)
                } else {
                    Some(1.0)
                }
            }
            None => None,
        };
        trace.records.push(TraceRecord {
            chi: rank,
            sweep: iter,
            cuts_visited: iter as u64,
            fidelity_error,
            mean_s_half: None,
            rel_change: rel,
        });
        if rel <= opts.tol {
            converged = true;
            break;
        }
        if rel > 1e6 {
            return Err(CompleterError::SvtDiverged);
        }
        for &(r, c, v) in &omega {
            y[(r, c)] += (v - x[(r, c)]) * delta;
        }
    }
    let _ = converged; // non-convergence is recorded in the trace, not an error

    let mut state = state_from_matrix(&x, shape, cut)?;
    if state.norm_sqr() > 0.0 {
        state.normalize_in_place()?;
    }
    sampling::project_data_in_place(&mut state, mask)?;
    Ok((state, trace))
}

fn state_from_matrix(x: &Mat<C64>, shape: LatticeShape, cut: Bipartition) -> Result<StateVector, CompleterError> {
    Ok(qstate::dematricize(x.as_ref(), shape.num_sites, shape.local_dim, cut)?)
}
