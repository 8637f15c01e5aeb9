//! Rank-`chi` truncation of cut matricizations.
//!
//! The sweep loop truncates the same cuts thousands of times while the state
//! drifts slowly, so alongside the exact thin-SVD path there is a certified
//! subspace-iteration path: a warm-started randomized range finder whose Ritz
//! triplets are accepted only when their residuals `‖M v_i − σ_i u_i‖` sit
//! below `certify_rtol · σ_1`. Uncertified truncations fall back to the exact
//! SVD, so the fast path can only trade time, not accuracy beyond the stated
//! tolerance. All randomness is seeded per cut; results are deterministic.

use faer::{Accum, Mat, Par};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::C64;

#[derive(Clone, Copy, Debug)]
pub struct TsvdOptions {
    /// Disable the subspace path entirely.
    pub exact_only: bool,
    /// Extra basis columns beyond `chi`.
    pub oversample: usize,
    /// Power-iteration budget before falling back to the exact SVD.
    pub max_iters: usize,
    /// Residual acceptance threshold relative to the leading singular value.
    pub certify_rtol: f64,
}

impl Default for TsvdOptions {
    fn default() -> Self {
        Self { exact_only: false, oversample: 8, max_iters: 6, certify_rtol: 1e-12 }
    }
}

/// Per-cut truncation state: warm subspace plus its deterministic seed stream.
pub struct CutEngine {
    rows: usize,
    cols: usize,
    warm: Option<Mat<C64>>,
    rng: ChaCha8Rng,
}

impl CutEngine {
    pub fn new(rows: usize, cols: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rows, cols, warm: None, rng }
    }

    /// Replace `mat` with its best rank-`chi` approximation.
    ///
    /// `slack` loosens the subspace certification when the caller's iterate
    /// is itself far from converged (inexact-inner-solve style); the floor of
    /// `certify_rtol` always applies, so end-game truncations stay at SVD
    /// precision.
    pub fn truncate(&mut self, mat: &mut Mat<C64>, chi: usize, opts: &TsvdOptions, slack: f64) {
        debug_assert_eq!((mat.nrows(), mat.ncols()), (self.rows, self.cols));
        let k = self.rows.min(self.cols);
        if chi >= k {
            return;
        }
        let b = (chi + opts.oversample).min(k);
        if !opts.exact_only && self.rows <= self.cols {
            // the subspace path pays off while the basis is well below full
            // width; very wide cuts go through the Gram matrix instead
            if k > 24 && 8 * b <= 5 * k {
                let rtol = slack.clamp(opts.certify_rtol, 1e-4);
                if self.try_subspace(mat, chi, b, opts, rtol) {
                    return;
                }
            } else if self.rows <= 128 && self.cols >= 4 * self.rows {
                self.truncate_gram(mat, chi);
                return;
            }
        }
        self.truncate_exact(mat, chi, b);
    }

    /// Projector-based truncation for wide matrices: the top-`chi`
    /// eigenvectors of `M·M^H` span the kept left singular subspace, and
    /// `M_chi = U_chi (U_chi^H M)`. One small Hermitian EVD plus three
    /// BLAS-3 products; adequate because discarded directions here carry
    /// singular values far above the eigensolver's squared-precision floor.
    fn truncate_gram(&mut self, mat: &mut Mat<C64>, chi: usize) {
        let h = &*mat * mat.adjoint();
        let eig = h.self_adjoint_eigen(faer::Side::Lower).expect("Hermitian EVD cannot fail");
        let u = eig.U();
        // eigenvalues ascend; keep the trailing chi columns, largest first
        let mut uk: Mat<C64> = Mat::zeros(self.rows, chi);
        for j in 0..chi {
            let src = self.rows - 1 - j;
            for i in 0..self.rows {
                uk[(i, j)] = u[(i, src)];
            }
        }
        let proj = uk.adjoint() * &*mat;
        faer::linalg::matmul::matmul(
            mat.as_mut(),
            Accum::Replace,
            uk.as_ref(),
            proj.as_ref(),
            C64::ONE,
            Par::Seq,
        );
    }

    fn truncate_exact(&mut self, mat: &mut Mat<C64>, chi: usize, warm_width: usize) {
        let svd = mat.thin_svd().expect("SVD of a finite matrix cannot fail");
        let u = svd.U();
        let s = svd.S().column_vector();
        let v = svd.V();
        let mut us: Mat<C64> = Mat::zeros(mat.nrows(), chi);
        for j in 0..chi {
            let sj = s[j];
            for i in 0..mat.nrows() {
                us[(i, j)] = u[(i, j)] * sj;
            }
        }
        faer::linalg::matmul::matmul(
            mat.as_mut(),
            Accum::Replace,
            us.as_ref(),
            v.get(.., ..chi).adjoint(),
            C64::ONE,
            Par::Seq,
        );
        if self.rows <= self.cols {
            let w = warm_width.min(u.ncols());
            self.warm = Some(u.get(.., ..w).to_owned());
        }
    }

    fn try_subspace(&mut self, mat: &mut Mat<C64>, chi: usize, b: usize, opts: &TsvdOptions, rtol: f64) -> bool {
        let mut q = self.prepare_basis(b);
        for _ in 0..opts.max_iters {
            // project: Z = M^H Q, so Q^H M = Vz Σ Uz^H and M ≈ (Q Vz) Σ Uz^H
            let z = mat.adjoint() * &q;
            let svd = z.thin_svd().expect("SVD of a finite matrix cannot fail");
            let uz = svd.U();
            let vz = svd.V();
            let sigma = svd.S().column_vector();
            let left = &q * vz;
            let w = &*mat * uz;
            let sigma0 = sigma[0].re;
            if sigma0 == 0.0 {
                // zero matrix: truncation is a no-op on zeros
                mat.fill(C64::ZERO);
                self.warm = Some(left);
                return true;
            }
            let mut res_max = 0.0f64;
            for j in 0..chi {
                let sj = sigma[j];
                let mut acc = 0.0;
                for i in 0..self.rows {
                    acc += (w[(i, j)] - left[(i, j)] * sj).norm_sqr();
                }
                res_max = res_max.max(acc.sqrt());
            }
            if res_max <= rtol * sigma0 {
                let mut ls: Mat<C64> = Mat::zeros(self.rows, chi);
                for j in 0..chi {
                    let sj = sigma[j];
                    for i in 0..self.rows {
                        ls[(i, j)] = left[(i, j)] * sj;
                    }
                }
                faer::linalg::matmul::matmul(
                    mat.as_mut(),
                    Accum::Replace,
                    ls.as_ref(),
                    uz.get(.., ..chi).adjoint(),
                    C64::ONE,
                    Par::Seq,
                );
                self.warm = Some(left);
                return true;
            }
            q = w.qr().compute_thin_Q();
        }
        false
    }

    /// Warm basis widened to `b` columns with seeded random padding.
    fn prepare_basis(&mut self, b: usize) -> Mat<C64> {
        let normal = StandardNormal;
        let prev_cols = self.warm.as_ref().map_or(0, |w| w.ncols().min(b));
        let mut padded: Mat<C64> = Mat::zeros(self.rows, b);
        if let Some(w) = &self.warm {
            for j in 0..prev_cols {
                for i in 0..self.rows {
                    padded[(i, j)] = w[(i, j)];
                }
            }
        }
        for j in prev_cols..b {
            for i in 0..self.rows {
                padded[(i, j)] = C64::new(normal.sample(&mut self.rng), normal.sample(&mut self.rng));
            }
        }
        if prev_cols == b {
            padded
        } else {
            padded.qr().compute_thin_Q()
        }
    }
}
