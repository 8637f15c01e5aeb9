//! Dense state vectors and their bipartition algebra.
//!
//! A state on `N` sites of local dimension `d` is a flat array of `d^N`
//! amplitudes indexed by the base-`d` digit string `(i_1 .. i_N)`, with site 1
//! the most significant digit. Reshaping the array across a contiguous block
//! of sites yields a matrix whose singular values carry the entanglement
//! across that bipartition; everything else in the crate is built on top of
//! that reshape.

use faer::{Mat, MatRef};
use thiserror::Error;

use crate::{pow_usize, Boundary, C64};

#[derive(Debug, Error)]
pub enum QStateError {
    #[error("amplitude count {got} does not equal {d}^{n}")]
    LengthMismatch { got: usize, n: usize, d: usize },
    #[error("state dimensions differ ({0} vs {1} amplitudes)")]
    DimensionMismatch(usize, usize),
    #[error("degenerate state: zero norm")]
    ZeroState,
    #[error("invalid bipartition: block_start {start}, block_len {len} on {n} sites")]
    InvalidCut { start: usize, len: usize, n: usize },
    #[error("non-prefix bipartition (block_start {0}) is not valid for open boundaries")]
    NonPrefixCut(usize),
    #[error("bond dimension must be >= 1")]
    InvalidChi,
    #[error("empty bipartition schedule")]
    EmptySchedule,
}

/// Dense complex wavefunction on a finite 1D lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_sites: usize,
    local_dim: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// Wraps an amplitude array, rejecting it unless its length is exactly `d^n`.
    pub fn new(num_sites: usize, local_dim: usize, amplitudes: Vec<C64>) -> Result<Self, QStateError> {
        let dim = pow_usize(local_dim, num_sites);
        if amplitudes.len() != dim {
            return Err(QStateError::LengthMismatch { got: amplitudes.len(), n: num_sites, d: local_dim });
        }
        Ok(Self { num_sites, local_dim, amplitudes })
    }

    /// All-zero state (not normalizable until written to).
    pub fn zeros(num_sites: usize, local_dim: usize) -> Self {
        let dim = pow_usize(local_dim, num_sites);
        Self { num_sites, local_dim, amplitudes: vec![C64::ZERO; dim] }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(num_sites: usize, local_dim: usize, index: usize) -> Self {
        let mut s = Self::zeros(num_sites, local_dim);
        s.amplitudes[index] = C64::ONE;
        s
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Total Hilbert-space dimension `d^N`.
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64, QStateError> {
        if self.dim() != other.dim() {
            return Err(QStateError::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn normalize_in_place(&mut self) -> Result<(), QStateError> {
        let n = self.norm();
        if n == 0.0 {
            return Err(QStateError::ZeroState);
        }
        let inv = 1.0 / n;
        for a in &mut self.amplitudes {
            *a *= inv;
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self, QStateError> {
        self.normalize_in_place()?;
        Ok(self)
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tol
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> Result<f64, QStateError> {
        if self.dim() != other.dim() {
            return Err(QStateError::DimensionMismatch(self.dim(), other.dim()));
        }
        let d2: f64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(d2.sqrt())
    }

    /// Cyclic shift of site labels by one (site k takes the role of site k+1).
    pub fn shift_sites(&self) -> Self {
        let d = self.local_dim;
        let n = self.num_sites;
        let dim = self.dim();
        let lead = dim / d;
        let mut out = vec![C64::ZERO; dim];
        // digit string (i_1 .. i_N) -> (i_2 .. i_N i_1)
        for (idx, a) in self.amplitudes.iter().enumerate() {
            let first = idx / lead;
            let rest = idx % lead;
            out[rest * d + first] = *a;
        }
        Self { num_sites: n, local_dim: d, amplitudes: out }
    }
}

/// Contiguous block of sites defining a bipartition of the chain.
///
/// The block is `{block_start, .., block_start + block_len - 1}` with site
/// indices 1-based and taken cyclically (mod N) for periodic chains. Open
/// chains only admit prefix cuts (`block_start == 1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bipartition {
    block_start: usize,
    block_len: usize,
}

impl Bipartition {
    pub fn new(block_start: usize, block_len: usize, num_sites: usize) -> Result<Self, QStateError> {
        if block_start < 1
            || block_start > num_sites
            || block_len < 1
            || block_len > num_sites.saturating_sub(1)
        {
            return Err(QStateError::InvalidCut { start: block_start, len: block_len, n: num_sites });
        }
        Ok(Self { block_start, block_len })
    }

    /// Prefix cut `{1, .., block_len}`.
    pub fn prefix(block_len: usize, num_sites: usize) -> Result<Self, QStateError> {
        Self::new(1, block_len, num_sites)
    }

    /// Central cut `{1, .., ⌊N/2⌋}`.
    pub fn central(num_sites: usize) -> Result<Self, QStateError> {
        Self::prefix(num_sites / 2, num_sites)
    }

    pub fn block_start(&self) -> usize {
        self.block_start
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn is_prefix(&self) -> bool {
        self.block_start == 1
    }

    /// Non-prefix cuts only make sense on periodic chains.
    pub fn validate_for_boundary(&self, boundary: Boundary) -> Result<(), QStateError> {
        if boundary == Boundary::Open && !self.is_prefix() {
            return Err(QStateError::NonPrefixCut(self.block_start));
        }
        Ok(())
    }

    /// 0-based site indices of the block, in cyclic order from `block_start`.
    pub fn block_sites(&self, num_sites: usize) -> Vec<usize> {
        (0..self.block_len)
            .map(|j| (self.block_start - 1 + j) % num_sites)
            .collect()
    }

    /// 0-based complement sites in increasing original order.
    pub fn complement_sites(&self, num_sites: usize) -> Vec<usize> {
        let block = self.block_sites(num_sites);
        (0..num_sites).filter(|s| !block.contains(s)).collect()
    }

    /// Row count of the matricization, `d^block_len`.
    pub fn rows(&self, local_dim: usize) -> usize {
        pow_usize(local_dim, self.block_len)
    }

    /// Column count of the matricization, `d^(N - block_len)`.
    pub fn cols(&self, num_sites: usize, local_dim: usize) -> usize {
        pow_usize(local_dim, num_sites - self.block_len)
    }

    /// Maximal Schmidt rank across this cut.
    pub fn min_dim(&self, num_sites: usize, local_dim: usize) -> usize {
        self.rows(local_dim).min(self.cols(num_sites, local_dim))
    }

    /// The complementary block, as a cyclic cut.
    pub fn complement(&self, num_sites: usize) -> Bipartition {
        let start = (self.block_start - 1 + self.block_len) % num_sites + 1;
        Bipartition { block_start: start, block_len: num_sites - self.block_len }
    }
}

/// Non-increasing singular values across one bipartition.
#[derive(Clone, Debug)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    bipartition: Bipartition,
}

impl SingularSpectrum {
    pub fn new(values: Vec<f64>, bipartition: Bipartition) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        Self { values, bipartition }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bipartition(&self) -> Bipartition {
        self.bipartition
    }

    /// Nuclear norm `Σ_k σ_k`; equals 1 for product states and grows with
    /// entanglement.
    pub fn renyi_half(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Von Neumann entropy `−Σ_k σ_k² ln σ_k²`, with the convention
    /// `0·ln 0 = 0`. Natural logarithm.
    pub fn renyi_one(&self) -> f64 {
        self.values
            .iter()
            .map(|&s| {
                let p = s * s;
                if p > 0.0 {
                    -p * p.ln()
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Count of singular values strictly above `cutoff`.
    pub fn effective_rank(&self, cutoff: f64) -> usize {
        assert!(cutoff > 0.0, "effective_rank cutoff must be positive");
        self.values.iter().filter(|&&s| s > cutoff).count()
    }
}

/// Gather table mapping column-major matrix slots to flat state indices.
///
/// Slot `(r, c)` of the `rows × cols` matricization holds the amplitude whose
/// block-site digits (cyclic order from `block_start`, most significant
/// first) encode `r` and whose complement-site digits (increasing site order,
/// most significant first) encode `c`. The table is laid out column-major to
/// match `faer`.
pub fn cut_gather_table(num_sites: usize, local_dim: usize, cut: Bipartition) -> Vec<u32> {
    site_block_table(num_sites, local_dim, cut.block_start, cut.block_len)
}

/// Like [`cut_gather_table`] but for any contiguous cyclic site block,
/// including whole-chain blocks (used when applying Hamiltonian terms).
pub(crate) fn site_block_table(
    num_sites: usize,
    local_dim: usize,
    block_start: usize,
    block_len: usize,
) -> Vec<u32> {
    assert!(block_start >= 1 && block_start <= num_sites && block_len >= 1 && block_len <= num_sites);
    let dim = pow_usize(local_dim, num_sites);
    assert!(dim <= u32::MAX as usize, "state too large for gather tables");
    let rows = pow_usize(local_dim, block_len);
    let cols = dim / rows;
    // stride of site k (0-based) in the flat index
    let stride = |site: usize| pow_usize(local_dim, num_sites - 1 - site);
    let block: Vec<usize> = (0..block_len).map(|j| (block_start - 1 + j) % num_sites).collect();
    let comp: Vec<usize> = (0..num_sites).filter(|s| !block.contains(s)).collect();

    // flat offset contributed by a row / column value
    let mut row_offsets = vec![0u32; rows];
    for (r, off) in row_offsets.iter_mut().enumerate() {
        let mut rem = r;
        let mut acc = 0usize;
        for (j, &site) in block.iter().enumerate() {
            let place = pow_usize(local_dim, block_len - 1 - j);
            let digit = rem / place;
            rem %= place;
            acc += digit * stride(site);
        }
        *off = acc as u32;
    }
    let mut col_offsets = vec![0u32; cols];
    for (c, off) in col_offsets.iter_mut().enumerate() {
        let mut rem = c;
        let mut acc = 0usize;
        for (j, &site) in comp.iter().enumerate() {
            let place = pow_usize(local_dim, comp.len() - 1 - j);
            let digit = rem / place;
            rem %= place;
            acc += digit * stride(site);
        }
        *off = acc as u32;
    }

    let mut table = vec![0u32; dim];
    for c in 0..cols {
        let base = col_offsets[c];
        let slot = c * rows;
        for r in 0..rows {
            table[slot + r] = base + row_offsets[r];
        }
    }
    table
}

/// Gather amplitudes through a table into a preallocated column-major matrix.
pub(crate) fn gather_into(amps: &[C64], table: &[u32], mat: &mut Mat<C64>) {
    let rows = mat.nrows();
    debug_assert_eq!(table.len(), rows * mat.ncols());
    for c in 0..mat.ncols() {
        let col = &table[c * rows..(c + 1) * rows];
        for (r, &src) in col.iter().enumerate() {
            mat[(r, c)] = amps[src as usize];
        }
    }
}

/// Scatter a column-major matrix back through a table.
pub(crate) fn scatter_from(amps: &mut [C64], table: &[u32], mat: MatRef<'_, C64>) {
    let rows = mat.nrows();
    for c in 0..mat.ncols() {
        let col = &table[c * rows..(c + 1) * rows];
        for (r, &dst) in col.iter().enumerate() {
            amps[dst as usize] = mat[(r, c)];
        }
    }
}

/// Reshape the state across `cut` into its `d^m × d^(N−m)` matricization.
pub fn matricize(state: &StateVector, cut: Bipartition) -> Result<Mat<C64>, QStateError> {
    let n = state.num_sites();
    let d = state.local_dim();
    // re-validate against this state's geometry
    let cut = Bipartition::new(cut.block_start(), cut.block_len(), n)?;
    let table = cut_gather_table(n, d, cut);
    let mut mat = Mat::zeros(cut.rows(d), cut.cols(n, d));
    gather_into(state.amplitudes(), &table, &mut mat);
    Ok(mat)
}

/// Inverse of [`matricize`]; exact by construction.
pub fn dematricize(
    mat: MatRef<'_, C64>,
    num_sites: usize,
    local_dim: usize,
    cut: Bipartition,
) -> Result<StateVector, QStateError> {
    let cut = Bipartition::new(cut.block_start(), cut.block_len(), num_sites)?;
    let rows = cut.rows(local_dim);
    let cols = cut.cols(num_sites, local_dim);
    if mat.nrows() != rows || mat.ncols() != cols {
        return Err(QStateError::DimensionMismatch(mat.nrows() * mat.ncols(), rows * cols));
    }
    let table = cut_gather_table(num_sites, local_dim, cut);
    let mut state = StateVector::zeros(num_sites, local_dim);
    scatter_from(state.amplitudes_mut(), &table, mat);
    Ok(state)
}

/// Singular values of the matricization across `cut`, non-increasing.
pub fn singular_values(state: &StateVector, cut: Bipartition) -> Result<SingularSpectrum, QStateError> {
    if state.norm_sqr() == 0.0 {
        return Err(QStateError::ZeroState);
    }
    let mat = matricize(state, cut)?;
    let sv = mat
        .singular_values()
        .expect("SVD of a finite matrix cannot fail");
    Ok(SingularSpectrum::new(sv, cut))
}

/// Arithmetic mean of the nuclear norm over a schedule of bipartitions.
pub fn mean_block_renyi_half(state: &StateVector, schedule: &[Bipartition]) -> Result<f64, QStateError> {
    if schedule.is_empty() {
        return Err(QStateError::EmptySchedule);
    }
    let mut acc = 0.0;
    for &cut in schedule {
        acc += singular_values(state, cut)?.renyi_half();
    }
    Ok(acc / schedule.len() as f64)
}

/// Best rank-`chi` approximation across `cut`, reshaped back to a state.
///
/// Keeps the `chi` largest singular triplets; the output is not renormalized.
/// `chi` at or above the cut's maximal rank reproduces the input.
pub fn truncate_cut(state: &StateVector, cut: Bipartition, chi: usize) -> Result<StateVector, QStateError> {
    if chi < 1 {
        return Err(QStateError::InvalidChi);
    }
    let n = state.num_sites();
    let d = state.local_dim();
    let cut = Bipartition::new(cut.block_start(), cut.block_len(), n)?;
    if chi >= cut.min_dim(n, d) {
        return Ok(state.clone());
    }
    let mat = matricize(state, cut)?;
    let truncated = truncate_matrix(mat.as_ref(), chi);
    dematricize(truncated.as_ref(), n, d, cut)
}

/// Rank-`chi` truncation of a matrix via exact thin SVD.
pub(crate) fn truncate_matrix(mat: MatRef<'_, C64>, chi: usize) -> Mat<C64> {
    let k = mat.nrows().min(mat.ncols());
    if chi >= k {
        return mat.to_owned();
    }
    let svd = mat.thin_svd().expect("SVD of a finite matrix cannot fail");
    let u = svd.U();
    let s = svd.S();
    let v = svd.V();
    // U_chi · diag(S_chi) · V_chi^H
    let mut us = Mat::zeros(mat.nrows(), chi);
    for j in 0..chi {
        let sj = s[j];
        for i in 0..mat.nrows() {
            us[(i, j)] = u[(i, j)] * sj;
        }
    }
    &us * v.get(.., ..chi).adjoint()
}

/// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`; invariant under global phase and scale.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, QStateError> {
    let na = a.norm_sqr();
    let nb = b.norm_sqr();
    if na == 0.0 || nb == 0.0 {
        return Err(QStateError::ZeroState);
    }
    let ov = a.inner(b)?;
    Ok((ov.norm_sqr() / (na * nb)).clamp(0.0, 1.0))
}

/// `1 − fidelity`, the error measure reported by all experiments.
pub fn fidelity_error(a: &StateVector, b: &StateVector) -> Result<f64, QStateError> {
    Ok(1.0 - fidelity(a, b)?)
}
