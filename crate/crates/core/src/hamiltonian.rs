//! 1D local Hamiltonians `H = Σ_i h_i` where each block operator `h_i` acts
//! on `l` consecutive sites (cyclically under periodic boundaries).
//!
//! Supported models: seeded random Hermitian ensembles (inhomogeneous or
//! translation invariant), the critical XX chain, and the transverse-field
//! Ising chain with the field folded into the bond terms. Application is
//! matrix-free: each term is applied as a `d^l × d^(N−l)` matrix product
//! after permuting its block sites to the front.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::{gather_into, site_block_table};
use crate::{pow_usize, Boundary, C64, LatticeShape, StateVector};

/// Seed-stream layout: term `i` draws from stream `i`, so a term's operator
/// does not depend on how many terms a chain has. The eigensolver's start
/// vector uses [`START_VECTOR_STREAM`].
pub const START_VECTOR_STREAM: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("interaction length {l} exceeds chain length {n}")]
    InteractionTooLong { l: usize, n: usize },
    #[error("interaction length must be at least 2 (got {0})")]
    InteractionTooShort(usize),
    #[error("{kind:?} requires d = 2 and l = 2 (got d = {d}, l = {l})")]
    NamedModelShape { kind: ModelKind, d: usize, l: usize },
    #[error("transverse_ising requires a field strength lambda >= 0")]
    MissingLambda,
    #[error("lambda is only meaningful for transverse_ising")]
    UnexpectedLambda,
    #[error("state has {got} sites of dimension {got_d}, spec wants {want} of {want_d}")]
    DimensionMismatch { got: usize, got_d: usize, want: usize, want_d: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Independent GUE-style Hermitian block per site.
    RandomInhomogeneous,
    /// One GUE-style Hermitian block reused at every site.
    RandomHomogeneous,
    /// `X_i X_{i+1} + Y_i Y_{i+1}` (critical).
    Xx,
    /// `−Z_i Z_{i+1} − λ X_i`, the field split evenly between adjacent bonds.
    TransverseIsing,
}

/// Model definition; identical specs (including seed) regenerate bit-identical
/// terms.
///
/// Serializes to the flat document `{n, d, l, boundary, kind, lambda, seed}`
/// embedded in all experiment outputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    #[serde(rename = "n")]
    pub num_sites: usize,
    #[serde(rename = "d")]
    pub local_dim: usize,
    #[serde(rename = "l")]
    pub interaction_len: usize,
    pub boundary: Boundary,
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub seed: u64,
}

impl HamiltonianSpec {
    pub fn random_inhomogeneous(n: usize, d: usize, l: usize, boundary: Boundary, seed: u64) -> Self {
        Self { num_sites: n, local_dim: d, interaction_len: l, boundary, kind: ModelKind::RandomInhomogeneous, lambda: None, seed }
    }

    pub fn random_homogeneous(n: usize, d: usize, l: usize, boundary: Boundary, seed: u64) -> Self {
        Self { num_sites: n, local_dim: d, interaction_len: l, boundary, kind: ModelKind::RandomHomogeneous, lambda: None, seed }
    }

    pub fn xx(n: usize, boundary: Boundary) -> Self {
        Self { num_sites: n, local_dim: 2, interaction_len: 2, boundary, kind: ModelKind::Xx, lambda: None, seed: 0 }
    }

    pub fn transverse_ising(n: usize, lambda: f64, boundary: Boundary) -> Self {
        Self { num_sites: n, local_dim: 2, interaction_len: 2, boundary, kind: ModelKind::TransverseIsing, lambda: Some(lambda), seed: 0 }
    }

    pub fn shape(&self) -> LatticeShape {
        LatticeShape::new(self.num_sites, self.local_dim, self.boundary)
    }

    pub fn dim(&self) -> usize {
        pow_usize(self.local_dim, self.num_sites)
    }

    pub fn validate(&self) -> Result<(), HamiltonianError> {
        if self.interaction_len < 2 {
            return Err(HamiltonianError::InteractionTooShort(self.interaction_len));
        }
        if self.interaction_len > self.num_sites {
            return Err(HamiltonianError::InteractionTooLong { l: self.interaction_len, n: self.num_sites });
        }
        match self.kind {
            ModelKind::Xx | ModelKind::TransverseIsing => {
                if self.local_dim != 2 || self.interaction_len != 2 {
                    return Err(HamiltonianError::NamedModelShape {
                        kind: self.kind,
                        d: self.local_dim,
                        l: self.interaction_len,
                    });
                }
                if self.kind == ModelKind::TransverseIsing {
                    match self.lambda {
                        Some(l) if l >= 0.0 => {}
                        _ => return Err(HamiltonianError::MissingLambda),
                    }
                } else if self.lambda.is_some() {
                    return Err(HamiltonianError::UnexpectedLambda);
                }
            }
            _ => {
                if self.lambda.is_some() {
                    return Err(HamiltonianError::UnexpectedLambda);
                }
            }
        }
        Ok(())
    }

    /// Compact label used in output tables.
    pub fn label(&self) -> String {
        let kind = match self.kind {
            ModelKind::RandomInhomogeneous => "random_inhom".to_string(),
            ModelKind::RandomHomogeneous => "random_hom".to_string(),
            ModelKind::Xx => "xx".to_string(),
            ModelKind::TransverseIsing => {
                format!("ising_lam{}", self.lambda.unwrap_or(f64::NAN))
            }
        };
        let b = match self.boundary {
            Boundary::Open => "obc",
            Boundary::Periodic => "pbc",
        };
        format!("{kind}_n{}_d{}_l{}_{b}_s{}", self.num_sites, self.local_dim, self.interaction_len, self.seed)
    }
}

/// One Hermitian block operator `h` and the 1-based site it starts on.
#[derive(Clone, Debug)]
pub struct LocalTerm {
    pub site: usize,
    pub op: Mat<C64>,
}

fn hermitize(g: Mat<C64>) -> Mat<C64> {
    let n = g.nrows();
    let mut h = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            h[(i, j)] = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
        }
    }
    h
}

/// GUE-style block `(G + G†)/2`, entries of `G` drawn row-major (re, then im)
/// from the given stream of the model seed.
fn random_hermitian(dim: usize, seed: u64, stream: u64) -> Mat<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let normal = StandardNormal;
    let mut g = Mat::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            g[(i, j)] = C64::new(re, im);
        }
    }
    hermitize(g)
}

fn kron(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = Mat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

fn pauli_x() -> Mat<C64> {
    let mut m = Mat::zeros(2, 2);
    m[(0, 1)] = C64::ONE;
    m[(1, 0)] = C64::ONE;
    m
}

fn pauli_y() -> Mat<C64> {
    let mut m = Mat::zeros(2, 2);
    m[(0, 1)] = C64::new(0.0, -1.0);
    m[(1, 0)] = C64::new(0.0, 1.0);
    m
}

fn pauli_z() -> Mat<C64> {
    let mut m = Mat::zeros(2, 2);
    m[(0, 0)] = C64::ONE;
    m[(1, 1)] = -C64::ONE;
    m
}

fn identity2() -> Mat<C64> {
    Mat::identity(2, 2)
}

/// Block operators of the Hamiltonian: `N − (l − 1)` terms at sites
/// `1..=N−l+1` for open chains, `N` terms at sites `1..=N` for periodic ones.
pub fn generate_terms(spec: &HamiltonianSpec) -> Result<Vec<LocalTerm>, HamiltonianError> {
    spec.validate()?;
    let n = spec.num_sites;
    let l = spec.interaction_len;
    let count = match spec.boundary {
        Boundary::Open => n - (l - 1),
        Boundary::Periodic => n,
    };
    let dl = pow_usize(spec.local_dim, l);
    let mut terms = Vec::with_capacity(count);
    match spec.kind {
        ModelKind::RandomInhomogeneous => {
            for i in 0..count {
                terms.push(LocalTerm { site: i + 1, op: random_hermitian(dl, spec.seed, i as u64) });
            }
        }
        ModelKind::RandomHomogeneous => {
            let op = random_hermitian(dl, spec.seed, 0);
            for i in 0..count {
                terms.push(LocalTerm { site: i + 1, op: op.clone() });
            }
        }
        ModelKind::Xx => {
            let op = &kron(&pauli_x(), &pauli_x()) + &kron(&pauli_y(), &pauli_y());
            for i in 0..count {
                terms.push(LocalTerm { site: i + 1, op: op.clone() });
            }
        }
        ModelKind::TransverseIsing => {
            let lambda = spec.lambda.expect("validated above");
            let zz = kron(&pauli_z(), &pauli_z());
            let x_left = kron(&pauli_x(), &identity2());
            let x_right = kron(&identity2(), &pauli_x());
            let half = C64::new(lambda * 0.5, 0.0);
            let bond = |extra_left: bool, extra_right: bool| -> Mat<C64> {
                let mut op = Mat::zeros(4, 4);
                for i in 0..4 {
                    for j in 0..4 {
                        let mut v = -zz[(i, j)] - half * (x_left[(i, j)] + x_right[(i, j)]);
                        if extra_left {
                            v -= half * x_left[(i, j)];
                        }
                        if extra_right {
                            v -= half * x_right[(i, j)];
                        }
                        op[(i, j)] = v;
                    }
                }
                op
            };
            for i in 0..count {
                // open-boundary endpoint terms absorb the unpaired half-field
                let (el, er) = match spec.boundary {
                    Boundary::Open => (i == 0, i == count - 1),
                    Boundary::Periodic => (false, false),
                };
                terms.push(LocalTerm { site: i + 1, op: bond(el, er) });
            }
        }
    }
    Ok(terms)
}

/// A Hamiltonian prepared for repeated matrix-free application.
pub struct HamiltonianOp {
    spec: HamiltonianSpec,
    terms: Vec<LocalTerm>,
    tables: Vec<Vec<u32>>,
    rows: usize,
    cols: usize,
}

impl HamiltonianOp {
    pub fn new(spec: &HamiltonianSpec) -> Result<Self, HamiltonianError> {
        let terms = generate_terms(spec)?;
        let n = spec.num_sites;
        let d = spec.local_dim;
        let l = spec.interaction_len;
        let tables = terms.iter().map(|t| site_block_table(n, d, t.site, l)).collect();
        Ok(Self { spec: *spec, terms, tables, rows: pow_usize(d, l), cols: pow_usize(d, n - l) })
    }

    pub fn spec(&self) -> &HamiltonianSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[LocalTerm] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn check_state(&self, state: &StateVector) -> Result<(), HamiltonianError> {
        if state.num_sites() != self.spec.num_sites || state.local_dim() != self.spec.local_dim {
            return Err(HamiltonianError::DimensionMismatch {
                got: state.num_sites(),
                got_d: state.local_dim(),
                want: self.spec.num_sites,
                want_d: self.spec.local_dim,
            });
        }
        Ok(())
    }

    /// `H|ψ⟩` as a new state; terms are summed in fixed order.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector, HamiltonianError> {
        self.check_state(state)?;
        let mut out = StateVector::zeros(self.spec.num_sites, self.spec.local_dim);
        let mut ws = ApplyWorkspace::new(self.rows, self.cols);
        self.apply_slices(state.amplitudes(), out.amplitudes_mut(), &mut ws);
        Ok(out)
    }

    /// Low-level apply on raw amplitude slices; `dst` is overwritten.
    pub fn apply_slices(&self, src: &[C64], dst: &mut [C64], ws: &mut ApplyWorkspace) {
        dst.fill(C64::ZERO);
        for (term, table) in self.terms.iter().zip(&self.tables) {
            gather_into(src, table, &mut ws.gathered);
            faer::linalg::matmul::matmul(
                ws.product.as_mut(),
                faer::Accum::Replace,
                term.op.as_ref(),
                ws.gathered.as_ref(),
                C64::ONE,
                faer::Par::Seq,
            );
            // scatter-add back through the same permutation
            let rows = self.rows;
            for c in 0..self.cols {
                let col = &table[c * rows..(c + 1) * rows];
                for (r, &dst_idx) in col.iter().enumerate() {
                    dst[dst_idx as usize] += ws.product[(r, c)];
                }
            }
        }
    }

    /// Workspace sized for this operator.
    pub fn workspace(&self) -> ApplyWorkspace {
        ApplyWorkspace::new(self.rows, self.cols)
    }

    /// Rayleigh quotient `⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩` (real for Hermitian terms).
    pub fn expectation(&self, state: &StateVector) -> Result<f64, HamiltonianError> {
        let h_psi = self.apply(state)?;
        let num = state.inner(&h_psi).expect("dims already checked");
        Ok(num.re / state.norm_sqr())
    }
}

/// Scratch matrices for one matrix-free term application.
pub struct ApplyWorkspace {
    gathered: Mat<C64>,
    product: Mat<C64>,
}

impl ApplyWorkspace {
    fn new(rows: usize, cols: usize) -> Self {
        Self { gathered: Mat::zeros(rows, cols), product: Mat::zeros(rows, cols) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn term_counts_follow_boundary() {
        let open = HamiltonianSpec::random_inhomogeneous(4, 2, 2, Boundary::Open, 1);
        assert_eq!(generate_terms(&open).unwrap().len(), 3);
        let sites: Vec<usize> = generate_terms(&open).unwrap().iter().map(|t| t.site).collect();
        assert_eq!(sites, vec![1, 2, 3]);
        let periodic = HamiltonianSpec::random_inhomogeneous(4, 2, 2, Boundary::Periodic, 1);
        assert_eq!(generate_terms(&periodic).unwrap().len(), 4);
    }

    #[test]
    fn terms_are_hermitian_and_deterministic() {
        let spec = HamiltonianSpec::random_inhomogeneous(5, 2, 3, Boundary::Periodic, 42);
        let a = generate_terms(&spec).unwrap();
        let b = generate_terms(&spec).unwrap();
        for (ta, tb) in a.iter().zip(&b) {
            for i in 0..ta.op.nrows() {
                for j in 0..ta.op.ncols() {
                    assert_eq!(ta.op[(i, j)], tb.op[(i, j)], "bit-exact regeneration");
                    let delta = ta.op[(i, j)] - ta.op[(j, i)].conj();
                    assert!(delta.norm() <= 1e-12, "Hermitian");
                }
            }
        }
    }

    #[test]
    fn homogeneous_repeats_one_block() {
        let spec = HamiltonianSpec::random_homogeneous(5, 2, 2, Boundary::Periodic, 9);
        let terms = generate_terms(&spec).unwrap();
        for t in &terms[1..] {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(t.op[(i, j)], terms[0].op[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn named_models_validate_shape() {
        let mut bad = HamiltonianSpec::xx(4, Boundary::Open);
        bad.local_dim = 3;
        assert!(matches!(bad.validate(), Err(HamiltonianError::NamedModelShape { .. })));
        let ti = HamiltonianSpec { lambda: None, ..HamiltonianSpec::transverse_ising(4, 0.5, Boundary::Open) };
        assert!(matches!(ti.validate(), Err(HamiltonianError::MissingLambda)));
        let long = HamiltonianSpec::random_inhomogeneous(3, 2, 4, Boundary::Open, 0);
        assert!(matches!(long.validate(), Err(HamiltonianError::InteractionTooLong { .. })));
    }

    #[test]
    fn ising_classical_state_is_eigenvector() {
        let spec = HamiltonianSpec::transverse_ising(8, 0.0, Boundary::Periodic);
        let op = HamiltonianOp::new(&spec).unwrap();
        let zero = StateVector::basis_state(8, 2, 0);
        let h = op.apply(&zero).unwrap();
        for (a, b) in h.amplitudes().iter().zip(zero.amplitudes()) {
            assert!((a - b * C64::new(-8.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_zero_state_gives_zero() {
        let spec = HamiltonianSpec::random_inhomogeneous(4, 2, 2, Boundary::Periodic, 3);
        let op = HamiltonianOp::new(&spec).unwrap();
        let out = op.apply(&StateVector::zeros(4, 2)).unwrap();
        assert!(out.norm() == 0.0);
    }

    #[test]
    fn apply_is_linear() {
        let spec = HamiltonianSpec::random_inhomogeneous(4, 2, 2, Boundary::Periodic, 8);
        let op = HamiltonianOp::new(&spec).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut rand_state = || {
            let amps: Vec<C64> = (0..16)
                .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            StateVector::new(4, 2, amps).unwrap()
        };
        let psi1 = rand_state();
        let psi2 = rand_state();
        let a = C64::new(0.3, -1.1);
        let b = C64::new(-0.4, 0.2);
        let mut combo = StateVector::zeros(4, 2);
        for i in 0..16 {
            combo.amplitudes_mut()[i] = a * psi1.amplitudes()[i] + b * psi2.amplitudes()[i];
        }
        let lhs = op.apply(&combo).unwrap();
        let h1 = op.apply(&psi1).unwrap();
        let h2 = op.apply(&psi2).unwrap();
        for i in 0..16 {
            let rhs = a * h1.amplitudes()[i] + b * h2.amplitudes()[i];
            assert!((lhs.amplitudes()[i] - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn spec_json_shape() {
        let spec = HamiltonianSpec::transverse_ising(6, 0.8, Boundary::Open);
        let doc = serde_json::to_value(&spec).unwrap();
        assert_eq!(doc["n"], 6);
        assert_eq!(doc["d"], 2);
        assert_eq!(doc["l"], 2);
        assert_eq!(doc["boundary"], "open");
        assert_eq!(doc["kind"], "transverse_ising");
        assert_eq!(doc["lambda"], 0.8);
        let back: HamiltonianSpec = serde_json::from_value(doc).unwrap();
        assert_eq!(back, spec);
    }
}
