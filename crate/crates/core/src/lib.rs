//! Reconstruction of ground-state wavefunctions of 1D local Hamiltonians from
//! a random partial sample of their amplitudes.
//!
//! The crate is organized around dense state vectors on finite chains of `N`
//! sites with local dimension `d`. Ground states of local Hamiltonians carry
//! little entanglement across contiguous bipartitions, which makes their
//! bipartition matricizations nearly low-rank; the completers in this crate
//! exploit that structure to fill in unsampled amplitudes.
//!
//! Module map:
//! - [`qstate`]: state vectors, bipartition reshapes, singular spectra,
//!   entanglement measures, truncated-SVD projection, fidelity.
//! - [`hamiltonian`]: 1D local Hamiltonians (seeded random ensembles, XX,
//!   transverse-field Ising) and their matrix-free application.
//! - [`eigensolve`]: Lanczos ground states plus a dense oracle.
//! - [`sampling`]: random amplitude masks and the data-constraint projection.
//! - [`completers`]: bond-dimension-ramping tensor completion, its single-cut
//!   matrix variant, an SVT baseline, and exact entanglement minimizers.
//! - [`analysis`]: order statistics and exponential fits of coefficient
//!   errors versus system size.
//! - [`io`]: binary containers for states (`WFC1`) and masks (`WFM1`).

pub mod analysis;
pub mod completers;
pub mod eigensolve;
pub mod hamiltonian;
pub mod io;
pub mod qstate;
pub mod sampling;

use serde::{Deserialize, Serialize};

/// Complex double-precision scalar used for all amplitudes and operators.
pub type C64 = num_complex::Complex64;

/// Boundary conditions of the 1D chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Lattice geometry shared by states, Hamiltonians, and completers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeShape {
    pub num_sites: usize,
    pub local_dim: usize,
    pub boundary: Boundary,
}

impl LatticeShape {
    pub fn new(num_sites: usize, local_dim: usize, boundary: Boundary) -> Self {
        Self { num_sites, local_dim, boundary }
    }

    /// Total Hilbert-space dimension `d^N`.
    pub fn dim(&self) -> usize {
        pow_usize(self.local_dim, self.num_sites)
    }
}

/// `d^n` with overflow panics surfaced early rather than wrapped.
pub fn pow_usize(d: usize, n: usize) -> usize {
    let mut out = 1usize;
    for _ in 0..n {
        out = out.checked_mul(d).expect("Hilbert-space dimension overflows usize");
    }
    out
}

pub use qstate::{Bipartition, SingularSpectrum, StateVector};
