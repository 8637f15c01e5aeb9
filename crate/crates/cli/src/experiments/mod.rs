//! One module per experiment subcommand. Each `run` takes a loaded config
//! and an output directory, writes its data files, and returns their paths.

pub mod alpha_fit;
pub mod compare_methods;
pub mod complete;
pub mod exact_vs_alg;
pub mod gen_state;
pub mod info;
pub mod phase_sweep;
pub mod spectra;
pub mod sweep_rates;

use wfc_core::hamiltonian::HamiltonianSpec;

/// Template spec with the system size replaced.
pub(crate) fn with_n(template: &HamiltonianSpec, n: usize) -> HamiltonianSpec {
    HamiltonianSpec { num_sites: n, ..*template }
}

/// Template spec with the seed replaced.
pub(crate) fn with_seed(template: &HamiltonianSpec, seed: u64) -> HamiltonianSpec {
    HamiltonianSpec { seed, ..*template }
}
