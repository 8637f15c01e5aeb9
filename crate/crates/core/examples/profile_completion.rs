//! Rough timing probe for ground-state solves and completion runs.
//!
//! `cargo run --release -p wfc-core --example profile_completion -- [N] [rate]`

use std::time::Instant;

use wfc_core::completers::{tensor_complete, CompleterConfig};
use wfc_core::eigensolve::ground_state;
use wfc_core::hamiltonian::HamiltonianSpec;
use wfc_core::qstate::fidelity_error;
use wfc_core::sampling::draw_mask;
use wfc_core::Boundary;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let rate: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.5);

    let spec = HamiltonianSpec::random_inhomogeneous(n, 2, 2, Boundary::Periodic, 7);
    let t0 = Instant::now();
    let gs = ground_state(&spec, 1e-12).unwrap();
    println!(
        "ground state N={n}: {:.2}s ({} matvecs, residual {:.1e}, E = {:.6})",
        t0.elapsed().as_secs_f64(),
        gs.iterations,
        gs.residual,
        gs.energy
    );

    let mask = draw_mask(&gs.state, rate, 1).unwrap();
    let cfg = CompleterConfig::default();
    let t1 = Instant::now();
    let (done, trace) = tensor_complete(spec.shape(), &mask, &cfg, Some(&gs.state)).unwrap();
    let dt = t1.elapsed().as_secs_f64();
    let err = fidelity_error(&done, &gs.state).unwrap();
    let sweeps = trace.records.len();
    let max_chi = trace.records.last().map(|r| r.chi).unwrap_or(0);
    println!(
        "tensor_complete N={n} rate={rate}: {dt:.2}s, {sweeps} sweeps, chi reached {max_chi}, fidelity error {err:.3e}"
    );
    let per_chi: f64 = sweeps as f64 / (max_chi.saturating_sub(1)) as f64;
    println!("  avg sweeps per chi level: {per_chi:.2}");
}
