//! Slower end-to-end claims from the experiment layer: spectra tails,
//! convergence depth, method agreement, and monotonicity in rate and size.
//! These complement the fast unit suites and the acceptance criteria.

use wfc_core::analysis::median;
use wfc_core::completers::{
    build_schedule, matrix_complete, svt_complete, tensor_complete, CompleterConfig,
    ScheduleKind, SvtOptions,
};
use wfc_core::eigensolve::{ground_state_of, LanczosOptions};
use wfc_core::hamiltonian::{HamiltonianOp, HamiltonianSpec};
use wfc_core::qstate::{self, Bipartition};
use wfc_core::sampling::draw_mask;
use wfc_core::{Boundary, C64, LatticeShape, StateVector};

fn solve(spec: &HamiltonianSpec) -> StateVector {
    let op = HamiltonianOp::new(spec).unwrap();
    ground_state_of(&op, LanczosOptions { tol: 1e-12, detect_degeneracy: false, ..Default::default() })
        .unwrap()
        .state
}

fn desk_completer() -> CompleterConfig {
    CompleterConfig { k_max: 8, inner_tol: 1e-7, ..Default::default() }
}

#[test]
fn random_l2_ground_state_is_high_rank_but_not_full() {
    // effective rank across the central cut sits far above low-rank but
    // below the 256 maximum for N=16, l=2 chains
    let spec = HamiltonianSpec::random_inhomogeneous(16, 2, 2, Boundary::Periodic, 11);
    let psi = solve(&spec);
    let sv = qstate::singular_values(&psi, Bipartition::central(16).unwrap()).unwrap();
    let reff = sv.effective_rank(1e-10);
    assert!(reff > 64 && reff < 256, "effective rank {reff}");
}

#[test]
fn xx_spectrum_tail_dominates_random_chains() {
    // the critical XX chain keeps far larger deep singular values than
    // random chains of the same interaction length
    let xx = solve(&HamiltonianSpec::xx(16, Boundary::Periodic));
    let cut = Bipartition::central(16).unwrap();
    let sigma_xx = qstate::singular_values(&xx, cut).unwrap().values()[99];
    let mut sigma_random = Vec::new();
    for seed in 0..5 {
        let psi = solve(&HamiltonianSpec::random_inhomogeneous(16, 2, 2, Boundary::Periodic, seed));
        sigma_random.push(qstate::singular_values(&psi, cut).unwrap().values()[99]);
    }
    let med = median(&sigma_random).unwrap();
    assert!(
        sigma_xx > med,
        "σ₁₀₀(XX) = {sigma_xx:.3e} vs random median {med:.3e}"
    );
}

#[test]
fn fig4_style_convergence_drops_many_orders() {
    // N=16, l=3, open chain at 50% sampling: the trace's fidelity error
    // falls at least six orders of magnitude from its starting point
    let spec = HamiltonianSpec::random_inhomogeneous(16, 2, 3, Boundary::Open, 7);
    let psi = solve(&spec);
    let mask = draw_mask(&psi, 0.5, 1).unwrap();
    let cfg = CompleterConfig {
        schedule_kind: ScheduleKind::PrefixCuts,
        k_max: 12,
        inner_tol: 1e-8,
        ..Default::default()
    };
    let (_, trace) = tensor_complete(spec.shape(), &mask, &cfg, Some(&psi)).unwrap();
    let first = trace.records.first().and_then(|r| r.fidelity_error).unwrap();
    let last = trace.final_fidelity_error().unwrap();
    assert!(
        last <= first * 1e-6,
        "initial ε {first:.3e}, final ε {last:.3e}"
    );
}

#[test]
fn matrix_variant_completes_synthetic_low_rank_state() {
    // rank-3 across the central cut, 90% sampled: recovered once χ ≥ 3
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut amps = vec![C64::ZERO; 1024];
    for _ in 0..3 {
        let a: Vec<C64> = (0..32).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let b: Vec<C64> = (0..32).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        for r in 0..32 {
            for c in 0..32 {
                amps[r * 32 + c] += a[r] * b[c];
            }
        }
    }
    let exact = StateVector::new(10, 2, amps).unwrap().normalized().unwrap();
    let shape = LatticeShape::new(10, 2, Boundary::Open);
    let mask = draw_mask(&exact, 0.9, 3).unwrap();
    let cfg = CompleterConfig { k_max: 60, inner_tol: 1e-10, ..Default::default() };
    let (done, _) = matrix_complete(shape, &mask, &cfg, Some(&exact)).unwrap();
    let err = qstate::fidelity_error(&done, &exact).unwrap();
    assert!(err <= 1e-8, "fidelity error {err:.3e}");
}

#[test]
fn tensor_result_entropy_not_above_matrix_result() {
    // the tensor variant minimizes the block-averaged nuclear norm over all
    // cuts; the matrix variant, seeing only one cut, cannot do better in
    // that objective (median over paired runs)
    let mut diffs = Vec::new();
    for seed in 0..10u64 {
        let spec = HamiltonianSpec::random_inhomogeneous(14, 2, 2, Boundary::Periodic, seed);
        let psi = solve(&spec);
        let mask = draw_mask(&psi, 0.5, 900 + seed).unwrap();
        let cfg = desk_completer();
        let (ten, _) = tensor_complete(spec.shape(), &mask, &cfg, None).unwrap();
        let (mat, _) = matrix_complete(spec.shape(), &mask, &cfg, None).unwrap();
        let schedule = build_schedule(ScheduleKind::AllBlocks, spec.shape()).unwrap();
        let s_ten = qstate::mean_block_renyi_half(&ten, &schedule).unwrap();
        let s_mat = qstate::mean_block_renyi_half(&mat, &schedule).unwrap();
        diffs.push(s_mat - s_ten);
    }
    let med = median(&diffs).unwrap();
    assert!(med >= -1e-9, "median entropy gap (matrix − tensor) = {med:.3e}");
}

#[test]
fn all_methods_agree_at_full_rate() {
    let spec = HamiltonianSpec::random_homogeneous(10, 2, 2, Boundary::Periodic, 4);
    let psi = solve(&spec);
    let mask = draw_mask(&psi, 1.0, 8).unwrap();
    let cfg = desk_completer();
    let (a, _) = svt_complete(spec.shape(), &mask, &SvtOptions::default(), None).unwrap();
    let (b, _) = matrix_complete(spec.shape(), &mask, &cfg, None).unwrap();
    let (c, _) = tensor_complete(spec.shape(), &mask, &cfg, None).unwrap();
    for state in [a, b, c] {
        assert!(qstate::fidelity_error(&state, &psi).unwrap() <= 1e-10);
    }
}

#[test]
fn xx_chain_svt_trails_tensor_completion() {
    // critical-chain method comparison at one rate, paired masks
    let mut svt_err = Vec::new();
    let mut ten_err = Vec::new();
    let spec = HamiltonianSpec::xx(14, Boundary::Periodic);
    let psi = solve(&spec);
    for seed in 0..3u64 {
        let mask = draw_mask(&psi, 0.6, 40 + seed).unwrap();
        let (s, _) = svt_complete(spec.shape(), &mask, &SvtOptions::default(), None).unwrap();
        let (t, _) = tensor_complete(spec.shape(), &mask, &desk_completer(), None).unwrap();
        svt_err.push(qstate::fidelity_error(&s, &psi).unwrap());
        ten_err.push(qstate::fidelity_error(&t, &psi).unwrap());
    }
    let ms = median(&svt_err).unwrap();
    let mt = median(&ten_err).unwrap();
    assert!(ms >= mt, "svt median {ms:.3e} vs tensor median {mt:.3e}");
}

#[test]
fn error_improves_with_rate_and_system_size() {
    let rates = [0.5, 0.7, 0.9];
    let mut medians = vec![Vec::new(), Vec::new()];
    for (i, &n) in [10usize, 14].iter().enumerate() {
        let spec = HamiltonianSpec::random_inhomogeneous(n, 2, 2, Boundary::Periodic, 3);
        let psi = solve(&spec);
        for &rate in &rates {
            let mut errs = Vec::new();
            for seed in 0..3u64 {
                let mask = draw_mask(&psi, rate, 50 + seed).unwrap();
                let (done, _) = tensor_complete(spec.shape(), &mask, &desk_completer(), None).unwrap();
                errs.push(qstate::fidelity_error(&done, &psi).unwrap());
            }
            medians[i].push(median(&errs).unwrap());
        }
    }
    // non-increasing in rate, with 10x headroom for plateau noise at the floor
    for per_n in &medians {
        for w in per_n.windows(2) {
            assert!(w[1] <= w[0] * 10.0, "rate monotonicity: {per_n:?}");
        }
    }
    // and strictly better at the larger size for the hardest rate tested
    assert!(
        medians[1][0] <= medians[0][0],
        "ε(N=14) = {:.3e} vs ε(N=10) = {:.3e} at rate 0.5",
        medians[1][0],
        medians[0][0]
    );
}
