//! Acceptance suite: one test per shipped claim, each printing a PASS/FAIL
//! line. Run with
//! `cargo test -p wfc-cli --test acceptance -- --test-threads=1 --nocapture`.
//!
//! The desk-scale knobs (seed counts, k_max, inner_tol) were calibrated so
//! the whole suite fits a single core; every threshold below is part of the
//! claim, not a tunable.

use std::path::Path;

use wfc_cli::config::ExperimentConfig;
use wfc_cli::experiments::{alpha_fit, compare_methods, exact_vs_alg};
use wfc_core::analysis::median;
use wfc_core::completers::exact_min::{minimize_single_phase, EntropyObjective};
use wfc_core::completers::{tensor_complete, CompleterConfig, ScheduleKind};
use wfc_core::eigensolve::{dense_ground_state, ground_state, ground_state_of, LanczosOptions};
use wfc_core::hamiltonian::{HamiltonianOp, HamiltonianSpec};
use wfc_core::qstate::{self, Bipartition};
use wfc_core::sampling::draw_mask;
use wfc_core::{Boundary, C64, StateVector};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{criterion}] {} — {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

fn cfg_json(text: &str) -> ExperimentConfig {
    serde_json::from_str(text).expect("inline acceptance config parses")
}

#[test]
fn c01_classical_ising_spectrum_has_two_singular_values() {
    let spec = HamiltonianSpec::transverse_ising(16, 0.0, Boundary::Periodic);
    let op = HamiltonianOp::new(&spec).unwrap();
    // the spectrum claim needs no degeneracy probe; skip the second pass
    let gs = ground_state_of(&op, LanczosOptions { tol: 1e-12, detect_degeneracy: false, ..Default::default() })
        .unwrap();
    let sv = qstate::singular_values(&gs.state, Bipartition::central(16).unwrap()).unwrap();
    let reff = sv.effective_rank(1e-10);
    report(
        "criterion 1",
        reff == 2,
        &format!("Ising λ=0, N=16 PBC central cut: {reff} singular values > 1e-10 (want exactly 2); σ₁={:.3e} σ₂={:.3e} σ₃={:.3e}",
            sv.values()[0], sv.values()[1], sv.values()[2]),
    );
}

#[test]
fn c02_oracle_equivalence_suite() {
    // matricize vs exhaustive digit permutation (N=4, cyclic cut)
    let spec = HamiltonianSpec::random_inhomogeneous(4, 2, 2, Boundary::Periodic, 2);
    let gs = dense_ground_state(&spec).unwrap();
    let cut = Bipartition::new(3, 2, 4).unwrap();
    let m = qstate::matricize(&gs.state, cut).unwrap();
    let mut matricize_ok = true;
    for idx in 0..16 {
        let d = [(idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
        let r = d[2] * 2 + d[3];
        let c = d[0] * 2 + d[1];
        matricize_ok &= m[(r, c)] == gs.state.amplitudes()[idx];
    }

    // entropies vs dense partial trace: σ² must sum and match ρ_A eigenvalues
    let xx = HamiltonianSpec::xx(6, Boundary::Periodic);
    let xx_gs = ground_state(&xx, 1e-12).unwrap();
    let cut6 = Bipartition::central(6).unwrap();
    let sv = qstate::singular_values(&xx_gs.state, cut6).unwrap();
    let rho = partial_trace(&xx_gs.state, cut6);
    let eig = rho.self_adjoint_eigen(faer::Side::Lower).unwrap();
    let evals = eig.S().column_vector();
    let mut entropy_ok = true;
    for (i, s) in sv.values().iter().enumerate() {
        let lam = evals[rho.nrows() - 1 - i].re.max(0.0);
        entropy_ok &= (s - lam.sqrt()).abs() < 1e-10;
    }

    // Lanczos vs dense eigensolver on random specs
    let mut lanczos_ok = true;
    for seed in 0..5 {
        let spec = HamiltonianSpec::random_inhomogeneous(6, 2, 2, Boundary::Periodic, seed);
        let fast = ground_state(&spec, 1e-12).unwrap();
        let dense = dense_ground_state(&spec).unwrap();
        lanczos_ok &= (fast.energy - dense.energy).abs() < 1e-10;
        lanczos_ok &= qstate::fidelity_error(&fast.state, &dense.state).unwrap() <= 1e-12;
    }

    // Hamiltonian apply vs dense Kronecker assembly
    let mut apply_ok = true;
    for spec in [
        HamiltonianSpec::random_inhomogeneous(4, 2, 3, Boundary::Periodic, 9),
        HamiltonianSpec::transverse_ising(4, 0.8, Boundary::Open),
    ] {
        let op = HamiltonianOp::new(&spec).unwrap();
        let h = wfc_core::eigensolve::dense_matrix(&op);
        let psi = dense_ground_state(&spec).unwrap().state;
        let fast = op.apply(&psi).unwrap();
        for row in 0..spec.dim() {
            let mut slow = C64::ZERO;
            for col in 0..spec.dim() {
                slow += h[(row, col)] * psi.amplitudes()[col];
            }
            apply_ok &= (slow - fast.amplitudes()[row]).norm() < 1e-12;
        }
    }

    let pass = matricize_ok && entropy_ok && lanczos_ok && apply_ok;
    report(
        "criterion 2",
        pass,
        &format!("oracle equivalence: matricize {matricize_ok}, partial-trace {entropy_ok}, Lanczos-vs-dense {lanczos_ok}, apply-vs-Kronecker {apply_ok}"),
    );
}

fn partial_trace(psi: &StateVector, cut: Bipartition) -> faer::Mat<C64> {
    let n = psi.num_sites();
    let rows = cut.rows(2);
    let cols = psi.dim() / rows;
    let mut rho: faer::Mat<C64> = faer::Mat::zeros(rows, rows);
    // prefix cut: flat = r * cols + c
    let _ = n;
    for r1 in 0..rows {
        for r2 in 0..rows {
            let mut acc = C64::ZERO;
            for c in 0..cols {
                acc += psi.amplitudes()[r1 * cols + c] * psi.amplitudes()[r2 * cols + c].conj();
            }
            rho[(r1, r2)] = acc;
        }
    }
    rho
}

#[test]
fn c03_nuclear_norm_phase_beats_von_neumann_phase() {
    // N=14, d=2, l=3 random PBC ground states; 20 (seed, index) draws
    let cut = Bipartition::central(14).unwrap();
    let mut err_half = Vec::new();
    let mut err_one = Vec::new();
    for seed in 0..5u64 {
        let spec = HamiltonianSpec::random_inhomogeneous(14, 2, 3, Boundary::Periodic, seed);
        let op = HamiltonianOp::new(&spec).unwrap();
        let gs = ground_state_of(&op, LanczosOptions { tol: 1e-12, detect_degeneracy: false, ..Default::default() })
            .unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7000 + seed);
        for _ in 0..4 {
            let index = loop {
                let i = rng.random_range(0..gs.state.dim());
                if gs.state.amplitudes()[i].norm() > 1e-12 {
                    break i;
                }
            };
            let half = minimize_single_phase(&gs.state, index, EntropyObjective::SHalf, cut).unwrap();
            let one = minimize_single_phase(&gs.state, index, EntropyObjective::SOne, cut).unwrap();
            err_half.push(half.phase_error());
            err_one.push(one.phase_error());
        }
    }
    let med_half = median(&err_half).unwrap();
    let med_one = median(&err_one).unwrap();
    report(
        "criterion 3",
        med_half < med_one,
        &format!("20 draws at N=14 l=3: median |θ_S½ − θ_exact| = {med_half:.3e} vs median |θ_S1 − θ_exact| = {med_one:.3e}"),
    );
}

#[test]
fn c04_alpha_fit_orderings() {
    let cfg = cfg_json(
        r#"{
            "experiment": "alpha-fit",
            "dl_points": [
                {"d": 2, "l": 2, "ns": [6, 8, 10, 12]},
                {"d": 2, "l": 3, "ns": [6, 8, 10, 12]},
                {"d": 3, "l": 2, "ns": [4, 6, 8]}
            ],
            "states_per_point": 10,
            "pairs_per_state": 5,
            "ham_seeds": {"base": 100, "count": 10},
            "index_seed": 4242
        }"#,
    );
    let (fits, _, _) = alpha_fit::compute(&cfg).unwrap();
    let get = |d: usize, l: usize| fits.iter().find(|f| f.d == d && f.l == l).unwrap();
    let a22 = get(2, 2);
    let a23 = get(2, 3);
    let a32 = get(3, 2);
    let positive = a22.alpha > 0.0 && a23.alpha > 0.0 && a32.alpha > 0.0;
    let l_order = a22.alpha > a23.alpha;
    // cross-d comparison on the size-normalization-free rates: dividing the
    // medians by d^N shifts each alpha by ln d, which differs across local
    // dimensions and would mask the physical ordering
    let d_order = a22.alpha_raw > a32.alpha_raw;
    let r2 = a22.r_squared > 0.9;
    report(
        "criterion 4",
        positive && l_order && d_order && r2,
        &format!(
            "alpha(2,2)={:.4} raw {:.4} (r²={:.4}), alpha(2,3)={:.4}, alpha(3,2)={:.4} raw {:.4}; positive {positive}, l-order {l_order}, d-order(raw) {d_order}, r²>0.9 {r2}",
            a22.alpha, a22.alpha_raw, a22.r_squared, a23.alpha, a32.alpha, a32.alpha_raw
        ),
    );
}

#[test]
fn c05_headline_completion_n16() {
    // N=16, d=2, l=2 random inhomogeneous PBC, rate 0.5, 5 seeds
    let completer = CompleterConfig { k_max: 6, inner_tol: 3e-7, ..Default::default() };
    let mut errors = Vec::new();
    for seed in 0..5u64 {
        let spec = HamiltonianSpec::random_inhomogeneous(16, 2, 2, Boundary::Periodic, seed);
        let op = HamiltonianOp::new(&spec).unwrap();
        let gs = ground_state_of(&op, LanczosOptions { tol: 1e-12, detect_degeneracy: false, ..Default::default() })
            .unwrap();
        let mask = draw_mask(&gs.state, 0.5, 1000 + seed).unwrap();
        let (done, _) = tensor_complete(spec.shape(), &mask, &completer, None).unwrap();
        errors.push(qstate::fidelity_error(&done, &gs.state).unwrap());
    }
    let med = median(&errors).unwrap();
    report(
        "criterion 5",
        med <= 1e-8,
        &format!(
            "N=16 rate 0.5, 5 seeds: median fidelity error {med:.3e} (errors [{}])",
            errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", ")
        ),
    );
}

#[test]
fn c06_method_ordering() {
    let cfg = cfg_json(
        r#"{
            "experiment": "compare-methods",
            "hamiltonian": {"n": 14, "d": 2, "l": 2, "boundary": "periodic", "kind": "random_homogeneous", "seed": 1},
            "rates": [0.4, 0.5, 0.6],
            "ham_seeds": {"base": 1, "count": 10},
            "completer": {"k_max": 6, "inner_tol": 3e-7}
        }"#,
    );
    let (_, medians, _) = compare_methods::compute(&cfg).unwrap();
    let get = |rate: f64, method: &str| {
        medians
            .iter()
            .find(|(r, m, _)| *r == rate && *m == method)
            .map(|(_, _, v)| *v)
            .unwrap()
    };
    let mut tensor_beats_matrix = true;
    let mut matrix_beats_svt_count = 0usize;
    for &rate in &[0.4, 0.5, 0.6] {
        tensor_beats_matrix &= get(rate, "tensor") <= get(rate, "matrix");
        if get(rate, "matrix") <= get(rate, "svt") {
            matrix_beats_svt_count += 1;
        }
    }
    let detail: Vec<String> = [0.4, 0.5, 0.6]
        .iter()
        .map(|&r| format!("rate {r}: svt {:.2e} matrix {:.2e} tensor {:.2e}", get(r, "svt"), get(r, "matrix"), get(r, "tensor")))
        .collect();
    report(
        "criterion 6",
        tensor_beats_matrix && matrix_beats_svt_count >= 2,
        &format!("tensor ≤ matrix at all rates: {tensor_beats_matrix}; matrix ≤ svt at {matrix_beats_svt_count}/3 rates; {}", detail.join("; ")),
    );
}

#[test]
fn c07_exact_vs_algorithm_agreement() {
    let cfg = cfg_json(
        r#"{
            "experiment": "exact-vs-alg",
            "hamiltonian": {"n": 10, "d": 2, "l": 2, "boundary": "periodic", "kind": "random_homogeneous", "seed": 5},
            "ns": [10, 12],
            "unsampled_count": 50,
            "index_seed": 913,
            "completer": {"k_max": 8, "inner_tol": 1e-7}
        }"#,
    );
    let (rows, _) = exact_vs_alg::compute(&cfg).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for n in [10usize, 12] {
        let exact: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.eps_exact_min).collect();
        let alg: Vec<f64> = rows.iter().filter(|r| r.n == n).map(|r| r.eps_algorithm).collect();
        let me = median(&exact).unwrap();
        let ma = median(&alg).unwrap();
        let ratio = if me > ma { me / ma } else { ma / me };
        pass &= ratio <= 10.0;
        details.push(format!("N={n}: exact-min median {me:.3e}, algorithm median {ma:.3e} (ratio {ratio:.2})"));
    }
    report("criterion 7", pass, &details.join("; "));
}

/// Expected to FAIL: in this crate's realization of the update step the
/// d+1 skip is harmless at N=16 (the cliff sits at d+2; see the
/// `skipping_low_chi_levels_ruins_completion` regression in wfc-core for the
/// ramp-necessity physics that does hold). Kept faithful to the stated
/// criterion rather than weakened.
#[test]
fn c08_chi_ramp_necessity() {
    // convergence-trace setup: N=16, d=2, l=3, open boundary, rate 0.5;
    // sweep caps (the outcome is insensitive to k_max per the probes above)
    let base = CompleterConfig {
        schedule_kind: ScheduleKind::PrefixCuts,
        k_max: 40,
        inner_tol: 1e-8,
        ..Default::default()
    };
    let mut ratios = Vec::new();
    let mut full = Vec::new();
    let mut skip = Vec::new();
    for seed in 0..5u64 {
        let spec = HamiltonianSpec::random_inhomogeneous(16, 2, 3, Boundary::Open, seed);
        let op = HamiltonianOp::new(&spec).unwrap();
        let gs = ground_state_of(&op, LanczosOptions { tol: 1e-12, detect_degeneracy: false, ..Default::default() })
            .unwrap();
        let mask = draw_mask(&gs.state, 0.5, 300 + seed).unwrap();
        let from_d = CompleterConfig { chi_start: Some(2), ..base };
        let from_d1 = CompleterConfig { chi_start: Some(3), ..base };
        let (a, _) = tensor_complete(spec.shape(), &mask, &from_d, None).unwrap();
        let (b, _) = tensor_complete(spec.shape(), &mask, &from_d1, None).unwrap();
        let ea = qstate::fidelity_error(&a, &gs.state).unwrap();
        let eb = qstate::fidelity_error(&b, &gs.state).unwrap();
        full.push(ea);
        skip.push(eb);
        ratios.push(eb / ea.max(1e-300));
    }
    let med_full = median(&full).unwrap();
    let med_skip = median(&skip).unwrap();
    report(
        "criterion 8",
        med_skip >= 10.0 * med_full,
        &format!(
            "start χ=d median ε {med_full:.3e} vs start χ=d+1 median ε {med_skip:.3e} (per-seed ratios [{}])",
            ratios.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>().join(", ")
        ),
    );
}

#[test]
fn c09_csv_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = cfg_json(
        r#"{
            "experiment": "sweep-rates",
            "hamiltonian": {"n": 10, "d": 2, "l": 2, "boundary": "periodic", "kind": "random_inhomogeneous", "seed": 3},
            "rates": [0.5, 0.9],
            "mask_seeds": {"base": 1, "count": 2},
            "completer": {"k_max": 8, "inner_tol": 1e-7}
        }"#,
    );
    let run = |sub: &Path| {
        wfc_cli::experiments::sweep_rates::run(&cfg, sub).unwrap();
        (
            std::fs::read(sub.join("sweep_rates.csv")).unwrap(),
            std::fs::read(sub.join("sweep_rates_agg.csv")).unwrap(),
        )
    };
    let (a1, a2) = run(&dir.path().join("a"));
    let (b1, b2) = run(&dir.path().join("b"));
    report(
        "criterion 9",
        a1 == b1 && a2 == b2,
        &format!("re-run reproduces sweep_rates.csv ({} bytes) and aggregates byte-exactly", a1.len()),
    );
}

#[test]
fn c10_property_suites() {
    // the exhaustive property suites live in wfc-core's tests; re-assert the
    // acceptance-critical ones on fresh instances here
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let amps: Vec<C64> = (0..64).map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let psi = StateVector::new(6, 2, amps).unwrap().normalized().unwrap();

    let mut ok = true;
    // projection idempotence + fixed point
    let mask = draw_mask(&psi, 0.4, 9).unwrap();
    let init = wfc_core::sampling::build_initial(&mask, 6, 2).unwrap();
    let once = wfc_core::sampling::project_data(&init, &mask).unwrap();
    ok &= once.amplitudes() == init.amplitudes();

    // completion output: normalization and bit-exact samples
    let shape = wfc_core::LatticeShape::new(6, 2, Boundary::Periodic);
    let (done, _) = tensor_complete(shape, &mask, &CompleterConfig::default(), None).unwrap();
    ok &= done.is_normalized(1e-6);
    for (&i, &v) in mask.indices().iter().zip(mask.values()) {
        ok &= done.amplitudes()[i] == v;
    }

    // cut symmetry and Eckart–Young on every cut
    for start in 1..=6 {
        for len in 1..6 {
            let cut = Bipartition::new(start, len, 6).unwrap();
            let sv = qstate::singular_values(&psi, cut).unwrap();
            let sc = qstate::singular_values(&psi, cut.complement(6)).unwrap();
            let k = sv.values().len().min(sc.values().len());
            for i in 0..k {
                ok &= (sv.values()[i] - sc.values()[i]).abs() < 1e-10;
            }
            let chi = (k / 2).max(1);
            let t = qstate::truncate_cut(&psi, cut, chi).unwrap();
            let tail: f64 = sv.values()[chi..].iter().map(|s| s * s).sum();
            ok &= (psi.distance(&t).unwrap().powi(2) - tail).abs() < 1e-10;
        }
    }

    // fit covariances
    let pts: Vec<(f64, f64)> = (4..10).map(|n| (n as f64, 1.3 * (-0.52 * n as f64).exp())).collect();
    let base = wfc_core::analysis::fit_exponential(&pts).unwrap();
    let scaled: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, 2.0 * y)).collect();
    let fs = wfc_core::analysis::fit_exponential(&scaled).unwrap();
    ok &= (fs.alpha - base.alpha).abs() < 1e-12;

    report("criterion 10", ok, "projection fixed point, normalization, cut symmetry, Eckart–Young, fit covariance");
}
