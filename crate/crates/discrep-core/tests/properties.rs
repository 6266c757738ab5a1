//! Randomized invariants over the operator abstractions and the solver stack.
//! Everything is seeded, so failures reproduce exactly.

use discrep_core::{
    discrepancy_norm, exact_minimize, make_blur_problem, make_diagonal_problem,
    make_hilbert_problem, make_noisy, solve_for_epsilon, DiscrepancyConfig, LinearOperator,
    NoiseDirection, ProblemInstance, RegParam, SolverMode, Vector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

fn random_vector(rng: &mut ChaCha12Rng, n: usize) -> Vector {
    Vector::new(
        (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect(),
    )
    .unwrap()
}

fn random_dense(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> LinearOperator {
    let data: Vec<f64> = (0..rows * cols)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    LinearOperator::dense(rows, cols, data).unwrap()
}

fn random_operators(rng: &mut ChaCha12Rng) -> Vec<LinearOperator> {
    let diag: Vec<f64> = (0..17)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let kernel: Vec<f64> = (0..23)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    vec![
        random_dense(rng, 13, 13),
        random_dense(rng, 20, 7),
        random_dense(rng, 7, 20),
        LinearOperator::diagonal(diag).unwrap(),
        LinearOperator::convolution(kernel).unwrap(),
    ]
}

#[test]
fn adjoint_identity_on_random_pairs() {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    for op in random_operators(&mut rng) {
        let scale = op.frobenius_norm();
        for _ in 0..100 {
            let u = random_vector(&mut rng, op.cols());
            let v = random_vector(&mut rng, op.rows());
            let lhs = op.apply(&u).unwrap().dot(&v);
            let rhs = u.dot(&op.apply_adjoint(&v).unwrap());
            let tol = 1e-12 * u.norm() * v.norm() * scale;
            assert!(
                (lhs - rhs).abs() <= tol,
                "<Au,v> = {lhs} vs <u,A*v> = {rhs} (tol {tol})"
            );
        }
    }
}

#[test]
fn apply_is_linear() {
    let mut rng = ChaCha12Rng::seed_from_u64(103);
    for op in random_operators(&mut rng) {
        for _ in 0..20 {
            let u = random_vector(&mut rng, op.cols());
            let w = random_vector(&mut rng, op.cols());
            let alpha: f64 = rng.sample(StandardNormal);
            let beta: f64 = rng.sample(StandardNormal);
            let combined = Vector::new(
                u.as_slice()
                    .iter()
                    .zip(w.as_slice())
                    .map(|(a, b)| alpha * a + beta * b)
                    .collect(),
            )
            .unwrap();
            let lhs = op.apply(&combined).unwrap();
            let au = op.apply(&u).unwrap();
            let aw = op.apply(&w).unwrap();
            let rhs = Vector::new(
                au.as_slice()
                    .iter()
                    .zip(aw.as_slice())
                    .map(|(a, b)| alpha * a + beta * b)
                    .collect(),
            )
            .unwrap();
            let tol = 1e-12 * op.frobenius_norm() * combined.norm() + 1e-300;
            assert!(
                lhs.dist(&rhs) <= tol,
                "linearity violated: {}",
                lhs.dist(&rhs)
            );
        }
    }
}

#[test]
fn svd_reconstructs_random_matrices() {
    let mut rng = ChaCha12Rng::seed_from_u64(107);
    for (rows, cols) in [(5, 5), (30, 30), (100, 100), (40, 100), (100, 40)] {
        let op = random_dense(&mut rng, rows, cols);
        let svd = op.svd().unwrap();
        // Column j of A and of the reconstruction Σ σ_i u_i (v_i)_j.
        let mut err_sq = 0.0;
        let mut norm_sq = 0.0;
        for j in 0..cols {
            let mut ej = vec![0.0; cols];
            ej[j] = 1.0;
            let col = op.apply(&Vector::new(ej).unwrap()).unwrap();
            let mut rec = vec![0.0; rows];
            for ((sigma, u), v) in svd.singular_values.iter().zip(&svd.left).zip(&svd.right) {
                let coeff = sigma * v.as_slice()[j];
                for (r, ui) in rec.iter_mut().zip(u.as_slice()) {
                    *r += coeff * ui;
                }
            }
            for (a, r) in col.as_slice().iter().zip(&rec) {
                err_sq += (a - r) * (a - r);
                norm_sq += a * a;
            }
        }
        assert!(
            err_sq.sqrt() <= 1e-10 * norm_sq.sqrt(),
            "{rows}x{cols}: reconstruction error {} vs norm {}",
            err_sq.sqrt(),
            norm_sq.sqrt()
        );
        // Sorted nonincreasing, nonnegative.
        for pair in svd.singular_values.windows(2) {
            assert!(pair[0] >= pair[1]);
        }
        assert!(svd.singular_values.iter().all(|&s| s >= 0.0));
    }
}

fn small_gallery() -> Vec<ProblemInstance> {
    vec![
        make_diagonal_problem(10, 1.0).unwrap(),
        make_diagonal_problem(50, 1.0).unwrap(),
        make_hilbert_problem(5).unwrap(),
        make_hilbert_problem(10).unwrap(),
        make_blur_problem(64, 0.05).unwrap(),
    ]
}

#[test]
fn discrepancy_approaches_data_norm_for_huge_eps() {
    let cfg = DiscrepancyConfig::default();
    for prob in small_gallery() {
        let obs = make_noisy(&prob, 1e-2, 42, NoiseDirection::RandomUnit).unwrap();
        let eps = 1e8 * prob.condition_info.sigma_max.powi(2);
        let (h, _) = discrepancy_norm(
            &prob.op,
            &obs.f_delta,
            RegParam::new(eps).unwrap(),
            &cfg,
            obs.delta,
        )
        .unwrap();
        assert!(
            h >= 0.99 * obs.f_delta.norm(),
            "{}: h = {h}, ||f_delta|| = {}",
            prob.name,
            obs.f_delta.norm()
        );
    }
}

#[test]
fn small_eps_solvability_bound_gives_low_bracket_side() {
    // In exact mode, ε < bδ²/‖y‖² forces h < Cδ.
    let cfg = DiscrepancyConfig::default();
    for prob in small_gallery() {
        let delta = 1e-2;
        let obs = make_noisy(&prob, delta, 9, NoiseDirection::RandomUnit).unwrap();
        let eps = 0.5 * cfg.b * delta * delta / prob.y.norm_sq();
        let (h, _) = discrepancy_norm(
            &prob.op,
            &obs.f_delta,
            RegParam::new(eps).unwrap(),
            &cfg,
            delta,
        )
        .unwrap();
        assert!(h < cfg.c * delta, "{}: h = {h}", prob.name);
    }
}

#[test]
fn solved_traces_stay_below_theoretical_envelope() {
    // Exact mode: h² < ε‖y‖² + (C² − b)δ² at every trace point.
    let cfg = DiscrepancyConfig::default();
    for prob in small_gallery() {
        let delta = 1e-2;
        let obs = make_noisy(&prob, delta, 21, NoiseDirection::RandomUnit).unwrap();
        let sol = solve_for_epsilon(&prob.op, &obs.f_delta, delta, &cfg).unwrap();
        for &(eps, h) in &sol.bracket_trace {
            let envelope = eps * prob.y.norm_sq() + (cfg.c * cfg.c - cfg.b) * delta * delta;
            assert!(
                h * h < envelope,
                "{}: h² = {} >= envelope {} at eps = {eps}",
                prob.name,
                h * h,
                envelope
            );
        }
    }
}

#[test]
fn certified_mode_tracks_exact_mode_on_gallery() {
    let exact_cfg = DiscrepancyConfig::default();
    let cg_cfg = DiscrepancyConfig {
        solver_mode: SolverMode::CertifiedApprox,
        ..DiscrepancyConfig::default()
    };
    for prob in [
        make_diagonal_problem(20, 1.0).unwrap(),
        make_hilbert_problem(6).unwrap(),
    ] {
        let delta = 1e-2;
        let obs = make_noisy(&prob, delta, 33, NoiseDirection::RandomUnit).unwrap();
        let a = solve_for_epsilon(&prob.op, &obs.f_delta, delta, &exact_cfg).unwrap();
        let b = solve_for_epsilon(&prob.op, &obs.f_delta, delta, &cg_cfg).unwrap();
        let err_a = a.u_delta.dist(&prob.y);
        let err_b = b.u_delta.dist(&prob.y);
        let bound =
            10.0 * exact_cfg.root_rel_tol * prob.y.norm() + (a.gap_budget_used / a.epsilon).sqrt();
        assert!(
            (err_a - err_b).abs() <= bound,
            "{}: errors {err_a} vs {err_b}, bound {bound}",
            prob.name
        );
    }
}

#[test]
fn operators_and_solves_are_thread_safe() {
    fn assert_shareable<T: Send + Sync>() {}
    assert_shareable::<Vector>();
    assert_shareable::<LinearOperator>();
    assert_shareable::<ProblemInstance>();

    // Concurrent solves on shared immutable inputs agree with a serial run.
    let prob = make_diagonal_problem(30, 1.0).unwrap();
    let cfg = DiscrepancyConfig::default();
    let obs = make_noisy(&prob, 1e-2, 3, NoiseDirection::RandomUnit).unwrap();
    let serial = solve_for_epsilon(&prob.op, &obs.f_delta, 1e-2, &cfg).unwrap();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..4)
            .map(|_| scope.spawn(|| solve_for_epsilon(&prob.op, &obs.f_delta, 1e-2, &cfg).unwrap()))
            .collect();
        for handle in handles {
            let sol = handle.join().unwrap();
            assert_eq!(sol.epsilon.to_bits(), serial.epsilon.to_bits());
            assert_eq!(sol.u_delta.as_slice(), serial.u_delta.as_slice());
        }
    });
}

#[test]
fn exact_minimize_requires_densified_convolution() {
    let prob = make_blur_problem(16, 0.05).unwrap();
    let err = exact_minimize(&prob.op, &prob.f, RegParam::new(0.1).unwrap());
    assert!(err.is_err());
    // The engine densifies internally: exact-mode solves on blur succeed.
    let obs = make_noisy(&prob, 1e-2, 5, NoiseDirection::RandomUnit).unwrap();
    let sol = solve_for_epsilon(&prob.op, &obs.f_delta, 1e-2, &DiscrepancyConfig::default());
    assert!(sol.is_ok());
}
