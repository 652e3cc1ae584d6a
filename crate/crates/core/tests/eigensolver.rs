use std::f64::consts::PI;
use std::sync::Arc;

use pxlap::assembly::{assemble_mass, assemble_stiffness, FeSpace, Functionals, ScalarField};
use pxlap::eigensolver::{
    continuation_solve, helmholtz_first_eigenpair, inner_minimize, inverse_power, SolverConfig,
};
use pxlap::luxemburg::ExponentField;
use pxlap::mesh::{generate_mesh, DomainSpec, ElementOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(spec: DomainSpec, h: f64, order: ElementOrder) -> Arc<FeSpace> {
    Arc::new(FeSpace::new(Arc::new(generate_mesh(spec, h, order).unwrap())))
}

fn functionals(space: &Arc<FeSpace>, p: &ExponentField, cfg: &SolverConfig) -> Functionals {
    Functionals::new(space.clone(), p, cfg.newton_tol, cfg.regularization_eps).unwrap()
}

fn mat_vec(a: &sprs::CsMat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    for (v, (i, j)) in a.iter() {
        y[i] += v * x[j];
    }
    y
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[test]
fn inner_minimizer_solves_the_linear_system_for_p2() {
    let s = space(DomainSpec::unit_square(), 0.1, ElementOrder::P2);
    let cfg = SolverConfig::default();
    let p = ExponentField::constant(2.0).unwrap();
    let f = functionals(&s, &p, &cfg);
    let prev = ScalarField::interpolate(s.clone(), |x| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]) * (1.0 + x[0]));
    let k = f.norm_of(prev.coeffs()).unwrap();
    let prev = prev.scaled(1.0 / k);
    let init = ScalarField::interpolate(s.clone(), |x| (PI * x[0]).sin() * (PI * x[1]).sin());
    let out = inner_minimize(&f, &prev, &cfg, &init).unwrap();
    assert!(out.converged);
    // for p ≡ 2: R = uᵀAu / 2 and ∇S(v) = M v, so the minimizer solves A u = M v
    let a = assemble_stiffness(&s);
    let m = assemble_mass(&s);
    let au = mat_vec(&a, out.u.coeffs());
    let mv = mat_vec(&m, prev.coeffs());
    let defect: Vec<f64> = au.iter().zip(&mv).map(|(x, y)| x - y).collect();
    let rel = norm2(&defect) / norm2(&mv);
    assert!(rel <= 1e-8 * (1.0 + 1e-6), "linear residual {rel}");
}

#[test]
fn inner_minimizer_never_increases_j() {
    let s = space(DomainSpec::unit_square(), 0.25, ElementOrder::P1);
    let p = ExponentField::new(|x| 5.0 + 3.0 * (3.0 * PI * x[0]).sin(), 2.0, 8.0).unwrap();
    let cfg = SolverConfig { inner_max_iters: 15, ..SolverConfig::default() };
    let f = functionals(&s, &p, &cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let prev = ScalarField::new(s.clone(), (0..s.n_free()).map(|_| rng.gen_range(0.1..1.0)).collect()).unwrap();
        let prev = prev.scaled(1.0 / f.norm_of(prev.coeffs()).unwrap());
        let init = ScalarField::new(s.clone(), (0..s.n_free()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let out = inner_minimize(&f, &prev, &cfg, &init).unwrap();
        let j0 = f.evaluate_j(&init, &prev).unwrap();
        let j1 = f.evaluate_j(&out.u, &prev).unwrap();
        assert!(j1 <= j0, "{j1} > {j0}");
    }
}

#[test]
fn inner_minimizer_keeps_an_exact_minimizer() {
    let s = space(DomainSpec::unit_square(), 0.2, ElementOrder::P1);
    let cfg = SolverConfig::default();
    let p = ExponentField::constant(2.0).unwrap();
    let f = functionals(&s, &p, &cfg);
    let (mu, uh) = helmholtz_first_eigenpair(&s, 1e-12).unwrap();
    let prev = uh.scaled(1.0 / f.norm_of(uh.coeffs()).unwrap());
    // A u = M prev is solved by prev / μ
    let exact = prev.scaled(1.0 / mu);
    let out = inner_minimize(&f, &prev, &cfg, &exact).unwrap();
    assert!(out.iterations <= 1, "{} iterations", out.iterations);
    let diff: Vec<f64> = out.u.coeffs().iter().zip(exact.coeffs()).map(|(a, b)| a - b).collect();
    assert!(norm2(&diff) <= 1e-8 * norm2(exact.coeffs()));
}

#[test]
fn inverse_power_square_p2() {
    let s = space(DomainSpec::unit_square(), 0.05, ElementOrder::P2);
    let cfg = SolverConfig::default();
    let p = ExponentField::constant(2.0).unwrap();
    let f = functionals(&s, &p, &cfg);
    let u0 = ScalarField::interpolate(s.clone(), |x| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]));
    let r = inverse_power(&f, &u0, &cfg).unwrap();
    assert!(r.converged);
    assert!((r.lambda1 - PI * 2f64.sqrt()).abs() < 1e-3, "{}", r.lambda1);
    assert!(r.el_residual <= 10.0 * cfg.power_tol);
}

#[test]
fn inverse_power_disk_p2() {
    let s = space(DomainSpec::unit_disk(), 0.05, ElementOrder::P1);
    let cfg = SolverConfig::default();
    let p = ExponentField::constant(2.0).unwrap();
    let f = functionals(&s, &p, &cfg);
    let u0 = ScalarField::interpolate(s.clone(), |x| 1.0 - x[0] * x[0] - x[1] * x[1]);
    let r = inverse_power(&f, &u0, &cfg).unwrap();
    assert!(r.converged);
    assert!((r.lambda1 - 2.404_825_557_695_773).abs() < 1e-2, "{}", r.lambda1);
}

#[test]
fn result_invariants_hold_for_a_variable_exponent() {
    let s = space(DomainSpec::unit_square(), 0.125, ElementOrder::P1);
    let cfg = SolverConfig::default();
    let p = ExponentField::new(|x| 3.0 + x[0] + 0.5 * x[1], 3.0, 4.5).unwrap();
    let f = functionals(&s, &p, &cfg);
    let u0 = ScalarField::interpolate(s.clone(), |x| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]));
    let r = inverse_power(&f, &u0.scaled(-1.0), &cfg).unwrap();
    assert!(r.converged);
    assert!((r.big_lambda1 - r.lambda1 * r.lambda1).abs() <= 1e-12 * r.big_lambda1);
    assert!((r.lambda1 - r.grad_norm / r.norm).abs() <= 1e-9 * r.lambda1);
    assert!((r.norm - 1.0).abs() <= 10.0 * cfg.newton_tol);
    for k in &r.iterate_norms[1..] {
        assert!((k - 1.0).abs() <= 10.0 * cfg.newton_tol, "iterate norm {k}");
    }
    assert!(r.history.iter().all(|v| v.is_finite()) && *r.history.last().unwrap() >= 0.0);
    assert!(r.u.nodal_values().iter().all(|&v| v >= -1e-9));
    assert!(r.el_residual <= 10.0 * cfg.power_tol);
    let r_final = f.evaluate_r(&r.u).unwrap();
    let s_final = f.evaluate_s(&r.u).unwrap();
    assert!((s_final - 1.0).abs() <= 10.0 * cfg.newton_tol);
    assert!((r_final - r.big_lambda1).abs() <= 10.0 * cfg.newton_tol * r.big_lambda1);
}

#[test]
fn outcome_is_scale_invariant() {
    let s = space(DomainSpec::unit_square(), 0.125, ElementOrder::P1);
    let cfg = SolverConfig::default();
    let p = ExponentField::constant(3.0).unwrap();
    let f = functionals(&s, &p, &cfg);
    let u0 = ScalarField::interpolate(s.clone(), |x| (PI * x[0]).sin() * (PI * x[1]).sin() * (1.0 + x[0]));
    let a = inverse_power(&f, &u0, &cfg).unwrap();
    let b = inverse_power(&f, &u0.scaled(5.0), &cfg).unwrap();
    assert!((a.lambda1 - b.lambda1).abs() <= 10.0 * cfg.power_tol * a.lambda1);
}

#[test]
fn continuation_with_p2_target_matches_inverse_power() {
    let s = space(DomainSpec::unit_square(), 0.1, ElementOrder::P1);
    let cfg = SolverConfig::default();
    let p = ExponentField::constant(2.0).unwrap();
    let c = continuation_solve(&s, &p, &cfg).unwrap();
    assert_eq!(c.continuation.len(), 1);
    let (_, uh) = helmholtz_first_eigenpair(&s, cfg.helmholtz_tol).unwrap();
    let d = inverse_power(&functionals(&s, &p, &cfg), &uh, &cfg).unwrap();
    assert_eq!(c.lambda1, d.lambda1);
}

#[test]
fn continuation_to_p3_on_the_square() {
    let s = space(DomainSpec::unit_square(), 0.1, ElementOrder::P1);
    let cfg = SolverConfig::default();
    let p = ExponentField::constant(3.0).unwrap();
    let r = continuation_solve(&s, &p, &cfg).unwrap();
    assert!(r.converged);
    assert_eq!(r.continuation.last().unwrap().0, 1.0);
    assert!(r.continuation.len() >= cfg.continuation_steps);
    assert!(r.continuation.iter().all(|(_, l)| l.is_finite() && *l > 0.0));
    assert!(r.el_residual <= 10.0 * cfg.power_tol);
    // λ₁ for p ≡ 2 on this mesh sits above the p ≡ 3 value
    assert!(r.lambda1 < 4.46);
}

#[test]
fn non_convergence_is_flagged() {
    let s = space(DomainSpec::unit_square(), 0.2, ElementOrder::P1);
    let cfg = SolverConfig { power_max_iters: 1, ..SolverConfig::default() };
    let p = ExponentField::constant(3.0).unwrap();
    let f = functionals(&s, &p, &cfg);
    let u0 = ScalarField::interpolate(s.clone(), |x| x[0] * x[1] * (1.0 - x[0]) * (1.0 - x[1]).powi(3));
    let r = inverse_power(&f, &u0, &cfg).unwrap();
    assert!(!r.converged);
    assert_eq!(r.iterations, 1);
    assert!(inverse_power(&f, &ScalarField::zeros(s.clone()), &cfg).is_err());
}

#[test]
fn config_validation() {
    assert!(SolverConfig::default().validate().is_ok());
    assert!(SolverConfig { power_tol: 0.0, ..SolverConfig::default() }.validate().is_err());
    assert!(SolverConfig { inner_max_iters: 0, ..SolverConfig::default() }.validate().is_err());
    assert!(SolverConfig { restart_period: Some(0), ..SolverConfig::default() }.validate().is_err());
    assert!(SolverConfig { regularization_eps: -1.0, ..SolverConfig::default() }.validate().is_err());
}
