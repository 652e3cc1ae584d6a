use std::f64::consts::PI;
use std::sync::Arc;

use pxlap::assembly::{FeSpace, Functionals, ScalarField};
use pxlap::luxemburg::ExponentField;
use pxlap::mesh::{generate_mesh, DomainSpec, ElementOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEPS: [f64; 3] = [1e-4, 1e-5, 1e-6];

fn coarse_square() -> Arc<FeSpace> {
    Arc::new(FeSpace::new(Arc::new(generate_mesh(DomainSpec::unit_square(), 0.25, ElementOrder::P1).unwrap())))
}

fn exponents() -> Vec<(&'static str, ExponentField)> {
    vec![
        ("p = 2", ExponentField::constant(2.0).unwrap()),
        ("p = 5 + 3 sin(3πx)", ExponentField::new(|x| 5.0 + 3.0 * (3.0 * PI * x[0]).sin(), 2.0, 8.0).unwrap()),
    ]
}

fn random_field(space: &Arc<FeSpace>, rng: &mut ChaCha8Rng) -> ScalarField {
    ScalarField::new(space.clone(), (0..space.n_free()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

fn shifted(u: &ScalarField, dir: &[f64], h: f64) -> ScalarField {
    ScalarField::new(u.space().clone(), u.coeffs().iter().zip(dir).map(|(a, d)| a + h * d).collect()).unwrap()
}

/// Smallest relative mismatch between `exact` and the central differences of
/// `g` along `dir` over the step sweep.
fn best_fd_error(g: impl Fn(&ScalarField) -> f64, u: &ScalarField, dir: &[f64], exact: f64, scale: f64) -> f64 {
    STEPS
        .iter()
        .map(|&h| {
            let fd = (g(&shifted(u, dir, h)) - g(&shifted(u, dir, -h))) / (2.0 * h);
            (fd - exact).abs() / scale
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn grad_s_matches_finite_differences_entrywise() {
    let space = coarse_square();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, p) in exponents() {
        let f = Functionals::new(space.clone(), &p, 1e-14, 0.0).unwrap();
        for _ in 0..10 {
            let u = random_field(&space, &mut rng);
            let g = f.grad_s(&u).unwrap();
            let scale = g.max_abs();
            for i in 0..space.n_free() {
                let mut e = vec![0.0; space.n_free()];
                e[i] = 1.0;
                let err = best_fd_error(|v| f.evaluate_s(v).unwrap(), &u, &e, g.values()[i], scale);
                assert!(err <= 1e-5, "{name}: entry {i} error {err}");
            }
        }
    }
}

#[test]
fn grad_j_matches_finite_differences_entrywise() {
    let space = coarse_square();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (name, p) in exponents() {
        let f = Functionals::new(space.clone(), &p, 1e-14, 0.0).unwrap();
        for _ in 0..10 {
            let prev = random_field(&space, &mut rng);
            let prev = prev.scaled(1.0 / f.norm_of(prev.coeffs()).unwrap());
            let u = random_field(&space, &mut rng);
            let g = f.grad_j(&u, &prev).unwrap();
            let scale = g.max_abs();
            for i in 0..space.n_free() {
                let mut e = vec![0.0; space.n_free()];
                e[i] = 1.0;
                let err = best_fd_error(|v| f.evaluate_j(v, &prev).unwrap(), &u, &e, g.values()[i], scale);
                assert!(err <= 1e-5, "{name}: entry {i} error {err}");
            }
        }
    }
}

#[test]
fn directional_derivatives_match_finite_differences() {
    let space = coarse_square();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (name, p) in exponents() {
        let f = Functionals::new(space.clone(), &p, 1e-14, 0.0).unwrap();
        let u = random_field(&space, &mut rng);
        let prev = random_field(&space, &mut rng);
        for _ in 0..10 {
            let dir: Vec<f64> = (0..space.n_free()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let gs = f.grad_s(&u).unwrap().pair(&dir);
            let err = best_fd_error(|v| f.evaluate_s(v).unwrap(), &u, &dir, gs, gs.abs());
            assert!(err <= 1e-5, "{name}: grad_S direction error {err}");
            let gj = f.grad_j(&u, &prev).unwrap().pair(&dir);
            let err = best_fd_error(|v| f.evaluate_j(v, &prev).unwrap(), &u, &dir, gj, gj.abs());
            assert!(err <= 1e-5, "{name}: grad_J direction error {err}");
            let gr = f.grad_r(&u).unwrap().pair(&dir);
            let err = best_fd_error(|v| f.evaluate_r(v).unwrap(), &u, &dir, gr, gr.abs());
            assert!(err <= 1e-5, "{name}: grad_R direction error {err}");
        }
    }
}

#[test]
fn regularized_gradient_is_consistent() {
    let space = coarse_square();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let p = ExponentField::new(|x| 1.5 + x[0], 1.5, 2.5).unwrap();
    let f = Functionals::new(space.clone(), &p, 1e-14, 1e-2).unwrap();
    let u = random_field(&space, &mut rng);
    for _ in 0..5 {
        let dir: Vec<f64> = (0..space.n_free()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gr = f.grad_r(&u).unwrap().pair(&dir);
        let err = best_fd_error(|v| f.evaluate_r(v).unwrap(), &u, &dir, gr, gr.abs());
        assert!(err <= 1e-5, "error {err}");
    }
}

#[test]
fn rayleigh_quotient_is_zero_homogeneous() {
    let space = coarse_square();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (name, p) in exponents() {
        let f = Functionals::new(space.clone(), &p, 1e-14, 0.0).unwrap();
        let u = random_field(&space, &mut rng);
        let q = f.evaluate_r(&u).unwrap() / f.evaluate_s(&u).unwrap();
        for _ in 0..20 {
            let omega = rng.gen_range(-50.0..50.0);
            let v = u.scaled(omega);
            let qv = f.evaluate_r(&v).unwrap() / f.evaluate_s(&v).unwrap();
            assert!((qv - q).abs() <= 1e-10 * q, "{name}: ω = {omega}");
        }
    }
}

#[test]
fn el_residual_decreases_under_refinement() {
    // Interpolated sin·sin against its exact eigenvalue. P2 only: with P1 on
    // the crossed mesh the corner and center nodes carry lumped masses in
    // ratio 2:1 against identical stiffness rows, so the entrywise defect of
    // an interpolant stays O(1).
    let p = ExponentField::constant(2.0).unwrap();
    let lambda = PI * 2f64.sqrt();
    let res: Vec<f64> = [0.2, 0.1, 0.05, 0.025]
        .iter()
        .map(|&h| {
            let s = Arc::new(FeSpace::new(Arc::new(generate_mesh(DomainSpec::unit_square(), h, ElementOrder::P2).unwrap())));
            let f = Functionals::new(s.clone(), &p, 1e-13, 0.0).unwrap();
            let u = ScalarField::interpolate(s, |x| (PI * x[0]).sin() * (PI * x[1]).sin());
            f.el_residual(&u, lambda).unwrap()
        })
        .collect();
    for w in res.windows(2) {
        assert!(w[1] < 0.6 * w[0], "{res:?}");
    }
}
