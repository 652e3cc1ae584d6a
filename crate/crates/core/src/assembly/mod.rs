//! Discrete variational quantities.
//!
//! With `K = ‖∇u‖` and `k = ‖u‖` (Luxemburg norms at the quadrature points):
//!
//! * `R(u) = K²`, `S(u) = k²`, so `R/S` is the squared Rayleigh quotient;
//! * `∇S(u)η = 2 ∫ |u/k|^{p-2} u η / ∫ |u/k|^p`;
//! * `∇R(u)η = 2 ∫ |∇u/K|^{p-2} ∇u·∇η / ∫ |∇u/K|^p`;
//! * `J(u) = R(u) - ∇S(u_prev) u`, the inner functional of the power step.
//!
//! Gradients are returned as [`DualVector`]s, one pairing per free basis
//! function.

pub(crate) mod matrix;
mod space;

use std::sync::Arc;

pub use matrix::{assemble_mass, assemble_stiffness};
pub use space::FeSpace;

use crate::luxemburg::{luxemburg_norm_regularized, luxemburg_norm_with_terms, ExponentField, SampledField};
use crate::{Error, Result};

/// Finite-element function with zero boundary trace: one coefficient per free
/// dof of its space.
#[derive(Debug, Clone)]
pub struct ScalarField {
    space: Arc<FeSpace>,
    coeffs: Vec<f64>,
}

impl ScalarField {
    pub fn new(space: Arc<FeSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_free() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} free dofs",
                coeffs.len(),
                space.n_free()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("field coefficients"));
        }
        Ok(ScalarField { space, coeffs })
    }

    pub fn zeros(space: Arc<FeSpace>) -> Self {
        let n = space.n_free();
        ScalarField { space, coeffs: vec![0.0; n] }
    }

    pub fn interpolate(space: Arc<FeSpace>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let coeffs = space.interpolate(f);
        ScalarField { space, coeffs }
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn scaled(&self, omega: f64) -> Self {
        ScalarField { space: self.space.clone(), coeffs: self.coeffs.iter().map(|c| omega * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Values at every dof of the mesh (zero on the boundary).
    pub fn nodal_values(&self) -> Vec<f64> {
        self.space.expand(&self.coeffs)
    }

    pub fn sample(&self) -> SampledField {
        self.space.sample(&self.coeffs).expect("coefficient count checked at construction")
    }

    pub fn sample_gradient(&self) -> SampledField {
        self.space.sample_gradient(&self.coeffs).expect("coefficient count checked at construction")
    }

    /// `∫ u`.
    pub fn integral(&self) -> f64 {
        self.space.integrate_points(&self.space.values_at_points(&self.coeffs))
    }
}

/// One real per free dof: the pairing of a linear functional with each basis
/// function.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector {
    values: Vec<f64>,
}

impl DualVector {
    pub fn new(values: Vec<f64>) -> Self {
        DualVector { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pairing with a coefficient vector.
    pub fn pair(&self, coeffs: &[f64]) -> f64 {
        dot(&self.values, coeffs)
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        dot(&self.values, &self.values).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The constants `K = ‖∇u‖`, `k = ‖u‖` and `S = ∫|∇u/K|^p / ∫|u/k|^p` of the
/// weak Euler–Lagrange equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElConstants {
    pub grad_norm: f64,
    pub norm: f64,
    pub s_const: f64,
}

impl ElConstants {
    /// `K / k`.
    pub fn quotient(&self) -> f64 {
        self.grad_norm / self.norm
    }
}

/// Pointwise weights `c = |f/γ|^{p-2}` (regularized: `(|f/γ|² + ε²)^{(p-2)/2}`)
/// and the normalizing integral `Σ w c |f/γ|²` (= `∫ |f/γ|^p` for `ε = 0`).
struct NormalizedPowers {
    c: Vec<f64>,
    denominator: f64,
}

fn normalized_powers(f: &SampledField, p: &[f64], gamma: f64, eps: f64) -> NormalizedPowers {
    let mags = f.magnitudes();
    let mut c = Vec::with_capacity(mags.len());
    let mut denominator = 0.0;
    for q in 0..mags.len() {
        let m = mags[q] / gamma;
        let cq = if eps > 0.0 {
            (m * m + eps * eps).powf(0.5 * (p[q] - 2.0))
        } else if m == 0.0 {
            0.0
        } else {
            ((p[q] - 2.0) * m.ln()).exp()
        };
        denominator += f.weights()[q] * cq * m * m;
        c.push(cq);
    }
    NormalizedPowers { c, denominator }
}

/// Same as [`normalized_powers`] without regularization, from the modular
/// terms `|f/γ|^p` left by the norm solve.
fn powers_from_terms(f: &SampledField, terms: &[f64], gamma: f64) -> NormalizedPowers {
    let mags = f.magnitudes();
    let mut denominator = 0.0;
    let c = mags
        .iter()
        .zip(terms)
        .zip(f.weights())
        .map(|((&m, &t), &w)| {
            denominator += w * t;
            let m = m / gamma;
            if m == 0.0 {
                0.0
            } else {
                t / (m * m)
            }
        })
        .collect();
    NormalizedPowers { c, denominator }
}

/// Norm and normalized powers of a sampled field.
fn norm_and_powers(f: &SampledField, p: &[f64], eps: f64, tol: f64) -> Result<(f64, NormalizedPowers)> {
    if eps == 0.0 {
        let (gamma, terms) = luxemburg_norm_with_terms(f, p, tol)?;
        if gamma == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok((gamma, powers_from_terms(f, &terms, gamma)))
    } else {
        let gamma = luxemburg_norm_regularized(f, p, eps, tol)?;
        if gamma == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok((gamma, normalized_powers(f, p, gamma, eps)))
    }
}

/// Exponent samples bound to a space: evaluates `R`, `S`, `J`, their
/// gradients and the Euler–Lagrange residual.
#[derive(Debug, Clone)]
pub struct Functionals {
    space: Arc<FeSpace>,
    p: Vec<f64>,
    newton_tol: f64,
    eps: f64,
}

impl Functionals {
    /// `eps` regularizes the gradient modular (`0` disables it).
    pub fn new(space: Arc<FeSpace>, p: &ExponentField, newton_tol: f64, eps: f64) -> Result<Self> {
        if !(newton_tol > 0.0) {
            return Err(Error::InvalidArgument(format!("newton_tol = {newton_tol}")));
        }
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("regularization eps = {eps}")));
        }
        let p = p.sample(space.points())?;
        Ok(Functionals { space, p, newton_tol, eps })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    /// Exponent at the quadrature points.
    pub fn exponent_samples(&self) -> &[f64] {
        &self.p
    }

    pub fn newton_tol(&self) -> f64 {
        self.newton_tol
    }

    fn check(&self, u: &ScalarField) -> Result<()> {
        if !Arc::ptr_eq(u.space(), &self.space) {
            return Err(Error::InvalidArgument("field belongs to a different space".into()));
        }
        Ok(())
    }

    /// `‖u‖` from raw coefficients.
    pub fn norm_of(&self, coeffs: &[f64]) -> Result<f64> {
        luxemburg_norm_regularized(&self.space.sample(coeffs)?, &self.p, 0.0, self.newton_tol)
    }

    /// `‖∇u‖` from raw coefficients (regularized when `eps > 0`).
    pub fn grad_norm_of(&self, coeffs: &[f64]) -> Result<f64> {
        luxemburg_norm_regularized(&self.space.sample_gradient(coeffs)?, &self.p, self.eps, self.newton_tol)
    }

    pub fn evaluate_r(&self, u: &ScalarField) -> Result<f64> {
        self.check(u)?;
        let k = self.grad_norm_of(u.coeffs())?;
        if k == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(k * k)
    }

    pub fn evaluate_s(&self, u: &ScalarField) -> Result<f64> {
        self.check(u)?;
        let k = self.norm_of(u.coeffs())?;
        if k == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(k * k)
    }

    /// `∇S(u)` as a dual vector.
    pub fn grad_s(&self, u: &ScalarField) -> Result<DualVector> {
        self.check(u)?;
        self.grad_s_raw(u.coeffs()).map(DualVector::new)
    }

    pub(crate) fn grad_s_raw(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        let f = self.space.sample(coeffs)?;
        let (_, pw) = norm_and_powers(&f, &self.p, 0.0, self.newton_tol)?;
        let scale = 2.0 / pw.denominator;
        let s: Vec<f64> = f.values().iter().zip(&pw.c).map(|(u, c)| scale * c * u).collect();
        Ok(self.space.assemble(Some(&s), None))
    }

    /// `R(u)` and `∇R(u)` from raw coefficients.
    pub(crate) fn r_and_grad_raw(&self, coeffs: &[f64]) -> Result<(f64, Vec<f64>)> {
        let g = self.space.sample_gradient(coeffs)?;
        let (big_k, pw) = norm_and_powers(&g, &self.p, self.eps, self.newton_tol)?;
        let scale = 2.0 / pw.denominator;
        let dim = g.components();
        let v: Vec<f64> = g
            .values()
            .iter()
            .enumerate()
            .map(|(i, gv)| scale * pw.c[i / dim] * gv)
            .collect();
        Ok((big_k * big_k, self.space.assemble(None, Some(&v))))
    }

    /// `∇R(u)` as a dual vector.
    pub fn grad_r(&self, u: &ScalarField) -> Result<DualVector> {
        self.check(u)?;
        Ok(DualVector::new(self.r_and_grad_raw(u.coeffs())?.1))
    }

    /// `J(u) = R(u) - ∇S(u_prev) u`.
    pub fn evaluate_j(&self, u: &ScalarField, u_prev: &ScalarField) -> Result<f64> {
        self.check(u_prev)?;
        let b = self.grad_s(u_prev)?;
        Ok(self.evaluate_r(u)? - b.pair(u.coeffs()))
    }

    /// `∇J(u) = ∇R(u) - ∇S(u_prev)`, the exact gradient of
    /// [`Functionals::evaluate_j`].
    pub fn grad_j(&self, u: &ScalarField, u_prev: &ScalarField) -> Result<DualVector> {
        self.check(u)?;
        self.check(u_prev)?;
        let b = self.grad_s_raw(u_prev.coeffs())?;
        let (_, gr) = self.r_and_grad_raw(u.coeffs())?;
        Ok(DualVector::new(gr.iter().zip(&b).map(|(a, b)| a - b).collect()))
    }

    pub fn el_constants(&self, u: &ScalarField) -> Result<ElConstants> {
        self.check(u)?;
        let f = u.sample();
        let g = u.sample_gradient();
        let k = luxemburg_norm_regularized(&f, &self.p, 0.0, self.newton_tol)?;
        let big_k = luxemburg_norm_regularized(&g, &self.p, self.eps, self.newton_tol)?;
        if k == 0.0 || big_k == 0.0 {
            return Err(Error::ZeroField);
        }
        let num = normalized_powers(&g, &self.p, big_k, self.eps).denominator;
        let den = normalized_powers(&f, &self.p, k, 0.0).denominator;
        Ok(ElConstants { grad_norm: big_k, norm: k, s_const: num / den })
    }

    /// Normalized defect of the weak Euler–Lagrange equation
    ///
    /// ```text
    /// ∫ |∇u/K|^{p-2} ∇u/K · ∇η_i  =  λ S ∫ |u/k|^{p-2} (u/k) η_i
    /// ```
    ///
    /// over all free basis functions: the max-norm of the difference divided
    /// by the max-norm of the left-hand side.
    pub fn el_residual(&self, u: &ScalarField, lambda: f64) -> Result<f64> {
        let consts = self.el_constants(u)?;
        let f = u.sample();
        let g = u.sample_gradient();
        let (big_k, k) = (consts.grad_norm, consts.norm);
        let pg = normalized_powers(&g, &self.p, big_k, self.eps);
        let pf = normalized_powers(&f, &self.p, k, 0.0);
        let dim = g.components();
        let v: Vec<f64> = g.values().iter().enumerate().map(|(i, gv)| pg.c[i / dim] * gv / big_k).collect();
        let s: Vec<f64> = f.values().iter().zip(&pf.c).map(|(u, c)| c * u / k).collect();
        let lhs = DualVector::new(self.space.assemble(None, Some(&v)));
        let rhs = self.space.assemble(Some(&s), None);
        let scale = lambda * consts.s_const;
        let defect = lhs
            .values()
            .iter()
            .zip(&rhs)
            .fold(0.0f64, |m, (a, b)| m.max((a - scale * b).abs()));
        Ok(defect / lhs.max_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, DomainSpec, ElementOrder};
    use std::f64::consts::PI;

    fn setup(spec: DomainSpec, h: f64, order: ElementOrder, p: ExponentField) -> (Arc<FeSpace>, Functionals) {
        let space = Arc::new(FeSpace::new(Arc::new(generate_mesh(spec, h, order).unwrap())));
        let f = Functionals::new(space.clone(), &p, 1e-13, 0.0).unwrap();
        (space, f)
    }

    #[test]
    fn r_of_sine_tends_to_pi_squared_over_four() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let (space, f) = setup(DomainSpec::Interval { a: 0.0, b: 1.0 }, 0.01, ElementOrder::P2, p2);
        let u = ScalarField::interpolate(space, |x| (PI * x[0]).sin());
        let r = f.evaluate_r(&u).unwrap();
        assert!((r - PI * PI / 4.0).abs() < 1e-6, "{r}");
        let r2 = f.evaluate_r(&u.scaled(2.0)).unwrap();
        assert!((r2 - 4.0 * r).abs() < 1e-12 * r2);
    }

    #[test]
    fn r_of_parabola_is_one_sixth() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let (space, f) = setup(DomainSpec::Interval { a: 0.0, b: 1.0 }, 0.25, ElementOrder::P2, p2);
        let u = ScalarField::interpolate(space, |x| x[0] * (1.0 - x[0]));
        assert!((f.evaluate_r(&u).unwrap() - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn s_of_product_sine() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let (space, f) = setup(DomainSpec::unit_square(), 0.05, ElementOrder::P2, p2);
        let u = ScalarField::interpolate(space.clone(), |x| (PI * x[0]).sin() * (PI * x[1]).sin());
        let s = f.evaluate_s(&u).unwrap();
        assert!((s - 0.125).abs() < 1e-5, "{s}");
        assert!((f.evaluate_s(&u.scaled(-3.0)).unwrap() - 9.0 * s).abs() < 1e-12);
        assert!(matches!(f.evaluate_s(&ScalarField::zeros(space)), Err(Error::ZeroField)));
    }

    #[test]
    fn grad_s_reduces_to_mass_product_for_p2() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let (space, f) = setup(DomainSpec::unit_square(), 0.2, ElementOrder::P2, p2);
        let u = ScalarField::interpolate(space.clone(), |x| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]) + 0.3 * x[0] * x[1] * (1.0 - x[1]) * (1.0 - x[0]).powi(2));
        let g = f.grad_s(&u).unwrap();
        let m = assemble_mass(&space);
        let mu = matrix::csr_mul(&m, u.coeffs());
        for (a, b) in g.values().iter().zip(&mu) {
            assert!((a - b).abs() < 1e-13);
        }
        // Euler identity for the 2-homogeneous S
        let s = f.evaluate_s(&u).unwrap();
        assert!((g.pair(u.coeffs()) - 2.0 * s).abs() < 1e-9 * s);
    }

    #[test]
    fn el_residual_of_wrong_lambda_is_large() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let (space, f) = setup(DomainSpec::unit_square(), 0.1, ElementOrder::P2, p2);
        let u = ScalarField::interpolate(space, |x| (PI * x[0]).sin() * (PI * x[1]).sin());
        let c = f.el_constants(&u).unwrap();
        let good = f.el_residual(&u, c.quotient()).unwrap();
        let bad = f.el_residual(&u, 2.0 * c.quotient()).unwrap();
        assert!(good < 0.05, "{good}");
        assert!(bad > 0.1, "{bad}");
        // p ≡ 2: S = ∫|∇u/K|² / ∫|u/k|² = 2/2
        assert!((c.s_const - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_foreign_fields() {
        let p2 = ExponentField::constant(2.0).unwrap();
        let (_, f) = setup(DomainSpec::unit_square(), 0.5, ElementOrder::P1, p2.clone());
        let (other, _) = setup(DomainSpec::unit_square(), 0.5, ElementOrder::P1, p2);
        let u = ScalarField::interpolate(other, |_| 1.0);
        assert!(f.evaluate_r(&u).is_err());
    }
}
