//! Luxemburg norm with the `1/p(x)`-weighted modular
//!
//! ```text
//! ‖f‖ = inf { γ > 0 : ∫ |f/γ|^{p(x)} / p(x) ≤ 1 }
//! ```
//!
//! of a field sampled at quadrature points, and its first variation.
//!
//! The modular `M(γ) = Σ w |f/γ|^p / p` is a sum of negative powers of `γ`,
//! so `G(s) = ln M(e^s)` is convex and decreasing in `s = ln γ` (a log-sum-exp
//! of affine functions). Newton's method on `G` started left of the root
//! increases monotonically to it, and is exact in one step for constant `p`.

use std::fmt;
use std::sync::Arc;

use crate::mesh::DomainSpec;
use crate::{Error, Result};

/// Variable exponent `p(x)` with declared bounds `1 < p⁻ ≤ p(x) ≤ p⁺ < ∞`.
#[derive(Clone)]
pub struct ExponentField {
    eval: Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>,
    p_minus: f64,
    p_plus: f64,
    constant: Option<f64>,
}

impl fmt::Debug for ExponentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExponentField")
            .field("p_minus", &self.p_minus)
            .field("p_plus", &self.p_plus)
            .field("constant", &self.constant)
            .finish()
    }
}

/// Relative slack when checking sampled values against the declared bounds.
const BOUND_SLACK: f64 = 1e-9;

impl ExponentField {
    pub fn new<F>(eval: F, p_minus: f64, p_plus: f64) -> Result<Self>
    where
        F: Fn([f64; 2]) -> f64 + Send + Sync + 'static,
    {
        if !(p_minus > 1.0 && p_minus <= p_plus && p_plus.is_finite()) {
            return Err(Error::InvalidExponent(format!(
                "bounds must satisfy 1 < p- <= p+ < inf, got [{p_minus}, {p_plus}]"
            )));
        }
        Ok(ExponentField { eval: Arc::new(eval), p_minus, p_plus, constant: None })
    }

    pub fn constant(p: f64) -> Result<Self> {
        let mut field = Self::new(move |_| p, p, p)?;
        field.constant = Some(p);
        Ok(field)
    }

    /// Builds a field whose bounds are estimated on a dense sample of the
    /// domain and padded outward by 1% of the observed range (never below the
    /// midpoint between 1 and the observed minimum). Fails if any sample is
    /// non-finite or `≤ 1`.
    pub fn with_estimated_bounds<F>(eval: F, domain: &DomainSpec, samples_per_axis: usize) -> Result<Self>
    where
        F: Fn([f64; 2]) -> f64 + Send + Sync + 'static,
    {
        let (lo, hi) = sample_range(&eval, domain, samples_per_axis.max(2))?;
        if lo == hi {
            let mut field = Self::new(eval, lo, hi)?;
            field.constant = Some(lo);
            return Ok(field);
        }
        let pad = 0.01 * (hi - lo);
        let p_minus = (lo - pad).max(0.5 * (1.0 + lo));
        Self::new(eval, p_minus, hi + pad)
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        (self.eval)(x)
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    /// `Some(p)` when the field was constructed as a constant.
    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    /// Evaluates at `points`, checking the declared bounds.
    pub fn sample(&self, points: &[[f64; 2]]) -> Result<Vec<f64>> {
        let lo = self.p_minus * (1.0 - BOUND_SLACK);
        let hi = self.p_plus * (1.0 + BOUND_SLACK);
        points
            .iter()
            .map(|&x| {
                let p = self.eval(x);
                if !p.is_finite() || p <= 1.0 || p < lo || p > hi {
                    Err(Error::InvalidExponent(format!(
                        "p({}, {}) = {p} outside [{}, {}]",
                        x[0], x[1], self.p_minus, self.p_plus
                    )))
                } else {
                    Ok(p)
                }
            })
            .collect()
    }

    /// Homotopy `p_t = 2 + t (p - 2)` between the Laplacian and `self`.
    pub fn homotopy(&self, t: f64) -> Result<Self> {
        let inner = self.eval.clone();
        let lerp = move |p: f64| 2.0 + t * (p - 2.0);
        let (a, b) = (lerp(self.p_minus), lerp(self.p_plus));
        let mut field = Self::new(move |x| lerp(inner(x)), a.min(b), a.max(b))?;
        field.constant = self.constant.map(lerp);
        Ok(field)
    }
}

fn sample_range<F: Fn([f64; 2]) -> f64>(eval: &F, domain: &DomainSpec, n: usize) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut visit = |x: [f64; 2]| -> Result<()> {
        let p = eval(x);
        if !p.is_finite() || p <= 1.0 {
            return Err(Error::InvalidExponent(format!(
                "p({}, {}) = {p}; the exponent must exceed 1 everywhere",
                x[0], x[1]
            )));
        }
        lo = lo.min(p);
        hi = hi.max(p);
        Ok(())
    };
    let grid = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
    match *domain {
        DomainSpec::Interval { a, b } => {
            for i in 0..n {
                visit([grid(a, b, i), 0.0])?;
            }
        }
        DomainSpec::Rectangle { x0, x1, y0, y1 } => {
            for j in 0..n {
                for i in 0..n {
                    visit([grid(x0, x1, i), grid(y0, y1, j)])?;
                }
            }
        }
        DomainSpec::Disk { cx, cy, r } => {
            for j in 0..n {
                for i in 0..n {
                    let x = [grid(cx - r, cx + r, i), grid(cy - r, cy + r, j)];
                    if (x[0] - cx).hypot(x[1] - cy) <= r {
                        visit(x)?;
                    }
                }
            }
        }
        DomainSpec::Annulus { cx, cy, r_in, r_out } => {
            for j in 0..n {
                for i in 0..n {
                    let x = [grid(cx - r_out, cx + r_out, i), grid(cy - r_out, cy + r_out, j)];
                    let d = (x[0] - cx).hypot(x[1] - cy);
                    if d >= r_in && d <= r_out {
                        visit(x)?;
                    }
                }
            }
        }
    }
    Ok((lo, hi))
}

/// Scalar or vector values at quadrature points together with their
/// integration weights (quadrature weight times element Jacobian).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    components: usize,
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl SampledField {
    pub fn scalar(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::new(1, values, weights)
    }

    /// `values` holds `components` consecutive entries per point.
    pub fn new(components: usize, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != components * weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} points with {components} components",
                values.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidArgument("quadrature weights must be positive".into()));
        }
        Ok(SampledField { components, values, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Value (or vector) at point `q`.
    pub fn at(&self, q: usize) -> &[f64] {
        &self.values[self.components * q..self.components * (q + 1)]
    }

    /// Euclidean magnitude at each point.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values
            .chunks_exact(self.components)
            .map(|c| if c.len() == 1 { c[0].abs() } else { c.iter().map(|v| v * v).sum::<f64>().sqrt() })
            .collect()
    }

    /// Pointwise `ω f`.
    pub fn scaled(&self, omega: f64) -> Self {
        SampledField {
            components: self.components,
            values: self.values.iter().map(|v| omega * v).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Pointwise `f + ω g`; layouts must match.
    pub fn axpy(&self, omega: f64, other: &SampledField) -> Result<Self> {
        self.check_layout(other)?;
        Ok(SampledField {
            components: self.components,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + omega * b).collect(),
            weights: self.weights.clone(),
        })
    }

    fn check_layout(&self, other: &SampledField) -> Result<()> {
        if self.components != other.components || self.len() != other.len() {
            return Err(Error::InvalidArgument("sampled fields have different layouts".into()));
        }
        Ok(())
    }
}

fn check_exponent(f: &SampledField, p: &[f64]) -> Result<()> {
    if p.len() != f.len() {
        return Err(Error::InvalidArgument(format!(
            "{} exponent samples for {} points",
            p.len(),
            f.len()
        )));
    }
    Ok(())
}

/// Modular `Σ w |f/γ|^p / p` (that is, `F(f, γ) + 1`).
pub fn modular(f: &SampledField, p: &[f64], gamma: f64) -> Result<f64> {
    check_exponent(f, p)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    let mags = f.magnitudes();
    Ok(mags
        .iter()
        .zip(p)
        .zip(f.weights())
        .map(|((&m, &p), &w)| if m == 0.0 { 0.0 } else { w * (m / gamma).powf(p) / p })
        .sum())
}

/// Regularized modular used for gradient fields when `eps > 0`:
/// `Σ w ((|f/γ|² + ε²)^{p/2} - ε^p) / p`. Reduces to [`modular`] at `eps = 0`.
pub fn modular_regularized(f: &SampledField, p: &[f64], gamma: f64, eps: f64) -> Result<f64> {
    if eps == 0.0 {
        return modular(f, p, gamma);
    }
    check_exponent(f, p)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma = {gamma} must be positive")));
    }
    let mags = f.magnitudes();
    Ok(mags
        .iter()
        .zip(p)
        .zip(f.weights())
        .map(|((&m, &p), &w)| {
            let q = (m / gamma).powi(2) + eps * eps;
            w * (q.powf(0.5 * p) - eps.powf(p)) / p
        })
        .sum())
}

/// Luxemburg norm: the root `γ*` of `modular(f, p, γ) = 1`, accurate to
/// `|modular - 1| ≤ tol`. Returns exactly 0 for the zero field.
pub fn luxemburg_norm(f: &SampledField, p: &[f64], tol: f64) -> Result<f64> {
    luxemburg_norm_regularized(f, p, 0.0, tol)
}

/// Luxemburg norm of the regularized modular (see [`modular_regularized`]).
pub fn luxemburg_norm_regularized(f: &SampledField, p: &[f64], eps: f64, tol: f64) -> Result<f64> {
    solve_norm(f, p, eps, tol, &mut vec![0.0; f.len()])
}

/// Luxemburg norm `γ` together with `|f/γ|^p` at every point.
pub(crate) fn luxemburg_norm_with_terms(f: &SampledField, p: &[f64], tol: f64) -> Result<(f64, Vec<f64>)> {
    let mut terms = vec![0.0; f.len()];
    let gamma = solve_norm(f, p, 0.0, tol, &mut terms)?;
    Ok((gamma, terms))
}

fn solve_norm(f: &SampledField, p: &[f64], eps: f64, tol: f64, terms: &mut [f64]) -> Result<f64> {
    check_exponent(f, p)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {tol} must be positive")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be non-negative")));
    }
    let mags = f.magnitudes();
    if mags.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFinite("Luxemburg norm argument"));
    }
    let max = mags.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    let (p_lo, p_hi) = p.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &q| (a.min(q), b.max(q)));
    let modular = ModularEval::new(&mags, p, f.weights(), eps);

    // Left bracket: F(γ₀) > 0.
    let mass: f64 = f.weights().iter().sum();
    let mut s = (max * (mass / p_hi).powf(1.0 / p_lo).min(1.0)).ln();
    let (mut m, mut dm) = modular.eval(s, terms);
    let mut halvings = 0;
    while m <= 1.0 {
        s -= std::f64::consts::LN_2;
        (m, dm) = modular.eval(s, terms);
        halvings += 1;
        if halvings > 2000 {
            return Err(Error::NormNotConverged { residual: m - 1.0 });
        }
    }
    let mut lo = s;
    let mut hi = f64::INFINITY;

    for _ in 0..200 {
        if (m - 1.0).abs() <= tol {
            return Ok(s.exp());
        }
        if m > 1.0 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
        // Newton on G(s) = ln M(e^s): G' = M'/M.
        let mut next = s - m.ln() * m / dm;
        if !(next.is_finite() && next > lo && next < hi) {
            next = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + std::f64::consts::LN_2 };
        }
        if next == s || (hi - lo) <= 4.0 * f64::EPSILON * lo.abs().max(1.0) {
            // roundoff floor; `terms` belongs to the evaluated point
            return Ok(s.exp());
        }
        s = next;
        (m, dm) = modular.eval(s, terms);
    }
    Err(Error::NormNotConverged { residual: m - 1.0 })
}

/// Modular as a function of `s = ln γ`, with precomputed logarithms.
struct ModularEval<'a> {
    log_mags: Vec<f64>,
    mags: &'a [f64],
    p: &'a [f64],
    w: &'a [f64],
    eps: f64,
}

impl<'a> ModularEval<'a> {
    fn new(mags: &'a [f64], p: &'a [f64], w: &'a [f64], eps: f64) -> Self {
        let log_mags = mags.iter().map(|&m| if m > 0.0 { m.ln() } else { f64::NEG_INFINITY }).collect();
        ModularEval { log_mags, mags, p, w, eps }
    }

    /// Modular and its derivative `dM/ds` in one pass. Without
    /// regularization, `terms` receives `|f/γ|^p` at every point.
    fn eval(&self, s: f64, terms: &mut [f64]) -> (f64, f64) {
        let (mut m, mut dm) = (0.0, 0.0);
        if self.eps == 0.0 {
            for (((t, &lm), &p), &w) in terms.iter_mut().zip(&self.log_mags).zip(self.p).zip(self.w) {
                *t = if lm > f64::NEG_INFINITY { (p * (lm - s)).exp() } else { 0.0 };
                let e = w * *t;
                m += e / p;
                dm -= e;
            }
        } else {
            let inv = (-s).exp();
            let e2 = self.eps * self.eps;
            for i in 0..self.p.len() {
                let a = (self.mags[i] * inv).powi(2);
                let half = 0.5 * self.p[i];
                let q = (a + e2).powf(half - 1.0);
                m += self.w[i] * (q * (a + e2) - self.eps.powf(self.p[i])) / self.p[i];
                dm -= self.w[i] * q * a;
            }
        }
        (m, dm)
    }
}

/// `|t|^{p-2} t` with the value 0 at `t = 0`.
pub fn signed_power(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(p - 1.0)
    }
}

/// Directional derivative of the Luxemburg norm at `f` along `eta`:
///
/// ```text
/// ∫ |f/‖f‖|^{p-2} (f/‖f‖)·η  /  ∫ |f/‖f‖|^p
/// ```
pub fn norm_first_variation(f: &SampledField, eta: &SampledField, p: &[f64], tol: f64) -> Result<f64> {
    f.check_layout(eta)?;
    let gamma = luxemburg_norm(f, p, tol)?;
    if gamma == 0.0 {
        return Err(Error::ZeroField);
    }
    let mags = f.magnitudes();
    let mut num = 0.0;
    let mut den = 0.0;
    for q in 0..f.len() {
        let m = mags[q] / gamma;
        if m == 0.0 {
            continue;
        }
        let w = f.weights()[q];
        // |f/γ|^{p-2} (f/γ)·η
        let scale = m.powf(p[q] - 2.0) / gamma;
        let dot: f64 = f.at(q).iter().zip(eta.at(q)).map(|(a, b)| a * b).sum();
        num += w * scale * dot;
        den += w * m.powf(p[q]);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::gauss_legendre;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Composite Gauss samples of `f` on `[a, b]`.
    fn sample_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize, pts: usize) -> (SampledField, Vec<f64>) {
        let (x, w) = gauss_legendre(pts);
        let h = (b - a) / cells as f64;
        let mut values = Vec::new();
        let mut weights = Vec::new();
        let mut xs = Vec::new();
        for c in 0..cells {
            for k in 0..pts {
                let t = a + h * (c as f64 + 0.5 * (x[k] + 1.0));
                values.push(f(t));
                weights.push(0.5 * h * w[k]);
                xs.push(t);
            }
        }
        (SampledField::scalar(values, weights).unwrap(), xs)
    }

    fn unit_square_constant(c: f64) -> SampledField {
        // one point carrying the whole measure suffices for constants
        SampledField::scalar(vec![c; 4], vec![0.25; 4]).unwrap()
    }

    #[test]
    fn modular_closed_forms() {
        let f = unit_square_constant(1.0);
        let p = vec![2.0; 4];
        assert!((modular(&f, &p, 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((modular(&f, &p, 1.0 / 2f64.sqrt()).unwrap() - 1.0).abs() < 1e-15);
        let g = SampledField::scalar(vec![2.0; 3], vec![1.0 / 3.0; 3]).unwrap();
        assert!((modular(&g, &[3.0; 3], 1.0).unwrap() - 8.0 / 3.0).abs() < 1e-14);
        assert!(modular(&f, &p, 0.0).is_err());
        assert!(modular(&f, &p, -1.0).is_err());
    }

    #[test]
    fn norm_closed_forms() {
        let f = unit_square_constant(1.0);
        let n = luxemburg_norm(&f, &[2.0; 4], 1e-12).unwrap();
        assert!((n - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        // c (|Ω| / p)^{1/p} with c = 3, p = 4, |Ω| = 2
        let g = SampledField::scalar(vec![3.0; 2], vec![1.0; 2]).unwrap();
        let n = luxemburg_norm(&g, &[4.0; 2], 1e-12).unwrap();
        assert!((n - 3.0 * 0.5f64.powf(0.25)).abs() < 1e-12);
        assert!((n - 2.52269).abs() < 1e-5);
    }

    #[test]
    fn norm_of_sine_is_half() {
        let (f, _) = sample_1d(|x| (std::f64::consts::PI * x).sin(), 0.0, 1.0, 16, 8);
        // oracle: γ = (∫ sin² / 2)^{1/2} = 1/2
        let n = luxemburg_norm(&f, &vec![2.0; f.len()], 1e-12).unwrap();
        assert!((n - 0.5).abs() < 1e-12);
    }

    #[test]
    fn zero_field_and_errors() {
        let z = SampledField::scalar(vec![0.0; 5], vec![0.2; 5]).unwrap();
        assert_eq!(luxemburg_norm(&z, &[3.0; 5], 1e-12).unwrap(), 0.0);
        assert!(matches!(norm_first_variation(&z, &z, &[3.0; 5], 1e-12), Err(Error::ZeroField)));
        let bad = SampledField::scalar(vec![1.0, f64::NAN], vec![0.5, 0.5]).unwrap();
        assert!(luxemburg_norm(&bad, &[2.0; 2], 1e-12).is_err());
        assert!(SampledField::scalar(vec![1.0], vec![-1.0]).is_err());
        assert!(SampledField::new(2, vec![1.0; 3], vec![1.0; 2]).is_err());
    }

    #[test]
    fn first_variation_closed_forms() {
        let (f, xs) = sample_1d(|x| (std::f64::consts::PI * x).sin(), 0.0, 1.0, 16, 8);
        let eta_vals: Vec<f64> = xs.iter().map(|x| x * (1.0 - x)).collect();
        let eta = SampledField::scalar(eta_vals, f.weights().to_vec()).unwrap();
        let p = vec![2.0; f.len()];
        let norm = luxemburg_norm(&f, &p, 1e-12).unwrap();
        let d = norm_first_variation(&f, &eta, &p, 1e-12).unwrap();
        // p ≡ 2: ∫ f η / (2 ‖f‖)
        let fe: f64 = (0..f.len()).map(|q| f.weights()[q] * f.values()[q] * eta.values()[q]).sum();
        assert!((d - fe / (2.0 * norm)).abs() < 1e-12);
        // central differences of the norm
        let h = 1e-5;
        let plus = luxemburg_norm(&f.axpy(h, &eta).unwrap(), &p, 1e-14).unwrap();
        let minus = luxemburg_norm(&f.axpy(-h, &eta).unwrap(), &p, 1e-14).unwrap();
        assert!((d - (plus - minus) / (2.0 * h)).abs() < 1e-7);
        // Euler identity
        let self_dir = norm_first_variation(&f, &f, &p, 1e-12).unwrap();
        assert!((self_dir - norm).abs() < 1e-12);
    }

    #[test]
    fn large_exponents_converge() {
        let (f, xs) = sample_1d(|x| (std::f64::consts::PI * x).sin().powi(3), 0.0, 1.0, 32, 4);
        let p: Vec<f64> = xs.iter().map(|x| 28.0 + 26.0 * (2.0 * std::f64::consts::PI * x).cos()).collect();
        for scale in [1e-8, 1.0, 1e8] {
            let g = f.scaled(scale);
            let n = luxemburg_norm(&g, &p, 1e-12).unwrap();
            assert!((modular(&g, &p, n).unwrap() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn regularized_norm_is_root_of_regularized_modular() {
        let (f, _) = sample_1d(|x| x * (1.0 - x) - 0.1, 0.0, 1.0, 8, 4);
        let p = vec![1.5; f.len()];
        let n = luxemburg_norm_regularized(&f, &p, 0.1, 1e-12).unwrap();
        assert!((modular_regularized(&f, &p, n, 0.1).unwrap() - 1.0).abs() < 1e-12);
        let n0 = luxemburg_norm_regularized(&f, &p, 0.0, 1e-12).unwrap();
        assert_eq!(n0, luxemburg_norm(&f, &p, 1e-12).unwrap());
    }

    #[test]
    fn exponent_field_bounds() {
        assert!(ExponentField::constant(1.0).is_err());
        assert!(ExponentField::new(|_| 3.0, 2.0, 1.5).is_err());
        let p = ExponentField::new(|x| 5.0 + 3.0 * (3.0 * std::f64::consts::PI * x[0]).sin(), 2.0, 8.0)
            .unwrap();
        assert!(p.sample(&[[0.1, 0.2], [0.5, 0.5]]).is_ok());
        let tight = ExponentField::new(|x| 2.0 + x[0], 2.0, 2.5).unwrap();
        assert!(tight.sample(&[[0.9, 0.0]]).is_err());
        let dips = ExponentField::with_estimated_bounds(|x| 2.0 - x[0], &DomainSpec::Interval { a: 0.0, b: 1.0 }, 101);
        assert!(dips.is_err());
        let est = ExponentField::with_estimated_bounds(|x| 2.0 + x[0], &DomainSpec::Interval { a: 0.0, b: 1.0 }, 101)
            .unwrap();
        assert!(est.p_minus() < 2.0 && est.p_minus() > 1.0 && est.p_plus() > 3.0);
        let h = p.homotopy(0.5).unwrap();
        assert!((h.p_minus() - 2.0).abs() < 1e-15 && (h.p_plus() - 5.0).abs() < 1e-15);
        assert_eq!(ExponentField::constant(3.0).unwrap().homotopy(0.5).unwrap().constant_value(), Some(2.5));
    }

    #[test]
    fn random_property_suite() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (base, xs) = sample_1d(|x| x, 0.0, 1.0, 10, 4);
        let p: Vec<f64> = xs.iter().map(|x| 2.0 + 2.0 * x * x).collect();
        let random_field = |rng: &mut ChaCha8Rng| {
            let vals: Vec<f64> = (0..base.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            SampledField::scalar(vals, base.weights().to_vec()).unwrap()
        };
        for _ in 0..20 {
            let f = random_field(&mut rng);
            let n = luxemburg_norm(&f, &p, 1e-12).unwrap();
            assert!((modular(&f, &p, n).unwrap() - 1.0).abs() <= 1e-12);
            let omega = 10f64.powf(rng.gen_range(-3.0..3.0));
            let ns = luxemburg_norm(&f.scaled(-omega), &p, 1e-12).unwrap();
            assert!((ns - omega * n).abs() <= 1e-10 * omega * n);
            let (g1, g2): (f64, f64) = (rng.gen_range(0.01..5.0), rng.gen_range(0.01..5.0));
            let (a, b) = (g1.min(g2), g1.max(g2));
            if a < b {
                assert!(modular(&f, &p, a).unwrap() > modular(&f, &p, b).unwrap());
            }
            let g = random_field(&mut rng);
            let sum = luxemburg_norm(&f.axpy(1.0, &g).unwrap(), &p, 1e-12).unwrap();
            assert!(sum <= n + luxemburg_norm(&g, &p, 1e-12).unwrap() + 1e-10);
        }
    }
}
