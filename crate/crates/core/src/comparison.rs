//! Nonhomogeneous Rayleigh quotients and the amplitude scan contrasting them
//! with the Luxemburg quotient.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::assembly::{FeSpace, ScalarField};
use crate::luxemburg::{luxemburg_norm, ExponentField, SampledField};
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-13;

/// `∫ w |f|^p` with the per-point weight `w(p)`.
fn power_integral(f: &SampledField, p: &[f64], weight: impl Fn(f64) -> f64) -> f64 {
    f.magnitudes()
        .iter()
        .zip(p)
        .zip(f.weights())
        .map(|((&m, &p), &w)| if m == 0.0 { 0.0 } else { w * m.powf(p) * weight(p) })
        .sum()
}

fn quotient(u: &ScalarField, p: &ExponentField, weight: impl Fn(f64) -> f64 + Copy) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let p = p.sample(u.space().points())?;
    let num = power_integral(&u.sample_gradient(), &p, weight);
    let den = power_integral(&u.sample(), &p, weight);
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    let q = num / den;
    if !q.is_finite() {
        return Err(Error::NonFinite("Rayleigh quotient"));
    }
    Ok(q)
}

/// `∫ |∇u|^p / p  /  ∫ |u|^p / p`.
pub fn quotient_mu(u: &ScalarField, p: &ExponentField) -> Result<f64> {
    quotient(u, p, |p| 1.0 / p)
}

/// `∫ |∇u|^p  /  ∫ |u|^p`.
pub fn quotient_mubar(u: &ScalarField, p: &ExponentField) -> Result<f64> {
    quotient(u, p, |_| 1.0)
}

/// `‖∇u‖ / ‖u‖` in the Luxemburg norms; invariant under `u ↦ t u`.
pub fn homogeneous_quotient(u: &ScalarField, p: &ExponentField) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let p = p.sample(u.space().points())?;
    let num = luxemburg_norm(&u.sample_gradient(), &p, NORM_TOL)?;
    let den = luxemburg_norm(&u.sample(), &p, NORM_TOL)?;
    Ok(num / den)
}

/// Smooth 1D bump: 1 on `|x - center| ≤ plateau`, a `cos²` shoulder out to
/// `|x - center| = radius`, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub center: f64,
    pub plateau: f64,
    pub radius: f64,
}

impl Bump {
    pub fn new(center: f64, plateau: f64, radius: f64) -> Result<Self> {
        if !(center.is_finite() && plateau >= 0.0 && radius > plateau && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bump needs 0 <= plateau < radius (got {plateau}, {radius})"
            )));
        }
        Ok(Bump { center, plateau, radius })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let r = (x - self.center).abs();
        if r <= self.plateau {
            1.0
        } else if r >= self.radius {
            0.0
        } else {
            let s = (r - self.plateau) / (self.radius - self.plateau);
            (0.5 * std::f64::consts::PI * s).cos().powi(2)
        }
    }
}

/// One amplitude of a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub t: f64,
    pub mubar: f64,
    pub homogeneous: f64,
}

/// `μ̄*(tφ)` and `‖∇(tφ)‖/‖tφ‖` over a decreasing amplitude grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientScan {
    pub description: String,
    pub rows: Vec<ScanRow>,
}

impl QuotientScan {
    pub fn mubar(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.mubar).collect()
    }

    pub fn homogeneous(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.homogeneous).collect()
    }

    /// CSV with header `t,mubar,homog`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,mubar,homog\n");
        for r in &self.rows {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", r.t, r.mubar, r.homogeneous).unwrap();
        }
        out
    }
}

/// Evaluates the quotients of `t·bump` for each amplitude on a 1D space.
/// The amplitudes must be positive and strictly decreasing.
pub fn collapse_scan(space: &Arc<FeSpace>, p: &ExponentField, bump: &Bump, amplitudes: &[f64]) -> Result<QuotientScan> {
    if space.dim() != 1 {
        return Err(Error::InvalidArgument("amplitude scans run on 1D meshes".into()));
    }
    if amplitudes.is_empty() {
        return Err(Error::InvalidArgument("empty amplitude grid".into()));
    }
    if amplitudes.iter().any(|&t| !(t > 0.0 && t.is_finite())) || amplitudes.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("amplitudes must be positive and strictly decreasing".into()));
    }
    let profile = ScalarField::interpolate(space.clone(), |x| bump.eval(x[0]));
    if profile.is_zero() {
        return Err(Error::ZeroField);
    }
    let rows = amplitudes
        .iter()
        .map(|&t| {
            let u = profile.scaled(t);
            Ok(ScanRow { t, mubar: quotient_mubar(&u, p)?, homogeneous: homogeneous_quotient(&u, p)? })
        })
        .collect::<Result<Vec<_>>>()?;
    for r in &rows {
        if !(r.mubar > 0.0 && r.mubar.is_finite() && r.homogeneous > 0.0 && r.homogeneous.is_finite()) {
            return Err(Error::NonFinite("scan quotient"));
        }
    }
    let description = format!(
        "bump center {} plateau {} radius {}, exponent range [{}, {}]",
        bump.center,
        bump.plateau,
        bump.radius,
        p.p_minus(),
        p.p_plus()
    );
    Ok(QuotientScan { description, rows })
}
