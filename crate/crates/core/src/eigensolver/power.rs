use std::sync::Arc;

use log::{debug, info, warn};

use super::nlcg::minimize;
use super::{EigenpairResult, SolverConfig};
use crate::assembly::{Functionals, ScalarField};
use crate::{Error, Result};

const MIN_INNER_TOL: f64 = 1e-14;
const MAX_INNER_TOL: f64 = 1e-3;

/// Inverse power method: `u^{j+1}` is the normalized minimizer of
/// `R(u) - ∇S(u^j) u`, warm-started from `u^j / Λ^j`.
///
/// Stops once the relative change of `Λ = R/S` is at most `power_tol` and
/// the Euler–Lagrange residual is at most `10 power_tol`. Hitting
/// `power_max_iters` returns the last iterate with `converged = false`.
pub fn inverse_power(f: &Functionals, u0: &ScalarField, cfg: &SolverConfig) -> Result<EigenpairResult> {
    cfg.validate()?;
    if !Arc::ptr_eq(u0.space(), f.space()) {
        return Err(Error::InvalidArgument("field belongs to a different space".into()));
    }
    let k0 = f.norm_of(u0.coeffs())?;
    if k0 == 0.0 {
        return Err(Error::ZeroField);
    }
    let mut x: Vec<f64> = u0.coeffs().iter().map(|v| v / k0).collect();
    let quotient = |x: &[f64]| -> Result<(f64, f64)> {
        let big_k = f.grad_norm_of(x)?;
        let k = f.norm_of(x)?;
        if k == 0.0 || big_k == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok((big_k * big_k / (k * k), k))
    };
    let (mut lambda, k) = quotient(&x)?;
    let mut history = vec![lambda];
    let mut iterate_norms = vec![k];
    let mut inner_iterations = 0;
    let mut inner_failures = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut el_residual = f64::NAN;
    // Early inner solves only need to be about as accurate as the current
    // eigenvector (measured by the residual); if the residual stalls, the
    // inner tolerance is tightened below `inner_tol`.
    let mut prev_residual = f64::INFINITY;
    let mut tighten = 1.0;
    while iterations < cfg.power_max_iters {
        iterations += 1;
        let b = f.grad_s_raw(&x)?;
        let init: Vec<f64> = x.iter().map(|v| v / lambda).collect();
        let floor = (cfg.inner_tol * tighten).max(MIN_INNER_TOL);
        let rel_tol = floor.max((0.01 * prev_residual).min(MAX_INNER_TOL));
        let out = minimize(f, &b, init, rel_tol, cfg)?;
        inner_iterations += out.iterations;
        if !out.converged {
            inner_failures += 1;
        }
        let k = f.norm_of(&out.x)?;
        if k == 0.0 {
            return Err(Error::ZeroField);
        }
        x = out.x.iter().map(|v| v / k).collect();
        let (next, k) = quotient(&x)?;
        iterate_norms.push(k);
        history.push(next);
        let change = (next - lambda).abs() / next;
        lambda = next;
        el_residual = f.el_residual(&ScalarField::new(f.space().clone(), x.clone())?, lambda.sqrt())?;
        debug!(
            "power step {iterations}: Λ = {lambda:.15e}, change {change:.3e}, residual {el_residual:.3e}, \
             inner {} ({} evaluations, tol {rel_tol:.1e})",
            out.iterations, out.evaluations
        );
        if change <= cfg.power_tol && el_residual <= 10.0 * cfg.power_tol {
            converged = true;
            break;
        }
        if el_residual > 0.5 * prev_residual {
            tighten *= 0.1;
        }
        prev_residual = el_residual;
    }
    if ScalarField::new(f.space().clone(), x.clone())?.integral() < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    let u = ScalarField::new(f.space().clone(), x)?;
    let consts = f.el_constants(&u)?;
    let lambda1 = consts.grad_norm / consts.norm;
    if !converged {
        warn!("inverse power stopped after {iterations} steps: Λ = {lambda:.12e}, residual {el_residual:.3e}");
    } else {
        info!("inverse power converged in {iterations} steps: λ₁ = {lambda1:.12e}");
    }
    Ok(EigenpairResult {
        lambda1,
        big_lambda1: lambda1 * lambda1,
        u,
        grad_norm: consts.grad_norm,
        norm: consts.norm,
        s_const: consts.s_const,
        history,
        iterate_norms,
        el_residual,
        iterations,
        inner_iterations,
        inner_failures,
        converged,
        continuation: Vec::new(),
    })
}
