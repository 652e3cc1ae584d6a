use log::{debug, warn};

use super::SolverConfig;
use crate::assembly::{dot, Functionals, ScalarField};
use crate::{Error, Result};

/// Result of one inner minimization.
#[derive(Debug, Clone)]
pub struct InnerOutcome {
    pub u: ScalarField,
    pub iterations: usize,
    pub converged: bool,
    /// Euclidean norm of `∇J` at `u`
    pub grad_norm: f64,
    pub j_value: f64,
}

pub(crate) struct RawOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub j_value: f64,
    pub evaluations: usize,
}

const ARMIJO: f64 = 1e-4;
/// Relative size of the roundoff in `J` (the norm evaluations are accurate
/// to about `newton_tol`); differences below it are not meaningful.
const NOISE: f64 = 1e-10;
/// a trial step whose slope has dropped to this fraction is taken as is
const WOLFE: f64 = 0.1;
const MAX_BACKTRACKS: usize = 60;

/// Minimizes `J(u) = R(u) - ∇S(u_prev) u` from `u_init` by Fletcher–Reeves
/// nonlinear CG. Never returns a point whose `J` exceeds `J(u_init)` by more
/// than the evaluation roundoff (`1e-10 |J|`).
pub fn inner_minimize(
    f: &Functionals,
    u_prev: &ScalarField,
    cfg: &SolverConfig,
    u_init: &ScalarField,
) -> Result<InnerOutcome> {
    cfg.validate()?;
    let b = f.grad_s(u_prev)?.into_values();
    if !std::sync::Arc::ptr_eq(u_init.space(), f.space()) {
        return Err(Error::InvalidArgument("field belongs to a different space".into()));
    }
    let out = minimize(f, &b, u_init.coeffs().to_vec(), cfg.inner_tol, cfg)?;
    Ok(InnerOutcome {
        u: ScalarField::new(f.space().clone(), out.x)?,
        iterations: out.iterations,
        converged: out.converged,
        grad_norm: out.grad_norm,
        j_value: out.j_value,
    })
}

struct Objective<'a> {
    f: &'a Functionals,
    b: &'a [f64],
    evaluations: std::cell::Cell<usize>,
}

impl Objective<'_> {
    fn eval(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.evaluations.set(self.evaluations.get() + 1);
        let (r, mut g) = self.f.r_and_grad_raw(x)?;
        let j = r - dot(self.b, x);
        for (gi, bi) in g.iter_mut().zip(self.b) {
            *gi -= bi;
        }
        if !j.is_finite() || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("inner objective"));
        }
        Ok((j, g))
    }
}

fn axpy(x: &[f64], alpha: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(x, d)| x + alpha * d).collect()
}

/// Minimizes `J` from `x0` with relative tolerance `rel_tol` on `‖∇J‖ / ‖b‖`.
pub(crate) fn minimize(f: &Functionals, b: &[f64], x0: Vec<f64>, rel_tol: f64, cfg: &SolverConfig) -> Result<RawOutcome> {
    let obj = Objective { f, b, evaluations: std::cell::Cell::new(0) };
    let n = x0.len();
    let restart = cfg.restart_period.unwrap_or(n).max(1);
    let tol = rel_tol * dot(b, b).sqrt();
    let (j_init, g_init) = obj.eval(&x0)?;
    let g_init_norm = dot(&g_init, &g_init).sqrt();
    let mut x = x0.clone();
    let (mut j, mut g) = (j_init, g_init);
    let mut gg = dot(&g, &g);
    let mut d: Vec<f64> = g.iter().map(|v| -v).collect();
    // previous step length times previous slope, for the next trial step
    let mut prev_step: Option<(f64, f64)> = None;
    let mut since_restart = 0usize;
    let mut iterations = 0;
    let mut converged = gg.sqrt() <= tol;
    while !converged && iterations < cfg.inner_max_iters {
        iterations += 1;
        let mut dphi0 = dot(&g, &d);
        if !(dphi0 < 0.0) {
            d = g.iter().map(|v| -v).collect();
            dphi0 = -gg;
            since_restart = 0;
        }
        let d_norm = dot(&d, &d).sqrt();
        let alpha_t = match prev_step {
            Some((alpha, slope)) => alpha * slope / dphi0,
            None => 0.01 * dot(&x, &x).sqrt().max(1e-3) / d_norm,
        };
        match line_search(&obj, &x, j, &d, dphi0, alpha_t)? {
            Some((alpha, x_new, j_new, g_new)) => {
                prev_step = Some((alpha, dphi0));
                x = x_new;
                j = j_new;
                let gg_new = dot(&g_new, &g_new);
                g = g_new;
                converged = gg_new.sqrt() <= tol;
                since_restart += 1;
                let beta = if since_restart >= restart {
                    since_restart = 0;
                    0.0
                } else {
                    gg_new / gg
                };
                gg = gg_new;
                for (di, gi) in d.iter_mut().zip(&g) {
                    *di = -gi + beta * *di;
                }
            }
            None if since_restart == 0 => {
                // no progress even along steepest descent: roundoff floor
                debug!("inner line search stalled at |g| = {:.3e} (tol {:.3e})", gg.sqrt(), tol);
                break;
            }
            None => {
                d = g.iter().map(|v| -v).collect();
                since_restart = 0;
                prev_step = None;
            }
        }
    }
    if !converged {
        warn!("inner minimization stopped after {iterations} iterations, |g| = {:.3e}, tol {:.3e}", gg.sqrt(), tol);
    }
    if j > j_init + NOISE * j_init.abs() {
        return Ok(RawOutcome { x: x0, iterations, converged: g_init_norm <= tol, grad_norm: g_init_norm, j_value: j_init, evaluations: obj.evaluations.get() });
    }
    Ok(RawOutcome { x, iterations, converged, grad_norm: gg.sqrt(), j_value: j, evaluations: obj.evaluations.get() })
}

type Step = (f64, Vec<f64>, f64, Vec<f64>);

/// Secant step on the directional derivative followed by Armijo
/// backtracking. Also accepts the derivative form of the Armijo test, which
/// stays reliable once `J` differences drop to roundoff.
fn line_search(obj: &Objective, x: &[f64], phi0: f64, d: &[f64], dphi0: f64, alpha_t: f64) -> Result<Option<Step>> {
    let noise = NOISE * phi0.abs();
    let accept = |alpha: f64, j: f64, g: &[f64]| {
        let dphi = dot(g, d);
        j <= phi0 + ARMIJO * alpha * dphi0 || (dphi <= (2.0 * ARMIJO - 1.0) * dphi0 && j <= phi0 + noise)
    };
    let x_t = axpy(x, alpha_t, d);
    let (j_t, g_t) = obj.eval(&x_t)?;
    let dphi_t = dot(&g_t, d);
    let trial_ok = accept(alpha_t, j_t, &g_t);
    let alpha_s = if dphi_t > dphi0 {
        (alpha_t * dphi0 / (dphi0 - dphi_t)).min(100.0 * alpha_t)
    } else {
        4.0 * alpha_t
    };
    if trial_ok && dphi_t.abs() <= WOLFE * dphi0.abs() {
        return Ok(Some((alpha_t, x_t, j_t, g_t)));
    }
    let mut alpha = alpha_s;
    for k in 0..MAX_BACKTRACKS {
        let x_a = axpy(x, alpha, d);
        let (j_a, g_a) = obj.eval(&x_a)?;
        let ok = accept(alpha, j_a, &g_a);
        if trial_ok && (!ok || j_t < j_a) {
            return Ok(Some((alpha_t, x_t, j_t, g_t)));
        }
        if ok {
            return Ok(Some((alpha, x_a, j_a, g_a)));
        }
        if k == 0 && alpha > alpha_t {
            alpha = alpha_t;
        }
        alpha *= 0.5;
    }
    Ok(None)
}
