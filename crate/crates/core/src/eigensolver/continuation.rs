use std::sync::Arc;

use log::{info, warn};

use super::{helmholtz_first_eigenpair, inverse_power, EigenpairResult, SolverConfig};
use crate::assembly::{FeSpace, Functionals, ScalarField};
use crate::luxemburg::ExponentField;
use crate::{Error, Result};

fn solve_at(space: &Arc<FeSpace>, p: &ExponentField, t: f64, start: &ScalarField, cfg: &SolverConfig) -> Result<EigenpairResult> {
    let pt = p.homotopy(t)?;
    let f = Functionals::new(space.clone(), &pt, cfg.newton_tol, cfg.regularization_eps)?;
    inverse_power(&f, start, cfg)
}

/// First eigenpair for the exponent `p`, reached through
/// `p_t = 2 + t (p - 2)`, `t = 1/n, 2/n, …, 1`, each step warm-started from
/// the previous eigenfunction and the first from the Helmholtz
/// eigenfunction. Intermediate steps stop at `continuation_tol`, the last
/// one at `power_tol`. A step that fails to converge is retried once through the
/// midpoint of the step; a second failure aborts.
pub fn continuation_solve(space: &Arc<FeSpace>, p: &ExponentField, cfg: &SolverConfig) -> Result<EigenpairResult> {
    cfg.validate()?;
    if p.p_minus() < 2.0 {
        warn!("exponent drops below 2 (p⁻ = {}); this regime is experimental", p.p_minus());
    }
    let (mu, uh) = helmholtz_first_eigenpair(space, cfg.helmholtz_tol)?;
    info!("linear start: λ₁ = {}", mu.sqrt());
    if p.constant_value() == Some(2.0) {
        let mut res = solve_at(space, p, 1.0, &uh, cfg)?;
        if !res.converged {
            return Err(Error::Continuation { step: 1, t: 1.0, source: Box::new(not_converged(&res)) });
        }
        res.continuation = vec![(1.0, res.lambda1)];
        return Ok(res);
    }
    let n = cfg.continuation_steps;
    let mut trace = Vec::with_capacity(n);
    let mut current = uh;
    let mut t_prev = 0.0;
    let mut last = None;
    let relaxed = SolverConfig { power_tol: cfg.continuation_tol.max(cfg.power_tol), ..cfg.clone() };
    for step in 1..=n {
        let t = step as f64 / n as f64;
        let cfg = if step == n { cfg } else { &relaxed };
        let wrap = |e: Error| Error::Continuation { step, t, source: Box::new(e) };
        let mut res = solve_at(space, p, t, &current, cfg).map_err(wrap)?;
        if !res.converged {
            let t_mid = 0.5 * (t_prev + t);
            warn!("continuation step {step} (t = {t}) did not converge; retrying via t = {t_mid}");
            let mid = solve_at(space, p, t_mid, &current, cfg).map_err(wrap)?;
            if !mid.converged {
                return Err(wrap(not_converged(&mid)));
            }
            trace.push((t_mid, mid.lambda1));
            res = solve_at(space, p, t, &mid.u, cfg).map_err(wrap)?;
            if !res.converged {
                return Err(wrap(not_converged(&res)));
            }
        }
        info!("continuation t = {t:.3}: λ₁ = {:.12e} ({} outer steps)", res.lambda1, res.iterations);
        trace.push((t, res.lambda1));
        current = res.u.clone();
        t_prev = t;
        last = Some(res);
    }
    let mut res = last.expect("at least one continuation step");
    res.continuation = trace;
    Ok(res)
}

fn not_converged(res: &EigenpairResult) -> Error {
    Error::NotConverged { iterations: res.iterations, residual: res.el_residual }
}
