//! First eigenpair of the variable-exponent Laplacian: a Helmholtz start,
//! the inverse power method with a nonlinear CG inner solver, and a
//! continuation in the exponent from `p ≡ 2`.

mod continuation;
mod helmholtz;
mod nlcg;
mod power;

pub use continuation::continuation_solve;
pub use helmholtz::helmholtz_first_eigenpair;
pub use nlcg::{inner_minimize, InnerOutcome};
pub use power::inverse_power;

use crate::assembly::ScalarField;
use crate::{Error, Result};

/// Tolerances and iteration caps.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// tolerance on `|modular - 1|` in every norm evaluation
    pub newton_tol: f64,
    /// inner stop: `‖∇J‖ ≤ inner_tol ‖∇S(u_prev)‖` (Euclidean, free dofs)
    pub inner_tol: f64,
    pub inner_max_iters: usize,
    /// outer stop on the relative change of the quotient
    pub power_tol: f64,
    pub power_max_iters: usize,
    /// number of homotopy steps from `p ≡ 2`
    pub continuation_steps: usize,
    /// `power_tol` used for the intermediate homotopy steps, which only
    /// provide a starting point for the next step
    pub continuation_tol: f64,
    /// `0` disables regularization of the gradient modular
    pub regularization_eps: f64,
    /// CG restart period; `None` means the number of unknowns
    pub restart_period: Option<usize>,
    /// eigen-residual tolerance of the linear start
    pub helmholtz_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            newton_tol: 1e-12,
            inner_tol: 1e-8,
            inner_max_iters: 2000,
            power_tol: 1e-8,
            power_max_iters: 200,
            continuation_steps: 10,
            continuation_tol: 1e-5,
            regularization_eps: 0.0,
            restart_period: None,
            helmholtz_tol: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("inner_tol", self.inner_tol),
            ("power_tol", self.power_tol),
            ("continuation_tol", self.continuation_tol),
            ("helmholtz_tol", self.helmholtz_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} = {v}")));
            }
        }
        if !(self.regularization_eps >= 0.0 && self.regularization_eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("regularization_eps = {}", self.regularization_eps)));
        }
        if self.inner_max_iters == 0 || self.power_max_iters == 0 || self.continuation_steps == 0 {
            return Err(Error::InvalidArgument("iteration counts must be positive".into()));
        }
        if self.restart_period == Some(0) {
            return Err(Error::InvalidArgument("restart_period = 0".into()));
        }
        Ok(())
    }
}

/// Outcome of an eigenvalue solve.
#[derive(Debug, Clone)]
pub struct EigenpairResult {
    /// `λ₁ = ‖∇u‖ / ‖u‖`
    pub lambda1: f64,
    /// `Λ₁ = λ₁²`
    pub big_lambda1: f64,
    /// unit-norm, nonnegative-mean eigenfunction
    pub u: ScalarField,
    pub grad_norm: f64,
    pub norm: f64,
    /// ratio of the two modular integrals in the Euler–Lagrange equation
    pub s_const: f64,
    /// quotient after each outer iteration (entry 0 is the start)
    pub history: Vec<f64>,
    /// `‖u^j‖` of every outer iterate
    pub iterate_norms: Vec<f64>,
    pub el_residual: f64,
    pub iterations: usize,
    pub inner_iterations: usize,
    /// outer iterations whose inner solve hit its cap
    pub inner_failures: usize,
    pub converged: bool,
    /// `(t, λ₁)` after each homotopy step
    pub continuation: Vec<(f64, f64)>,
}
