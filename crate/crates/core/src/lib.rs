//! # pxlap
//!
//! Finite-element computation of the first eigenpair of the variable-exponent
//! p(x)-Laplacian, where the Rayleigh quotient is built from Luxemburg norms:
//!
//! ```text
//! λ₁ = inf ‖∇u‖_{p(x)} / ‖u‖_{p(x)},   ‖f‖_{p(x)} = inf { γ > 0 : ∫ |f/γ|^{p(x)} / p(x) ≤ 1 }
//! ```
//!
//! The squared quotient `Λ₁ = λ₁²` is minimized by an inverse power iteration
//! whose inner problem is solved with a Fletcher–Reeves nonlinear conjugate
//! gradient method. The solve starts from the Laplacian (p ≡ 2) eigenfunction
//! and follows a homotopy in the exponent.
//!
//! Modules:
//!
//! * [`mesh`] -- interval / rectangle / disk / annulus meshes, P1 and P2
//!   Lagrange elements, quadrature.
//! * [`luxemburg`] -- the Luxemburg norm of sampled fields and its first
//!   variation.
//! * [`assembly`] -- the discrete functionals `R(u) = ‖∇u‖²`, `S(u) = ‖u‖²`,
//!   `J`, their gradients and the Euler–Lagrange residual.
//! * [`eigensolver`] -- Helmholtz initialization, inner NLCG, inverse power
//!   iteration and continuation in the exponent.
//! * [`comparison`] -- the nonhomogeneous quotients and the amplitude scans
//!   that show their infimum collapsing.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod comparison;
pub mod eigensolver;
mod error;
pub mod luxemburg;
pub mod mesh;

pub use error::{Error, Result};
