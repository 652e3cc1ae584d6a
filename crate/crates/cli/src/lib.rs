//! Configuration-driven front end for `pxlap`: eigenvalue solves with CSV /
//! VTK output, convergence studies, amplitude scans of the nonhomogeneous
//! quotient and qualitative diagnostics of the eigenfunction.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod expr;
pub mod output;
pub mod run;

use std::path::PathBuf;

pub use config::{RunConfig, ScanConfig};
pub use diagnostics::{run_diagnostics, DiagnosticReport};
pub use expr::Expr;
pub use run::{convergence_study, run_convergence_study, run_scan, run_solve, solve, StudyReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("exponent '{source_text}', at byte {position}: {message}")]
    Expression { source_text: String, position: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Solver(#[from] pxlap::Error),
    #[error("diagnostics need a converged eigenpair")]
    NotConverged,
    #[error("{0}")]
    Data(String),
}
