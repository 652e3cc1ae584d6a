//! Solve, convergence-study and scan drivers.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::info;
use pxlap::assembly::{FeSpace, Functionals, ScalarField};
use pxlap::comparison::{collapse_scan, Bump, QuotientScan};
use pxlap::eigensolver::{continuation_solve, inverse_power, EigenpairResult};
use pxlap::luxemburg::ExponentField;
use pxlap::mesh::{generate_mesh, refine, shape_functions, Mesh};

use crate::config::RunConfig;
use crate::diagnostics::{run_diagnostics, DiagnosticReport};
use crate::output::{eigenfunction_csv, summary_text, write_eigenfunction_vtk, write_file};
use crate::CliError;

pub const CONFIG_FILE: &str = "config.txt";
pub const EIGENFUNCTION_CSV: &str = "eigenfunction.csv";
pub const EIGENFUNCTION_VTK: &str = "eigenfunction.vtk";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.txt";
pub const STUDY_CSV: &str = "study.csv";
pub const SCAN_CSV: &str = "scan.csv";

/// Validates the configuration (exponent first) and builds the space.
pub fn build_problem(cfg: &RunConfig) -> Result<(Arc<FeSpace>, ExponentField), CliError> {
    let p = cfg.validate()?;
    let mesh = generate_mesh(cfg.domain, cfg.h, cfg.order)?;
    Ok((Arc::new(FeSpace::new(Arc::new(mesh))), p))
}

/// Continuation solve without writing anything.
pub fn solve(cfg: &RunConfig) -> Result<(Arc<FeSpace>, EigenpairResult), CliError> {
    let (space, p) = build_problem(cfg)?;
    info!("{} cells, {} unknowns", space.mesh().n_cells(), space.n_free());
    let result = continuation_solve(&space, &p, &cfg.solver)?;
    Ok((space, result))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })
}

#[derive(Debug)]
pub struct SolveOutcome {
    pub space: Arc<FeSpace>,
    pub result: EigenpairResult,
    pub summary: String,
    pub diagnostics: Option<DiagnosticReport>,
    pub files: Vec<PathBuf>,
}

/// Solves and writes the config echo, eigenfunction CSV and VTK, summary
/// and (if enabled) the diagnostics into `cfg.out_dir`.
pub fn run_solve(cfg: &RunConfig) -> Result<SolveOutcome, CliError> {
    let (space, result) = solve(cfg)?;
    let dir = &cfg.out_dir;
    ensure_dir(dir)?;
    let mut files = Vec::new();
    let mut put = |name: &str, text: &str| -> Result<(), CliError> {
        let path = dir.join(name);
        write_file(&path, text)?;
        files.push(path);
        Ok(())
    };
    put(CONFIG_FILE, &cfg.to_text())?;
    put(EIGENFUNCTION_CSV, &eigenfunction_csv(&result.u))?;
    let summary = summary_text(cfg, &space, &result);
    put(SUMMARY_FILE, &summary)?;
    let diagnostics = if cfg.diagnostics {
        let report = run_diagnostics(&result)?;
        put(DIAGNOSTICS_FILE, &report.to_text())?;
        Some(report)
    } else {
        None
    };
    let vtk = dir.join(EIGENFUNCTION_VTK);
    write_eigenfunction_vtk(&vtk, &result.u, &format!("first eigenfunction, p = {}", cfg.exponent))?;
    files.push(vtk);
    Ok(SolveOutcome { space, result, summary, diagnostics, files })
}

/// Interpolates a field onto the uniform refinement of its mesh, using the
/// parent-child numbering of [`refine`].
pub fn prolong(coarse: &ScalarField, fine: &Arc<FeSpace>) -> Result<ScalarField, CliError> {
    let cm: &Mesh = coarse.space().mesh();
    let fm: &Mesh = fine.mesh();
    let children = if cm.dim() == 1 { 2 } else { 4 };
    if fm.n_cells() != children * cm.n_cells() || fm.order() != cm.order() {
        return Err(CliError::Data("fine space is not the uniform refinement of the coarse one".into()));
    }
    let values = coarse.nodal_values();
    let mut full = vec![0.0; fm.n_dofs()];
    for f in 0..fm.n_cells() {
        let e = f / children;
        for &d in fm.cell_dofs(f) {
            let xi = cm.map_to_reference(e, fm.dof_coords()[d]);
            let (phi, _) = shape_functions(cm.dim(), cm.order(), xi);
            full[d] = cm.cell_dofs(e).iter().zip(&phi).map(|(&c, w)| values[c] * w).sum();
        }
    }
    Ok(ScalarField::new(fine.clone(), fine.restrict(&full))?)
}

fn l2_norm(u: &ScalarField) -> f64 {
    let s = u.space();
    let v = s.values_at_points(u.coeffs());
    v.iter().zip(s.weights()).map(|(a, w)| w * a * a).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyLevel {
    pub level: usize,
    /// nominal mesh size (halved per level)
    pub h: f64,
    pub n_free: usize,
    pub lambda1: f64,
    pub el_residual: f64,
    /// `|λ_l - λ_{l-1}|`
    pub lambda_diff: Option<f64>,
    /// `log₂` of the ratio of successive `lambda_diff`
    pub lambda_order: Option<f64>,
    /// `‖u_l - P u_{l-1}‖_{L²}` with `P` the prolongation
    pub u_diff: Option<f64>,
    pub u_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub levels: Vec<StudyLevel>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:.16e}"))
}

impl StudyReport {
    /// Order estimated from the three finest levels.
    pub fn final_order(&self) -> Option<f64> {
        self.levels.last().and_then(|l| l.lambda_order)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,h,n_free,lambda1,el_residual,lambda_diff,lambda_order,u_diff,u_order\n");
        for l in &self.levels {
            writeln!(
                out,
                "{},{},{},{:.16e},{:.16e},{},{},{},{}",
                l.level,
                l.h,
                l.n_free,
                l.lambda1,
                l.el_residual,
                fmt_opt(l.lambda_diff),
                fmt_opt(l.lambda_order),
                fmt_opt(l.u_diff),
                fmt_opt(l.u_order)
            )
            .unwrap();
        }
        out
    }
}

/// Solves on `levels` uniformly refined meshes, starting at `cfg.h`. Each
/// level after the first is warm-started from the prolongated eigenfunction
/// of the previous one (for `p ≡ 2` the linear start is exact and used
/// instead). Orders are `log₂` ratios of successive differences.
pub fn convergence_study(cfg: &RunConfig, levels: usize) -> Result<StudyReport, CliError> {
    if levels < 3 {
        return Err(CliError::Config(format!("a convergence study needs at least 3 levels, got {levels}")));
    }
    let (mut space, p) = build_problem(cfg)?;
    let linear = p.constant_value() == Some(2.0);
    let mut rows: Vec<StudyLevel> = Vec::with_capacity(levels);
    let mut prev: Option<EigenpairResult> = None;
    for level in 0..levels {
        if level > 0 {
            let mesh = refine(space.mesh())?;
            space = Arc::new(FeSpace::new(Arc::new(mesh)));
        }
        let result = match &prev {
            Some(coarse) if !linear => {
                let f = Functionals::new(space.clone(), &p, cfg.solver.newton_tol, cfg.solver.regularization_eps)?;
                let r = inverse_power(&f, &prolong(&coarse.u, &space)?, &cfg.solver)?;
                if !r.converged {
                    return Err(CliError::Solver(pxlap::Error::NotConverged {
                        iterations: r.iterations,
                        residual: r.el_residual,
                    }));
                }
                r
            }
            _ => continuation_solve(&space, &p, &cfg.solver)?,
        };
        let h = cfg.h / f64::powi(2.0, level as i32);
        info!("level {level}: h = {h}, {} unknowns, λ₁ = {:.12e}", space.n_free(), result.lambda1);
        let (lambda_diff, u_diff) = match &prev {
            Some(c) => {
                let pu = prolong(&c.u, &space)?;
                let d: Vec<f64> = result.u.coeffs().iter().zip(pu.coeffs()).map(|(a, b)| a - b).collect();
                let du = l2_norm(&ScalarField::new(space.clone(), d)?);
                (Some((result.lambda1 - c.lambda1).abs()), Some(du))
            }
            None => (None, None),
        };
        let order = |cur: Option<f64>, get: fn(&StudyLevel) -> Option<f64>| {
            let before = rows.last().and_then(get)?;
            Some((before / cur?).log2())
        };
        let row = StudyLevel {
            level,
            h,
            n_free: space.n_free(),
            lambda1: result.lambda1,
            el_residual: result.el_residual,
            lambda_diff,
            lambda_order: order(lambda_diff, |l| l.lambda_diff),
            u_diff,
            u_order: order(u_diff, |l| l.u_diff),
        };
        rows.push(row);
        prev = Some(result);
    }
    Ok(StudyReport { levels: rows })
}

/// [`convergence_study`] plus `study.csv` in the output directory.
pub fn run_convergence_study(cfg: &RunConfig, levels: usize) -> Result<StudyReport, CliError> {
    let report = convergence_study(cfg, levels)?;
    ensure_dir(&cfg.out_dir)?;
    write_file(&cfg.out_dir.join(CONFIG_FILE), &cfg.to_text())?;
    write_file(&cfg.out_dir.join(STUDY_CSV), &report.to_csv())?;
    Ok(report)
}

/// Amplitude scan of a bump on a 1D domain; writes `scan.csv`.
pub fn run_scan(cfg: &RunConfig) -> Result<QuotientScan, CliError> {
    let (space, p) = build_problem(cfg)?;
    let sc = &cfg.scan;
    let bump = Bump::new(sc.center, sc.plateau, sc.radius)?;
    let scan = collapse_scan(&space, &p, &bump, &sc.amplitudes())?;
    ensure_dir(&cfg.out_dir)?;
    write_file(&cfg.out_dir.join(CONFIG_FILE), &cfg.to_text())?;
    write_file(&cfg.out_dir.join(SCAN_CSV), &scan.to_csv())?;
    Ok(scan)
}
