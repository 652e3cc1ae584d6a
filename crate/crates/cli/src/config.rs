//! Flat `key = value` run configuration.
//!
//! ```text
//! # unit square, oscillating exponent
//! domain = rectangle 0 1 0 1
//! exponent = 5 + 3 sin(3 pi x)
//! order = 2
//! h = 0.05
//! power_tol = 1e-8
//! ```
//!
//! Blank lines and `#` comments are ignored. Later assignments override
//! earlier ones, so command-line overrides are applied with [`RunConfig::set`].

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pxlap::eigensolver::SolverConfig;
use pxlap::luxemburg::ExponentField;
use pxlap::mesh::{DomainSpec, ElementOrder};

use crate::expr::Expr;
use crate::CliError;

/// Samples per axis used to check `p > 1` before anything is meshed.
const EXPONENT_SAMPLES: usize = 401;

/// Amplitude scan of the nonhomogeneous quotient on a 1D domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub center: f64,
    pub plateau: f64,
    pub radius: f64,
    pub t_max: f64,
    pub t_min: f64,
    pub per_decade: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { center: 0.0, plateau: 0.3, radius: 0.9, t_max: 1.0, t_min: 1e-6, per_decade: 2 }
    }
}

impl ScanConfig {
    /// Log-spaced amplitudes from `t_max` down to `t_min`, both included.
    pub fn amplitudes(&self) -> Vec<f64> {
        let decades = (self.t_max / self.t_min).log10();
        let n = ((decades * self.per_decade as f64).round() as usize).max(1);
        (0..=n).map(|i| self.t_max * (self.t_min / self.t_max).powf(i as f64 / n as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub exponent: Expr,
    pub h: f64,
    pub order: ElementOrder,
    pub solver: SolverConfig,
    pub out_dir: PathBuf,
    /// run the symmetry / log-concavity diagnostics after a solve
    pub diagnostics: bool,
    /// refinement levels of a convergence study
    pub levels: usize,
    pub scan: ScanConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            domain: DomainSpec::unit_square(),
            exponent: Expr::parse("2").expect("literal"),
            h: 0.05,
            order: ElementOrder::P2,
            solver: SolverConfig::default(),
            out_dir: PathBuf::from("out"),
            diagnostics: true,
            levels: 4,
            scan: ScanConfig::default(),
        }
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::Config(format!("{key}: expected a number, got '{value}'")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value.trim().parse().map_err(|_| CliError::Config(format!("{key}: expected a count, got '{value}'")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true/false, got '{value}'"))),
    }
}

pub fn parse_domain(value: &str) -> Result<DomainSpec, CliError> {
    let words: Vec<&str> = value.split_whitespace().collect();
    let Some((&kind, args)) = words.split_first() else {
        return Err(CliError::Config("domain: empty".into()));
    };
    let nums = args.iter().map(|a| parse_f64("domain", a)).collect::<Result<Vec<_>, _>>()?;
    let spec = match (kind, nums.as_slice()) {
        ("unit_square" | "square", []) => DomainSpec::unit_square(),
        ("unit_disk" | "disk", []) => DomainSpec::unit_disk(),
        ("interval", &[a, b]) => DomainSpec::Interval { a, b },
        ("rectangle", &[x0, x1, y0, y1]) => DomainSpec::Rectangle { x0, x1, y0, y1 },
        ("disk", &[cx, cy, r]) => DomainSpec::Disk { cx, cy, r },
        ("annulus", &[cx, cy, r_in, r_out]) => DomainSpec::Annulus { cx, cy, r_in, r_out },
        _ => {
            return Err(CliError::Config(format!(
                "domain: expected 'interval a b', 'rectangle x0 x1 y0 y1', 'disk cx cy r', \
                 'annulus cx cy r_in r_out', 'unit_square' or 'unit_disk', got '{value}'"
            )))
        }
    };
    spec.validate().map_err(|e| CliError::Config(format!("domain: {e}")))?;
    Ok(spec)
}

pub fn domain_text(d: &DomainSpec) -> String {
    match *d {
        DomainSpec::Interval { a, b } => format!("interval {a} {b}"),
        DomainSpec::Rectangle { x0, x1, y0, y1 } => format!("rectangle {x0} {x1} {y0} {y1}"),
        DomainSpec::Disk { cx, cy, r } => format!("disk {cx} {cy} {r}"),
        DomainSpec::Annulus { cx, cy, r_in, r_out } => format!("annulus {cx} {cy} {r_in} {r_out}"),
    }
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            cfg.set_assignment(line).map_err(|e| CliError::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })?;
        Self::from_text(&text)
    }

    /// Applies one `key=value` override.
    pub fn set_assignment(&mut self, assignment: &str) -> Result<(), CliError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value, got '{assignment}'")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let s = &mut self.solver;
        match key {
            "domain" => self.domain = parse_domain(value)?,
            "exponent" | "p" => self.exponent = Expr::parse(value)?,
            "h" => self.h = parse_f64(key, value)?,
            "order" => {
                self.order = ElementOrder::from_degree(parse_usize(key, value)?)
                    .map_err(|e| CliError::Config(format!("order: {e}")))?
            }
            "out" => self.out_dir = PathBuf::from(value),
            "diagnostics" => self.diagnostics = parse_bool(key, value)?,
            "levels" => self.levels = parse_usize(key, value)?,
            "newton_tol" => s.newton_tol = parse_f64(key, value)?,
            "inner_tol" => s.inner_tol = parse_f64(key, value)?,
            "inner_max_iters" => s.inner_max_iters = parse_usize(key, value)?,
            "power_tol" => s.power_tol = parse_f64(key, value)?,
            "power_max_iters" => s.power_max_iters = parse_usize(key, value)?,
            "continuation_steps" => s.continuation_steps = parse_usize(key, value)?,
            "continuation_tol" => s.continuation_tol = parse_f64(key, value)?,
            "regularization_eps" => s.regularization_eps = parse_f64(key, value)?,
            "restart_period" => {
                s.restart_period = match value {
                    "auto" | "none" => None,
                    v => Some(parse_usize(key, v)?),
                }
            }
            "helmholtz_tol" => s.helmholtz_tol = parse_f64(key, value)?,
            "scan_center" => self.scan.center = parse_f64(key, value)?,
            "scan_plateau" => self.scan.plateau = parse_f64(key, value)?,
            "scan_radius" => self.scan.radius = parse_f64(key, value)?,
            "scan_t_max" => self.scan.t_max = parse_f64(key, value)?,
            "scan_t_min" => self.scan.t_min = parse_f64(key, value)?,
            "scan_per_decade" => self.scan.per_decade = parse_usize(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Checks everything that does not need a mesh, including `p > 1` on a
    /// dense sample of the domain, and returns the exponent field.
    pub fn validate(&self) -> Result<ExponentField, CliError> {
        if !(self.h > 0.0) {
            return Err(CliError::Config(format!("h must be positive, got {}", self.h)));
        }
        self.solver.validate()?;
        if self.levels < 3 {
            return Err(CliError::Config(format!("levels must be at least 3, got {}", self.levels)));
        }
        let sc = &self.scan;
        if !(sc.t_max > sc.t_min && sc.t_min > 0.0 && sc.per_decade > 0) {
            return Err(CliError::Config("scan needs t_max > t_min > 0 and scan_per_decade > 0".into()));
        }
        self.exponent_field()
    }

    pub fn exponent_field(&self) -> Result<ExponentField, CliError> {
        if let Some(p) = self.exponent.constant_value() {
            return ExponentField::constant(p).map_err(CliError::from);
        }
        let expr = self.exponent.clone();
        ExponentField::with_estimated_bounds(move |x| expr.eval(x[0], x[1]), &self.domain, EXPONENT_SAMPLES)
            .map_err(CliError::from)
    }

    /// Canonical text form; [`RunConfig::from_text`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let s = &self.solver;
        let mut out = String::new();
        let mut put = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        put("domain", domain_text(&self.domain));
        put("exponent", self.exponent.text().to_string());
        put("order", self.order.degree().to_string());
        put("h", self.h.to_string());
        put("out", self.out_dir.display().to_string());
        put("diagnostics", self.diagnostics.to_string());
        put("levels", self.levels.to_string());
        put("newton_tol", s.newton_tol.to_string());
        put("inner_tol", s.inner_tol.to_string());
        put("inner_max_iters", s.inner_max_iters.to_string());
        put("power_tol", s.power_tol.to_string());
        put("power_max_iters", s.power_max_iters.to_string());
        put("continuation_steps", s.continuation_steps.to_string());
        put("continuation_tol", s.continuation_tol.to_string());
        put("regularization_eps", s.regularization_eps.to_string());
        put("restart_period", s.restart_period.map_or("auto".into(), |v| v.to_string()));
        put("helmholtz_tol", s.helmholtz_tol.to_string());
        put("scan_center", self.scan.center.to_string());
        put("scan_plateau", self.scan.plateau.to_string());
        put("scan_radius", self.scan.radius.to_string());
        put("scan_t_max", self.scan.t_max.to_string());
        put("scan_t_min", self.scan.t_min.to_string());
        put("scan_per_decade", self.scan.per_decade.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let cfg = RunConfig::from_text(
            "# comment\ndomain = disk 0 0 1\nexponent = 11 + 9 sin(2 pi x)  # disk case\norder=1\nh = 0.1\n\npower_tol = 1e-9\n",
        )
        .unwrap();
        assert_eq!(cfg.domain, DomainSpec::unit_disk());
        assert_eq!(cfg.order, ElementOrder::P1);
        assert_eq!(cfg.h, 0.1);
        assert_eq!(cfg.solver.power_tol, 1e-9);
        assert_eq!(cfg.exponent.text(), "11 + 9 sin(2 pi x)");
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.set("domain", "annulus 0 0 0.25 1").unwrap();
        cfg.set("exponent", "4+2sin(2pi x)").unwrap();
        cfg.set("restart_period", "50").unwrap();
        cfg.set("h", "0.03").unwrap();
        assert_eq!(RunConfig::from_text(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(RunConfig::from_text(&RunConfig::default().to_text()).unwrap(), RunConfig::default());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RunConfig::from_text("nonsense").is_err());
        assert!(RunConfig::from_text("colour = red").is_err());
        assert!(RunConfig::from_text("h = fast").is_err());
        assert!(RunConfig::from_text("order = 3").is_err());
        assert!(RunConfig::from_text("domain = disk 0 0 -1").is_err());
        assert!(RunConfig::from_text("domain = triangle").is_err());
        assert!(RunConfig::from_text("exponent = 2 +").is_err());
    }

    #[test]
    fn exponent_must_exceed_one() {
        let mut cfg = RunConfig::default();
        cfg.set("exponent", "2 - x").unwrap();
        assert!(cfg.validate().is_err());
        cfg.set("exponent", "1").unwrap();
        assert!(cfg.validate().is_err());
        cfg.set("exponent", "2 - 0.99 x").unwrap();
        assert!(cfg.validate().is_ok());
        cfg.set("levels", "2").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn amplitude_grid() {
        let t = ScanConfig::default().amplitudes();
        assert_eq!(t.len(), 13);
        assert_eq!(t[0], 1.0);
        assert!((t[12] - 1e-6).abs() < 1e-20);
        assert!(t.windows(2).all(|w| w[1] < w[0]));
    }
}
