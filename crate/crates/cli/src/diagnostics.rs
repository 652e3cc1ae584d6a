//! Symmetry and log-concavity checks on a computed eigenfunction.

use std::collections::HashMap;
use std::fmt::Write as _;

use pxlap::assembly::ScalarField;
use pxlap::eigensolver::EigenpairResult;
use pxlap::mesh::{shape_functions, Mesh};

use crate::CliError;

/// Nodes with `u` below this fraction of `max u` are skipped by the
/// log-concavity scan.
pub const LOG_FLOOR: f64 = 1e-8;

/// Thresholds used when the report states pass / fail. They are calibrated
/// to the default resolutions, not derived.
pub const CENTER_SYMMETRY_THRESHOLD: f64 = 5e-2;
pub const REFLECTION_BREAK_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct LogConcavity {
    /// interior triples that were tested
    pub checked: usize,
    /// how many second differences of `log u` are positive
    pub positive: usize,
    /// largest second difference (divided, so it approximates `(log u)''`)
    pub max_second_difference: f64,
    /// where the largest one sits
    pub argmax: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticReport {
    /// `max |u(x) - u(2c - x)| / max u` over the dofs
    pub center_symmetry: f64,
    /// `max |u(x, y) - u(2 c_x - x, y)| / max u` over the dofs
    pub x_reflection: f64,
    /// 1D only
    pub log_concavity: Option<LogConcavity>,
}

impl DiagnosticReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "center_symmetry_defect = {:.16e}", self.center_symmetry).unwrap();
        writeln!(
            out,
            "center_symmetric = {}  # defect <= {CENTER_SYMMETRY_THRESHOLD:e}, calibrated threshold",
            self.center_symmetry <= CENTER_SYMMETRY_THRESHOLD
        )
        .unwrap();
        writeln!(out, "x_reflection_defect = {:.16e}", self.x_reflection).unwrap();
        writeln!(
            out,
            "x_reflection_broken = {}  # defect >= {REFLECTION_BREAK_THRESHOLD:e}, calibrated threshold",
            self.x_reflection >= REFLECTION_BREAK_THRESHOLD
        )
        .unwrap();
        if let Some(lc) = &self.log_concavity {
            writeln!(out, "log_second_differences_checked = {}", lc.checked).unwrap();
            writeln!(out, "log_second_differences_positive = {}", lc.positive).unwrap();
            writeln!(out, "log_second_difference_max = {:.16e}", lc.max_second_difference).unwrap();
            writeln!(out, "log_second_difference_argmax = {:.16e}", lc.argmax).unwrap();
            writeln!(out, "log_concave = {}", lc.positive == 0).unwrap();
        }
        out
    }
}

/// Evaluates a field at arbitrary points, bucketing cells on a uniform grid.
pub struct FieldProbe<'a> {
    mesh: &'a Mesh,
    values: Vec<f64>,
    origin: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl<'a> FieldProbe<'a> {
    pub fn new(u: &'a ScalarField) -> Self {
        let mesh: &Mesh = u.space().mesh();
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for x in mesh.nodes() {
            for k in 0..2 {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
        let cells = mesh.n_cells();
        let side = (cells as f64).powf(1.0 / mesh.dim() as f64).ceil().max(1.0);
        let cell = ((hi[0] - lo[0]).max(hi[1] - lo[1]) / side).max(f64::MIN_POSITIVE);
        let dims = [
            ((hi[0] - lo[0]) / cell).floor() as usize + 1,
            ((hi[1] - lo[1]) / cell).floor() as usize + 1,
        ];
        let mut probe = FieldProbe { mesh, values: u.nodal_values(), origin: lo, cell, dims, buckets: Vec::new() };
        probe.buckets = vec![Vec::new(); dims[0] * dims[1]];
        for e in 0..cells {
            let (mut a, mut b) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
            for &v in mesh.cell(e) {
                let x = mesh.nodes()[v];
                for k in 0..2 {
                    a[k] = a[k].min(x[k]);
                    b[k] = b[k].max(x[k]);
                }
            }
            let (i0, j0) = probe.bucket_of(a);
            let (i1, j1) = probe.bucket_of(b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    probe.buckets[j * dims[0] + i].push(e);
                }
            }
        }
        probe
    }

    fn bucket_of(&self, x: [f64; 2]) -> (usize, usize) {
        let idx = |k: usize| {
            let t = ((x[k] - self.origin[k]) / self.cell).floor();
            (t.max(0.0) as usize).min(self.dims[k] - 1)
        };
        (idx(0), idx(1))
    }

    /// How far outside the reference cell `xi` lies (`0` inside).
    fn outside(&self, xi: [f64; 2]) -> f64 {
        if self.mesh.dim() == 1 {
            (-xi[0]).max(xi[0] - 1.0).max(0.0)
        } else {
            (-xi[0]).max(-xi[1]).max(xi[0] + xi[1] - 1.0).max(0.0)
        }
    }

    /// Value at `x`. Points outside the mesh (a curved boundary cut by a
    /// chord) are extrapolated from the nearest cell in their bucket; `None`
    /// if the bucket is empty.
    pub fn eval(&self, x: [f64; 2]) -> Option<f64> {
        let (i, j) = self.bucket_of(x);
        let mut best: Option<(f64, usize, [f64; 2])> = None;
        for &e in &self.buckets[j * self.dims[0] + i] {
            let xi = self.mesh.map_to_reference(e, x);
            let d = self.outside(xi);
            if best.is_none_or(|b| d < b.0) {
                best = Some((d, e, xi));
            }
            if d == 0.0 {
                break;
            }
        }
        let (_, e, xi) = best?;
        let (phi, _) = shape_functions(self.mesh.dim(), self.mesh.order(), xi);
        Some(self.mesh.cell_dofs(e).iter().zip(&phi).map(|(&d, w)| self.values[d] * w).sum())
    }
}

fn quantize(x: [f64; 2], scale: f64) -> (i64, i64) {
    ((x[0] * scale).round() as i64, (x[1] * scale).round() as i64)
}

/// `max |u(x) - u(mirror(x))| / max |u|` over the dofs; mirrored dofs are
/// matched exactly when the mesh is symmetric, otherwise interpolated.
pub fn mirror_defect(u: &ScalarField, mirror: impl Fn([f64; 2]) -> [f64; 2]) -> f64 {
    let mesh = u.space().mesh();
    let values = u.nodal_values();
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0.0;
    }
    let scale = 1e9 / mesh.domain().diameter();
    let index: HashMap<(i64, i64), usize> =
        mesh.dof_coords().iter().enumerate().map(|(i, &x)| (quantize(x, scale), i)).collect();
    let mut probe: Option<FieldProbe> = None;
    let mut worst = 0.0f64;
    for (i, &x) in mesh.dof_coords().iter().enumerate() {
        let m = mirror(x);
        let other = match index.get(&quantize(m, scale)) {
            Some(&j) => values[j],
            None => match probe.get_or_insert_with(|| FieldProbe::new(u)).eval(m) {
                Some(v) => v,
                None => continue,
            },
        };
        worst = worst.max((values[i] - other).abs());
    }
    worst / peak
}

/// Second differences of `log u` over consecutive 1D dofs where `u` exceeds
/// `LOG_FLOOR · max u`.
pub fn log_concavity(u: &ScalarField) -> Option<LogConcavity> {
    let mesh = u.space().mesh();
    if mesh.dim() != 1 {
        return None;
    }
    let values = u.nodal_values();
    let mut pts: Vec<(f64, f64)> = mesh.dof_coords().iter().map(|x| x[0]).zip(values).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let peak = pts.iter().fold(0.0f64, |m, p| m.max(p.1));
    let floor = LOG_FLOOR * peak;
    let mut report = LogConcavity { checked: 0, positive: 0, max_second_difference: f64::NEG_INFINITY, argmax: f64::NAN };
    for w in pts.windows(3) {
        let [(x0, u0), (x1, u1), (x2, u2)] = [w[0], w[1], w[2]];
        if u0 <= floor || u1 <= floor || u2 <= floor {
            continue;
        }
        let (l0, l1, l2) = (u0.ln(), u1.ln(), u2.ln());
        let d2 = 2.0 * ((l2 - l1) / (x2 - x1) - (l1 - l0) / (x1 - x0)) / (x2 - x0);
        report.checked += 1;
        if d2 > 0.0 {
            report.positive += 1;
        }
        if d2 > report.max_second_difference {
            report.max_second_difference = d2;
            report.argmax = x1;
        }
    }
    Some(report)
}

/// Symmetry defects about the domain center and, in 1D, the log-concavity
/// scan.
pub fn run_diagnostics(result: &EigenpairResult) -> Result<DiagnosticReport, CliError> {
    if !result.converged {
        return Err(CliError::NotConverged);
    }
    let u = &result.u;
    let c = u.space().mesh().domain().center();
    Ok(DiagnosticReport {
        center_symmetry: mirror_defect(u, |x| [2.0 * c[0] - x[0], 2.0 * c[1] - x[1]]),
        x_reflection: mirror_defect(u, |x| [2.0 * c[0] - x[0], x[1]]),
        log_concavity: log_concavity(u),
    })
}
