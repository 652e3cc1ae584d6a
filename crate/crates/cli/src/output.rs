//! Eigenfunction CSV, key=value summaries and VTK output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;

use pxlap::assembly::{FeSpace, ScalarField};
use pxlap::eigensolver::EigenpairResult;
use pxlap::mesh::write_vtk;

use crate::config::{domain_text, RunConfig};
use crate::CliError;

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), source: e })
}

/// One row per dof (boundary dofs included), 17 significant digits.
pub fn eigenfunction_csv(u: &ScalarField) -> String {
    let mesh = u.space().mesh();
    let values = u.nodal_values();
    let one_d = mesh.dim() == 1;
    let mut out = String::from(if one_d { "x,u\n" } else { "x,y,u\n" });
    for (x, v) in mesh.dof_coords().iter().zip(&values) {
        if one_d {
            writeln!(out, "{:.16e},{:.16e}", x[0], v).unwrap();
        } else {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", x[0], x[1], v).unwrap();
        }
    }
    out
}

/// Parses an eigenfunction CSV into dof coordinates and values.
pub fn parse_eigenfunction_csv(text: &str) -> Result<(Vec<[f64; 2]>, Vec<f64>), CliError> {
    let mut lines = text.lines();
    let cols = match lines.next().map(str::trim) {
        Some("x,u") => 2,
        Some("x,y,u") => 3,
        other => return Err(CliError::Data(format!("unexpected eigenfunction header {other:?}"))),
    };
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Data(format!("row {}: {e}", n + 2)))?;
        if row.len() != cols {
            return Err(CliError::Data(format!("row {}: expected {cols} columns", n + 2)));
        }
        coords.push(if cols == 2 { [row[0], 0.0] } else { [row[0], row[1]] });
        values.push(row[cols - 1]);
    }
    Ok((coords, values))
}

pub fn read_eigenfunction_csv(path: &Path) -> Result<(Vec<[f64; 2]>, Vec<f64>), CliError> {
    parse_eigenfunction_csv(&read_file(path)?)
}

/// Rebuilds a field from per-dof values, checking that the coordinates match
/// the dofs of `space`.
pub fn field_from_dof_values(space: &Arc<FeSpace>, coords: &[[f64; 2]], values: &[f64]) -> Result<ScalarField, CliError> {
    let mesh = space.mesh();
    if coords.len() != mesh.n_dofs() || values.len() != mesh.n_dofs() {
        return Err(CliError::Data(format!("{} rows for {} dofs", coords.len(), mesh.n_dofs())));
    }
    let scale = mesh.domain().diameter();
    for (i, (a, b)) in coords.iter().zip(mesh.dof_coords()).enumerate() {
        if (a[0] - b[0]).abs().max((a[1] - b[1]).abs()) > 1e-12 * scale {
            return Err(CliError::Data(format!("dof {i} at {a:?} does not match the mesh ({b:?})")));
        }
    }
    Ok(ScalarField::new(space.clone(), space.restrict(values))?)
}

/// The solve summary as ordered `key = value` lines.
pub fn summary_text(cfg: &RunConfig, space: &FeSpace, r: &EigenpairResult) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
    put("domain", domain_text(&cfg.domain));
    put("exponent", cfg.exponent.text().to_string());
    put("order", cfg.order.degree().to_string());
    put("h", cfg.h.to_string());
    put("n_cells", space.mesh().n_cells().to_string());
    put("n_free", space.n_free().to_string());
    put("lambda1", format!("{:.16e}", r.lambda1));
    put("big_lambda1", format!("{:.16e}", r.big_lambda1));
    put("grad_norm", format!("{:.16e}", r.grad_norm));
    put("norm", format!("{:.16e}", r.norm));
    put("s_const", format!("{:.16e}", r.s_const));
    put("el_residual", format!("{:.16e}", r.el_residual));
    put("converged", r.converged.to_string());
    put("iterations", r.iterations.to_string());
    put("inner_iterations", r.inner_iterations.to_string());
    put("inner_failures", r.inner_failures.to_string());
    let trace: Vec<String> = r.continuation.iter().map(|(t, l)| format!("{t}:{l:.16e}")).collect();
    put("continuation", trace.join(" "));
    out
}

pub fn parse_summary(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Data(format!("summary line '{l}' is not key = value")))
        })
        .collect()
}

pub fn read_summary(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    parse_summary(&read_file(path)?)
}

pub fn summary_f64(summary: &BTreeMap<String, String>, key: &str) -> Result<f64, CliError> {
    summary
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Data(format!("summary has no numeric '{key}'")))
}

pub fn write_eigenfunction_vtk(path: &Path, u: &ScalarField, title: &str) -> Result<(), CliError> {
    let io = |e| CliError::Io { path: path.to_path_buf(), source: e };
    let file = fs::File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    write_vtk(&mut w, u.space().mesh(), title, &[("u", &u.nodal_values())]).map_err(io)?;
    std::io::Write::flush(&mut w).map_err(io)
}
