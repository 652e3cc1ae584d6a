use std::fmt::Write as _;
use std::io::{self, Write};

use super::{ElementOrder, Mesh};

/// Plain text dump: node count, coordinates, then the element list.
pub fn text_dump(mesh: &Mesh) -> String {
    let mut s = String::new();
    writeln!(s, "nodes {}", mesh.n_nodes()).unwrap();
    for x in mesh.nodes() {
        if mesh.dim() == 1 {
            writeln!(s, "{:.17e}", x[0]).unwrap();
        } else {
            writeln!(s, "{:.17e} {:.17e}", x[0], x[1]).unwrap();
        }
    }
    writeln!(s, "elements {}", mesh.n_cells()).unwrap();
    for e in 0..mesh.n_cells() {
        let c: Vec<String> = mesh.cell(e).iter().map(|v| v.to_string()).collect();
        writeln!(s, "{}", c.join(" ")).unwrap();
    }
    s
}

/// Writes the mesh as a legacy ASCII VTK unstructured grid. Points are the
/// dof coordinates, so P2 meshes are written with quadratic cells. Each
/// `(name, values)` pair becomes a point-data scalar with one value per dof.
pub fn write_vtk<W: Write>(
    out: &mut W,
    mesh: &Mesh,
    title: &str,
    scalars: &[(&str, &[f64])],
) -> io::Result<()> {
    let coords = mesh.dof_coords();
    let n_cells = mesh.n_cells();
    let ndpc = mesh.dofs_per_cell();
    let cell_type = match (mesh.dim(), mesh.order()) {
        (1, ElementOrder::P1) => 3,
        (1, ElementOrder::P2) => 21,
        (_, ElementOrder::P1) => 5,
        (_, ElementOrder::P2) => 22,
    };
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.lines().next().unwrap_or(""))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", coords.len())?;
    for x in coords {
        writeln!(out, "{:.17e} {:.17e} 0", x[0], x[1])?;
    }
    writeln!(out, "CELLS {} {}", n_cells, n_cells * (ndpc + 1))?;
    for e in 0..n_cells {
        write!(out, "{ndpc}")?;
        for d in mesh.cell_dofs(e) {
            write!(out, " {d}")?;
        }
        writeln!(out)?;
    }
    writeln!(out, "CELL_TYPES {n_cells}")?;
    for _ in 0..n_cells {
        writeln!(out, "{cell_type}")?;
    }
    if !scalars.is_empty() {
        writeln!(out, "POINT_DATA {}", coords.len())?;
        for (name, values) in scalars {
            if values.len() != coords.len() {
                return Err(io::Error::new(
                    io::ErrorKind::InvalidInput,
                    format!("scalar '{name}' has {} values for {} points", values.len(), coords.len()),
                ));
            }
            writeln!(out, "SCALARS {name} double 1")?;
            writeln!(out, "LOOKUP_TABLE default")?;
            for v in *values {
                writeln!(out, "{v:.17e}")?;
            }
        }
    }
    Ok(())
}
