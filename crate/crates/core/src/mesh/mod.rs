//! Simplicial meshes, Lagrange elements and quadrature.
//!
//! A [`Mesh`] stores straight-sided intervals (1D) or triangles (2D) together
//! with the degree-of-freedom layout of its element order. Curved boundaries
//! are represented only through the placement of boundary vertices on the
//! exact circle.

mod basis;
mod generate;
mod io;
mod quadrature;

use std::collections::HashMap;
use std::f64::consts::PI;

pub use basis::{eval_basis, shape_functions};
pub use generate::{generate_mesh, refine};
pub use io::{text_dump, write_vtk};
pub use quadrature::{gauss_legendre, QuadratureRule};

use crate::{Error, Result};

/// Geometry of the computational domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    Interval { a: f64, b: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    Disk { cx: f64, cy: f64, r: f64 },
    Annulus { cx: f64, cy: f64, r_in: f64, r_out: f64 },
}

impl DomainSpec {
    pub fn unit_square() -> Self {
        DomainSpec::Rectangle { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 }
    }

    pub fn unit_disk() -> Self {
        DomainSpec::Disk { cx: 0.0, cy: 0.0, r: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        let ok = match *self {
            DomainSpec::Interval { a, b } => finite(&[a, b]) && a < b,
            DomainSpec::Rectangle { x0, x1, y0, y1 } => {
                finite(&[x0, x1, y0, y1]) && x0 < x1 && y0 < y1
            }
            DomainSpec::Disk { cx, cy, r } => finite(&[cx, cy, r]) && r > 0.0,
            DomainSpec::Annulus { cx, cy, r_in, r_out } => {
                finite(&[cx, cy, r_in, r_out]) && 0.0 < r_in && r_in < r_out
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidDomain(format!("{self:?}")))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            DomainSpec::Interval { a, b } => b - a,
            DomainSpec::Rectangle { x0, x1, y0, y1 } => (x1 - x0).hypot(y1 - y0),
            DomainSpec::Disk { r, .. } => 2.0 * r,
            DomainSpec::Annulus { r_out, .. } => 2.0 * r_out,
        }
    }

    /// Exact Lebesgue measure (length or area).
    pub fn measure(&self) -> f64 {
        match *self {
            DomainSpec::Interval { a, b } => b - a,
            DomainSpec::Rectangle { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
            DomainSpec::Disk { r, .. } => PI * r * r,
            DomainSpec::Annulus { r_in, r_out, .. } => PI * (r_out * r_out - r_in * r_in),
        }
    }

    /// Center of symmetry.
    pub fn center(&self) -> [f64; 2] {
        match *self {
            DomainSpec::Interval { a, b } => [0.5 * (a + b), 0.0],
            DomainSpec::Rectangle { x0, x1, y0, y1 } => [0.5 * (x0 + x1), 0.5 * (y0 + y1)],
            DomainSpec::Disk { cx, cy, .. } | DomainSpec::Annulus { cx, cy, .. } => [cx, cy],
        }
    }

    pub fn is_curved(&self) -> bool {
        matches!(self, DomainSpec::Disk { .. } | DomainSpec::Annulus { .. })
    }

    /// Distance from `x` to the boundary curve nearest to it.
    pub fn boundary_distance(&self, x: [f64; 2]) -> f64 {
        match *self {
            DomainSpec::Interval { a, b } => (x[0] - a).abs().min((x[0] - b).abs()),
            DomainSpec::Rectangle { x0, x1, y0, y1 } => {
                let inside_x = x[0] >= x0 && x[0] <= x1;
                let inside_y = x[1] >= y0 && x[1] <= y1;
                let dx = (x[0] - x0).abs().min((x[0] - x1).abs());
                let dy = (x[1] - y0).abs().min((x[1] - y1).abs());
                match (inside_x, inside_y) {
                    (true, true) => dx.min(dy),
                    (true, false) => dy,
                    (false, true) => dx,
                    (false, false) => dx.hypot(dy),
                }
            }
            DomainSpec::Disk { cx, cy, r } => ((x[0] - cx).hypot(x[1] - cy) - r).abs(),
            DomainSpec::Annulus { cx, cy, r_in, r_out } => {
                let d = (x[0] - cx).hypot(x[1] - cy);
                (d - r_in).abs().min((d - r_out).abs())
            }
        }
    }

    /// Moves a point radially onto the nearest boundary circle. Straight
    /// boundaries are returned unchanged.
    pub fn project_to_boundary(&self, x: [f64; 2]) -> [f64; 2] {
        let radial = |cx: f64, cy: f64, r: f64| {
            let (dx, dy) = (x[0] - cx, x[1] - cy);
            let d = dx.hypot(dy);
            if d == 0.0 {
                x
            } else {
                [cx + r * dx / d, cy + r * dy / d]
            }
        };
        match *self {
            DomainSpec::Disk { cx, cy, r } => radial(cx, cy, r),
            DomainSpec::Annulus { cx, cy, r_in, r_out } => {
                let d = (x[0] - cx).hypot(x[1] - cy);
                if (d - r_in).abs() < (d - r_out).abs() {
                    radial(cx, cy, r_in)
                } else {
                    radial(cx, cy, r_out)
                }
            }
            _ => x,
        }
    }
}

/// Lagrange element order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementOrder {
    P1,
    P2,
}

impl ElementOrder {
    pub fn from_degree(degree: usize) -> Result<Self> {
        match degree {
            1 => Ok(ElementOrder::P1),
            2 => Ok(ElementOrder::P2),
            d => Err(Error::InvalidMeshParameter(format!("element order {d} (expected 1 or 2)"))),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            ElementOrder::P1 => 1,
            ElementOrder::P2 => 2,
        }
    }

    /// Local dofs on a simplex of dimension `dim`.
    pub fn dofs_per_cell(&self, dim: usize) -> usize {
        match (self, dim) {
            (ElementOrder::P1, d) => d + 1,
            (ElementOrder::P2, 1) => 3,
            (ElementOrder::P2, _) => 6,
        }
    }
}

/// A conforming simplicial mesh with its dof layout.
///
/// Dofs are numbered vertices first; for P2 the edge-midpoint dofs follow,
/// numbered in order of first appearance while walking the cells (edges keyed
/// by their sorted vertex pair). In 1D every cell is its own edge.
#[derive(Debug, Clone)]
pub struct Mesh {
    domain: DomainSpec,
    dim: usize,
    order: ElementOrder,
    nodes: Vec<[f64; 2]>,
    cells: Vec<usize>,
    boundary_nodes: Vec<usize>,
    dof_map: Vec<usize>,
    dof_coords: Vec<[f64; 2]>,
    boundary_dof: Vec<bool>,
}

/// Local vertex pairs of the P2 edge dofs, in local dof order 3, 4, 5.
pub(crate) const TRIANGLE_EDGES: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

impl Mesh {
    /// Builds a mesh from raw geometry. Cells must be positively oriented.
    pub fn new(
        domain: DomainSpec,
        nodes: Vec<[f64; 2]>,
        cells: Vec<usize>,
        order: ElementOrder,
    ) -> Result<Self> {
        domain.validate()?;
        let dim = domain.dim();
        let nv = dim + 1;
        if cells.is_empty() || !cells.len().is_multiple_of(nv) {
            return Err(Error::InvalidMeshParameter("empty or ragged cell list".into()));
        }
        if let Some(&bad) = cells.iter().find(|&&v| v >= nodes.len()) {
            return Err(Error::InvalidMeshParameter(format!("vertex index {bad} out of range")));
        }
        let mut mesh = Mesh {
            domain,
            dim,
            order,
            nodes,
            cells,
            boundary_nodes: Vec::new(),
            dof_map: Vec::new(),
            dof_coords: Vec::new(),
            boundary_dof: Vec::new(),
        };
        for e in 0..mesh.n_cells() {
            if mesh.cell_measure(e) <= 0.0 {
                return Err(Error::InvalidMeshParameter(format!(
                    "cell {e} has non-positive measure"
                )));
            }
        }
        mesh.build_topology();
        Ok(mesh)
    }

    fn build_topology(&mut self) {
        let n_nodes = self.nodes.len();
        let n_cells = self.n_cells();
        let mut on_boundary = vec![false; n_nodes];
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edge_list: Vec<(usize, usize)> = Vec::new();
        let mut edge_count: Vec<usize> = Vec::new();
        let mut cell_edges: Vec<usize> = Vec::new();

        if self.dim == 1 {
            let (a, b) = match self.domain {
                DomainSpec::Interval { a, b } => (a, b),
                _ => unreachable!(),
            };
            let tol = 1e-10 * (b - a);
            for (i, x) in self.nodes.iter().enumerate() {
                if (x[0] - a).abs() <= tol || (x[0] - b).abs() <= tol {
                    on_boundary[i] = true;
                }
            }
            for e in 0..n_cells {
                let c = self.cell(e);
                edge_list.push((c[0].min(c[1]), c[0].max(c[1])));
                edge_count.push(1);
                cell_edges.push(e);
            }
        } else {
            for e in 0..n_cells {
                let c = [self.cells[3 * e], self.cells[3 * e + 1], self.cells[3 * e + 2]];
                for &(i, j) in &TRIANGLE_EDGES {
                    let key = (c[i].min(c[j]), c[i].max(c[j]));
                    let id = *edge_ids.entry(key).or_insert_with(|| {
                        edge_list.push(key);
                        edge_count.push(0);
                        edge_list.len() - 1
                    });
                    edge_count[id] += 1;
                    cell_edges.push(id);
                }
            }
            for (k, &(a, b)) in edge_list.iter().enumerate() {
                if edge_count[k] == 1 {
                    on_boundary[a] = true;
                    on_boundary[b] = true;
                }
            }
        }
        self.boundary_nodes = (0..n_nodes).filter(|&i| on_boundary[i]).collect();

        let mut dof_coords = self.nodes.clone();
        let mut boundary_dof = on_boundary;
        let ndpc = self.order.dofs_per_cell(self.dim);
        let mut dof_map = Vec::with_capacity(n_cells * ndpc);
        match self.order {
            ElementOrder::P1 => dof_map.extend_from_slice(&self.cells),
            ElementOrder::P2 => {
                for &(a, b) in &edge_list {
                    let (pa, pb) = (self.nodes[a], self.nodes[b]);
                    dof_coords.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                }
                // 1D cells never sit on the boundary; 2D edges do iff they
                // belong to a single cell.
                boundary_dof.extend(edge_count.iter().map(|&c| self.dim == 2 && c == 1));
                let per_cell_edges = if self.dim == 1 { 1 } else { 3 };
                for e in 0..n_cells {
                    dof_map.extend_from_slice(self.cell(e));
                    for k in 0..per_cell_edges {
                        dof_map.push(n_nodes + cell_edges[per_cell_edges * e + k]);
                    }
                }
            }
        }
        self.dof_map = dof_map;
        self.dof_coords = dof_coords;
        self.boundary_dof = boundary_dof;
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> ElementOrder {
        self.order
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn vertices_per_cell(&self) -> usize {
        self.dim + 1
    }

    /// Vertex indices of cell `e`.
    pub fn cell(&self, e: usize) -> &[usize] {
        let nv = self.dim + 1;
        &self.cells[nv * e..nv * (e + 1)]
    }

    pub fn cells_flat(&self) -> &[usize] {
        &self.cells
    }

    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary_nodes
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_coords.len()
    }

    pub fn dofs_per_cell(&self) -> usize {
        self.order.dofs_per_cell(self.dim)
    }

    /// Global dofs of cell `e` in local order.
    pub fn cell_dofs(&self, e: usize) -> &[usize] {
        let n = self.dofs_per_cell();
        &self.dof_map[n * e..n * (e + 1)]
    }

    pub fn dof_coords(&self) -> &[[f64; 2]] {
        &self.dof_coords
    }

    pub fn is_boundary_dof(&self, dof: usize) -> bool {
        self.boundary_dof[dof]
    }

    /// Signed length or area of cell `e`.
    pub fn cell_measure(&self, e: usize) -> f64 {
        let c = self.cell(e);
        let p = |i: usize| self.nodes[c[i]];
        if self.dim == 1 {
            p(1)[0] - p(0)[0]
        } else {
            let (a, b, q) = (p(0), p(1), p(2));
            0.5 * ((b[0] - a[0]) * (q[1] - a[1]) - (q[0] - a[0]) * (b[1] - a[1]))
        }
    }

    /// Longest edge of cell `e`.
    pub fn cell_diameter(&self, e: usize) -> f64 {
        let c = self.cell(e);
        let mut d: f64 = 0.0;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let (a, b) = (self.nodes[c[i]], self.nodes[c[j]]);
                d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
            }
        }
        d
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.n_cells()).map(|e| self.cell_diameter(e)).fold(0.0, f64::max)
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.n_cells()).map(|e| self.cell_measure(e)).sum()
    }

    /// Affine map of cell `e`: origin and the columns of the Jacobian.
    pub(crate) fn affine(&self, e: usize) -> ([f64; 2], [[f64; 2]; 2]) {
        let c = self.cell(e);
        let a = self.nodes[c[0]];
        let b = self.nodes[c[1]];
        if self.dim == 1 {
            (a, [[b[0] - a[0], 0.0], [0.0, 1.0]])
        } else {
            let q = self.nodes[c[2]];
            (a, [[b[0] - a[0], b[1] - a[1]], [q[0] - a[0], q[1] - a[1]]])
        }
    }

    /// Maps a reference point of cell `e` to physical coordinates.
    pub fn map_to_physical(&self, e: usize, xi: [f64; 2]) -> [f64; 2] {
        let (o, cols) = self.affine(e);
        if self.dim == 1 {
            [o[0] + cols[0][0] * xi[0], 0.0]
        } else {
            [
                o[0] + cols[0][0] * xi[0] + cols[1][0] * xi[1],
                o[1] + cols[0][1] * xi[0] + cols[1][1] * xi[1],
            ]
        }
    }

    /// Inverse of [`Mesh::map_to_physical`] (extrapolates outside the cell).
    pub fn map_to_reference(&self, e: usize, x: [f64; 2]) -> [f64; 2] {
        let (o, cols) = self.affine(e);
        let (dx, dy) = (x[0] - o[0], x[1] - o[1]);
        if self.dim == 1 {
            [dx / cols[0][0], 0.0]
        } else {
            let det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
            [
                (cols[1][1] * dx - cols[1][0] * dy) / det,
                (-cols[0][1] * dx + cols[0][0] * dy) / det,
            ]
        }
    }
}
