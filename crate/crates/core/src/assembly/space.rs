use std::sync::Arc;

use crate::luxemburg::SampledField;
use crate::mesh::{shape_functions, Mesh, QuadratureRule};
use crate::{Error, Result};

/// Lagrange space on a mesh with homogeneous Dirichlet conditions, with the
/// shape functions tabulated at every quadrature point.
#[derive(Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    rule: QuadratureRule,
    /// physical quadrature points, `n_cells * nq`
    points: Vec<[f64; 2]>,
    /// quadrature weight times |det J|, `n_cells * nq`
    weights: Vec<f64>,
    /// reference shape values, `nq * ndpc`
    phi: Vec<f64>,
    /// physical shape gradients, `n_cells * nq * ndpc`
    grad: Vec<[f64; 2]>,
    free_index: Vec<Option<usize>>,
    free_dofs: Vec<usize>,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>) -> Self {
        let rule = QuadratureRule::default_for(mesh.dim());
        Self::with_rule(mesh, rule)
    }

    pub fn with_rule(mesh: Arc<Mesh>, rule: QuadratureRule) -> Self {
        let nq = rule.len();
        let ndpc = mesh.dofs_per_cell();
        let n_cells = mesh.n_cells();
        let mut phi = Vec::with_capacity(nq * ndpc);
        let mut ref_grads = Vec::with_capacity(nq * ndpc);
        for xi in rule.points() {
            let (v, g) = shape_functions(mesh.dim(), mesh.order(), *xi);
            phi.extend(v);
            ref_grads.extend(g);
        }
        let mut points = Vec::with_capacity(n_cells * nq);
        let mut weights = Vec::with_capacity(n_cells * nq);
        let mut grad = Vec::with_capacity(n_cells * nq * ndpc);
        for e in 0..n_cells {
            let (_, cols) = mesh.affine(e);
            let (det, inv_t) = if mesh.dim() == 1 {
                (cols[0][0], [[1.0 / cols[0][0], 0.0], [0.0, 0.0]])
            } else {
                let det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
                // J = [c0 c1] (columns); J^{-T} rows
                (
                    det,
                    [
                        [cols[1][1] / det, -cols[0][1] / det],
                        [-cols[1][0] / det, cols[0][0] / det],
                    ],
                )
            };
            for (q, xi) in rule.points().iter().enumerate() {
                points.push(mesh.map_to_physical(e, *xi));
                weights.push(rule.weights()[q] * det.abs());
                for a in 0..ndpc {
                    let g = ref_grads[q * ndpc + a];
                    // ∇φ = J^{-T} ∇̂φ
                    grad.push([
                        inv_t[0][0] * g[0] + inv_t[0][1] * g[1],
                        inv_t[1][0] * g[0] + inv_t[1][1] * g[1],
                    ]);
                }
            }
        }
        let mut free_index = vec![None; mesh.n_dofs()];
        let mut free_dofs = Vec::new();
        for (d, slot) in free_index.iter_mut().enumerate() {
            if !mesh.is_boundary_dof(d) {
                *slot = Some(free_dofs.len());
                free_dofs.push(d);
            }
        }
        FeSpace { mesh, rule, points, weights, phi, grad, free_index, free_dofs }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    /// Number of interior (unknown) dofs.
    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free_index[dof]
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn nq(&self) -> usize {
        self.rule.len()
    }

    /// Physical quadrature points, cell-major.
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn phi(&self, q: usize, a: usize) -> f64 {
        self.phi[q * self.mesh.dofs_per_cell() + a]
    }

    pub(crate) fn grad(&self, e: usize, q: usize, a: usize) -> [f64; 2] {
        let ndpc = self.mesh.dofs_per_cell();
        self.grad[(e * self.nq() + q) * ndpc + a]
    }

    fn check_len(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.n_free() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} free dofs",
                coeffs.len(),
                self.n_free()
            )));
        }
        Ok(())
    }

    fn local_coeffs(&self, coeffs: &[f64], e: usize, out: &mut [f64]) {
        for (a, &d) in self.mesh.cell_dofs(e).iter().enumerate() {
            out[a] = self.free_index[d].map_or(0.0, |i| coeffs[i]);
        }
    }

    /// Function values at all quadrature points.
    pub fn values_at_points(&self, coeffs: &[f64]) -> Vec<f64> {
        let (nq, ndpc) = (self.nq(), self.mesh.dofs_per_cell());
        let mut local = vec![0.0; ndpc];
        let mut out = Vec::with_capacity(self.n_points());
        for e in 0..self.mesh.n_cells() {
            self.local_coeffs(coeffs, e, &mut local);
            for q in 0..nq {
                out.push((0..ndpc).map(|a| local[a] * self.phi(q, a)).sum());
            }
        }
        out
    }

    /// Gradients at all quadrature points, `dim` components each.
    pub fn gradients_at_points(&self, coeffs: &[f64]) -> Vec<f64> {
        let (nq, ndpc, dim) = (self.nq(), self.mesh.dofs_per_cell(), self.dim());
        let mut local = vec![0.0; ndpc];
        let mut out = Vec::with_capacity(self.n_points() * dim);
        for e in 0..self.mesh.n_cells() {
            self.local_coeffs(coeffs, e, &mut local);
            for q in 0..nq {
                let mut g = [0.0; 2];
                for (a, c) in local.iter().enumerate() {
                    let d = self.grad(e, q, a);
                    g[0] += c * d[0];
                    g[1] += c * d[1];
                }
                out.extend_from_slice(&g[..dim]);
            }
        }
        out
    }

    pub fn sample(&self, coeffs: &[f64]) -> Result<SampledField> {
        self.check_len(coeffs)?;
        SampledField::scalar(self.values_at_points(coeffs), self.weights.clone())
    }

    pub fn sample_gradient(&self, coeffs: &[f64]) -> Result<SampledField> {
        self.check_len(coeffs)?;
        SampledField::new(self.dim(), self.gradients_at_points(coeffs), self.weights.clone())
    }

    /// Assembles `r_i = Σ_q w_q (s_q φ_i(q) + v_q · ∇φ_i(q))` over the free
    /// dofs. `scalar` has one entry per point, `vector` `dim` entries.
    pub fn assemble(&self, scalar: Option<&[f64]>, vector: Option<&[f64]>) -> Vec<f64> {
        let (nq, ndpc, dim) = (self.nq(), self.mesh.dofs_per_cell(), self.dim());
        let mut out = vec![0.0; self.n_free()];
        let mut local = vec![0.0; ndpc];
        for e in 0..self.mesh.n_cells() {
            local.iter_mut().for_each(|v| *v = 0.0);
            for q in 0..nq {
                let idx = e * nq + q;
                let w = self.weights[idx];
                if let Some(s) = scalar {
                    let sw = w * s[idx];
                    for (a, l) in local.iter_mut().enumerate() {
                        *l += sw * self.phi(q, a);
                    }
                }
                if let Some(v) = vector {
                    let vq = &v[dim * idx..dim * (idx + 1)];
                    for (a, l) in local.iter_mut().enumerate() {
                        let g = self.grad(e, q, a);
                        let dot = if dim == 1 { vq[0] * g[0] } else { vq[0] * g[0] + vq[1] * g[1] };
                        *l += w * dot;
                    }
                }
            }
            for (a, &d) in self.mesh.cell_dofs(e).iter().enumerate() {
                if let Some(i) = self.free_index[d] {
                    out[i] += local[a];
                }
            }
        }
        out
    }

    /// Nodal interpolant of `f` (boundary values are dropped).
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        let coords = self.mesh.dof_coords();
        self.free_dofs.iter().map(|&d| f(coords[d])).collect()
    }

    /// Expands free coefficients to all dofs (zero on the boundary).
    pub fn expand(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.mesh.n_dofs()];
        for (i, &d) in self.free_dofs.iter().enumerate() {
            full[d] = coeffs[i];
        }
        full
    }

    /// Restricts a full dof vector to the free dofs.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free_dofs.iter().map(|&d| full[d]).collect()
    }

    /// `∫ g` from values at the quadrature points.
    pub fn integrate_points(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}
