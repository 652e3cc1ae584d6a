use sprs::{CsMat, TriMat};

use super::FeSpace;

fn assemble_bilinear(space: &FeSpace, entry: impl Fn(usize, usize, usize, usize) -> f64) -> CsMat<f64> {
    let n = space.n_free();
    let mesh = space.mesh();
    let ndpc = mesh.dofs_per_cell();
    let nq = space.nq();
    let mut tri = TriMat::with_capacity((n, n), mesh.n_cells() * ndpc * ndpc);
    let mut local = vec![0.0; ndpc * ndpc];
    for e in 0..mesh.n_cells() {
        local.iter_mut().for_each(|v| *v = 0.0);
        for q in 0..nq {
            let w = space.weights()[e * nq + q];
            for a in 0..ndpc {
                for b in 0..ndpc {
                    local[a * ndpc + b] += w * entry(e, q, a, b);
                }
            }
        }
        let dofs = mesh.cell_dofs(e);
        for a in 0..ndpc {
            let Some(i) = space.free_index(dofs[a]) else { continue };
            for b in 0..ndpc {
                if let Some(j) = space.free_index(dofs[b]) {
                    tri.add_triplet(i, j, local[a * ndpc + b]);
                }
            }
        }
    }
    tri.to_csr()
}

/// Stiffness matrix `∫ ∇φ_i · ∇φ_j` on the free dofs.
pub fn assemble_stiffness(space: &FeSpace) -> CsMat<f64> {
    assemble_bilinear(space, |e, q, a, b| {
        let (ga, gb) = (space.grad(e, q, a), space.grad(e, q, b));
        ga[0] * gb[0] + ga[1] * gb[1]
    })
}

/// Mass matrix `∫ φ_i φ_j` on the free dofs.
pub fn assemble_mass(space: &FeSpace) -> CsMat<f64> {
    assemble_bilinear(space, |_, q, a, b| space.phi(q, a) * space.phi(q, b))
}

/// `A x` for a CSR matrix.
#[cfg(test)]
pub(crate) fn csr_mul(a: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.rows()];
    csr_mul_into(a, x, &mut y);
    y
}

pub(crate) fn csr_mul_into(a: &CsMat<f64>, x: &[f64], y: &mut [f64]) {
    for (i, row) in a.outer_iterator().enumerate() {
        y[i] = row.iter().map(|(j, v)| v * x[j]).sum();
    }
}
