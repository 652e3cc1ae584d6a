use super::{ElementOrder, Mesh};
use crate::{Error, Result};

/// Values and reference gradients of the Lagrange shape functions at a
/// reference point, in local dof order (vertices, then edge midpoints
/// `01, 12, 20`; in 1D the single midpoint).
pub fn shape_functions(dim: usize, order: ElementOrder, xi: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    match (dim, order) {
        (1, ElementOrder::P1) => (vec![1.0 - xi[0], xi[0]], vec![[-1.0, 0.0], [1.0, 0.0]]),
        (1, ElementOrder::P2) => {
            let t = xi[0];
            (
                vec![(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)],
                vec![[4.0 * t - 3.0, 0.0], [4.0 * t - 1.0, 0.0], [4.0 - 8.0 * t, 0.0]],
            )
        }
        (_, ElementOrder::P1) => (
            vec![1.0 - xi[0] - xi[1], xi[0], xi[1]],
            vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]],
        ),
        (_, ElementOrder::P2) => {
            let l = [1.0 - xi[0] - xi[1], xi[0], xi[1]];
            let dl = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
            let mut values = Vec::with_capacity(6);
            let mut grads = Vec::with_capacity(6);
            for i in 0..3 {
                values.push(l[i] * (2.0 * l[i] - 1.0));
                let s = 4.0 * l[i] - 1.0;
                grads.push([s * dl[i][0], s * dl[i][1]]);
            }
            for &(i, j) in &super::TRIANGLE_EDGES {
                values.push(4.0 * l[i] * l[j]);
                grads.push([
                    4.0 * (dl[i][0] * l[j] + l[i] * dl[j][0]),
                    4.0 * (dl[i][1] * l[j] + l[i] * dl[j][1]),
                ]);
            }
            (values, grads)
        }
    }
}

/// Evaluates the shape functions of `element` at `ref_point`.
pub fn eval_basis(
    mesh: &Mesh,
    element: usize,
    ref_point: [f64; 2],
) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
    if element >= mesh.n_cells() {
        return Err(Error::ElementOutOfRange { index: element, count: mesh.n_cells() });
    }
    Ok(shape_functions(mesh.dim(), mesh.order(), ref_point))
}
