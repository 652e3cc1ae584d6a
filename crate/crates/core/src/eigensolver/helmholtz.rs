use std::sync::Arc;

use sprs::CsMat;

use crate::assembly::{assemble_mass, assemble_stiffness, FeSpace, ScalarField};
use crate::assembly::matrix::csr_mul_into;
use crate::{Error, Result};

/// Jacobi-preconditioned conjugate gradients for an SPD matrix. `x` holds the
/// initial guess and receives the solution.
pub(crate) fn pcg(a: &CsMat<f64>, b: &[f64], x: &mut [f64], rel_tol: f64, max_iters: usize) -> Result<usize> {
    let n = b.len();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).copied().unwrap_or(0.0)).collect();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::LinearSolve("matrix has a non-positive diagonal entry".into()));
    }
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; n];
    csr_mul_into(a, x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    for it in 0..max_iters {
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= rel_tol * b_norm {
            return Ok(it);
        }
        csr_mul_into(a, &p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if !(pap > 0.0) {
            return Err(Error::LinearSolve("matrix is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolve(format!("CG did not converge in {max_iters} iterations")))
}

/// First Dirichlet eigenpair of `-Δu = λu` on the space, by inverse
/// iteration with one CG solve per step. Stops when the relative eigen
/// residual `‖Au - λMu‖ / ‖Au‖` drops below `tol`. The eigenfunction is
/// positive and normalized to `uᵀMu = 1`.
pub fn helmholtz_first_eigenpair(space: &Arc<FeSpace>, tol: f64) -> Result<(f64, ScalarField)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tol = {tol}")));
    }
    let n = space.n_free();
    if n == 0 {
        return Err(Error::LinearSolve("no interior degrees of freedom".into()));
    }
    let a = assemble_stiffness(space);
    let m = assemble_mass(space);
    let mut x = vec![1.0; n];
    let mut mx = vec![0.0; n];
    let mut ax = vec![0.0; n];
    csr_mul_into(&m, &x, &mut mx);
    let scale = 1.0 / x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v *= scale);
    let mut lambda = 0.0;
    let mut y = x.clone();
    let cg_tol = (0.01 * tol).max(1e-15);
    for _ in 0..1000 {
        csr_mul_into(&m, &x, &mut mx);
        if lambda > 0.0 {
            y.iter_mut().zip(&x).for_each(|(y, x)| *y = x / lambda);
        }
        pcg(&a, &mx, &mut y, cg_tol, 20 * n + 100)?;
        csr_mul_into(&m, &y, &mut mx);
        let ymy: f64 = y.iter().zip(&mx).map(|(a, b)| a * b).sum();
        let s = 1.0 / ymy.sqrt();
        x.iter_mut().zip(&y).for_each(|(x, y)| *x = s * y);
        csr_mul_into(&a, &x, &mut ax);
        csr_mul_into(&m, &x, &mut mx);
        lambda = x.iter().zip(&ax).map(|(a, b)| a * b).sum();
        let res: f64 = ax.iter().zip(&mx).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        let ax_norm: f64 = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
        if res <= tol * ax_norm {
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            return Ok((lambda, ScalarField::new(space.clone(), x)?));
        }
    }
    Err(Error::LinearSolve("inverse iteration did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_mesh, DomainSpec, ElementOrder};
    use std::f64::consts::PI;

    fn space(spec: DomainSpec, h: f64, order: ElementOrder) -> Arc<FeSpace> {
        Arc::new(FeSpace::new(Arc::new(generate_mesh(spec, h, order).unwrap())))
    }

    #[test]
    fn interval_eigenvalue() {
        let s = space(DomainSpec::Interval { a: 0.0, b: 1.0 }, 0.05, ElementOrder::P2);
        let (l, u) = helmholtz_first_eigenpair(&s, 1e-10).unwrap();
        assert!((l - PI * PI).abs() < 1e-5, "{l}");
        assert!(u.coeffs().iter().all(|&c| c > 0.0));
    }

    #[test]
    fn square_eigenvalue_p1_converges_at_second_order() {
        let oracle = 2.0 * PI * PI;
        let e1 = helmholtz_first_eigenpair(&space(DomainSpec::unit_square(), 0.1, ElementOrder::P1), 1e-10).unwrap().0 - oracle;
        let e2 = helmholtz_first_eigenpair(&space(DomainSpec::unit_square(), 0.05, ElementOrder::P1), 1e-10).unwrap().0 - oracle;
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.3, "{e1} {e2} {order}");
    }

    #[test]
    fn disk_eigenvalue() {
        let j01 = 2.404_825_557_695_773f64;
        let (l, _) = helmholtz_first_eigenpair(&space(DomainSpec::unit_disk(), 0.05, ElementOrder::P2), 1e-10).unwrap();
        assert!((l - j01 * j01).abs() < 1e-2, "{l}");
    }

    #[test]
    fn pcg_solves_small_system() {
        let s = space(DomainSpec::unit_square(), 0.25, ElementOrder::P1);
        let a = assemble_stiffness(&s);
        let xs: Vec<f64> = (0..s.n_free()).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; xs.len()];
        csr_mul_into(&a, &xs, &mut b);
        let mut x = vec![0.0; xs.len()];
        pcg(&a, &b, &mut x, 1e-14, 1000).unwrap();
        for (u, v) in x.iter().zip(&xs) {
            assert!((u - v).abs() < 1e-10);
        }
    }
}
