use std::f64::consts::PI;

use crate::{Error, Result};

/// Quadrature on a reference simplex: `[0, 1]` in 1D, the triangle with
/// vertices (0,0), (1,0), (0,1) in 2D. Weights sum to the reference measure.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    dim: usize,
    degree: usize,
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Default rule: 4-point Gauss (degree 7) on intervals, the 7-point degree-5
    /// rule on triangles.
    pub fn default_for(dim: usize) -> Self {
        match dim {
            1 => Self::interval(7),
            _ => Self::triangle(5),
        }
    }

    /// Rule for `dim` exact up to at least `degree` (never below the default).
    pub fn with_degree(dim: usize, degree: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self::interval(degree.max(7))),
            2 => Ok(Self::triangle(degree.max(5))),
            _ => Err(Error::InvalidArgument(format!("quadrature dimension {dim}"))),
        }
    }

    /// Gauss–Legendre rule on `[0, 1]` exact for polynomials of `degree`.
    pub fn interval(degree: usize) -> Self {
        let n = degree / 2 + 1;
        let (x, w) = gauss_legendre(n);
        QuadratureRule {
            dim: 1,
            degree: 2 * n - 1,
            points: x.iter().map(|&t| [0.5 * (t + 1.0), 0.0]).collect(),
            weights: w.iter().map(|&w| 0.5 * w).collect(),
        }
    }

    /// Triangle rule exact for polynomials of `degree`. Up to degree 5 this is
    /// the symmetric 7-point rule; above, a collapsed Gauss product rule.
    pub fn triangle(degree: usize) -> Self {
        if degree <= 5 {
            let s = 15f64.sqrt();
            let a = (6.0 - s) / 21.0;
            let b = (6.0 + s) / 21.0;
            let wa = (155.0 - s) / 2400.0;
            let wb = (155.0 + s) / 2400.0;
            let third = 1.0 / 3.0;
            return QuadratureRule {
                dim: 2,
                degree: 5,
                points: vec![
                    [third, third],
                    [a, a],
                    [1.0 - 2.0 * a, a],
                    [a, 1.0 - 2.0 * a],
                    [b, b],
                    [1.0 - 2.0 * b, b],
                    [b, 1.0 - 2.0 * b],
                ],
                weights: vec![9.0 / 80.0, wa, wa, wa, wb, wb, wb],
            };
        }
        // x = s, y = (1 - s) t with Jacobian (1 - s): the s-integrand has
        // degree d + 1, the t-integrand degree d.
        let n = (degree + 3) / 2;
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let s = 0.5 * (x[i] + 1.0);
            for j in 0..n {
                let t = 0.5 * (x[j] + 1.0);
                points.push([s, (1.0 - s) * t]);
                weights.push(0.25 * w[i] * w[j] * (1.0 - s));
            }
        }
        QuadratureRule { dim: 2, degree: 2 * n - 2, points, weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}
