//! Cyclic Jacobi eigensolver for dense symmetric matrices.
//!
//! This is the reference used to check eigenvalues found by Rayleigh-quotient
//! optimization. It deliberately has no dependency on the solvers or on any
//! external linear-algebra crate.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

/// Off-diagonal Frobenius norm, relative to the matrix norm, at which sweeps
/// stop.
pub const DEFAULT_TOLERANCE: f64 = 1e-14;
pub const DEFAULT_MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors[k].clone()
    }

    /// Reassembles `V diag(values) V'`.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        let n = self.values.len();
        let mut out = vec![vec![0.0; n]; n];
        for (k, lambda) in self.values.iter().enumerate() {
            let v = &self.vectors[k];
            for i in 0..n {
                for j in 0..n {
                    out[i][j] += lambda * v[i] * v[j];
                }
            }
        }
        out
    }
}

/// Cyclic-by-row Jacobi. Sweeps until the off-diagonal Frobenius norm is at
/// most `tolerance` times the Frobenius norm of `a`.
pub fn jacobi_eigen(a: &SymmetricMatrix, tolerance: f64, max_sweeps: usize) -> Result<EigenDecomposition> {
    let n = a.order();
    let mut m = a.to_rows();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frob = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let target = tolerance * frob;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= target || off == 0.0 {
            break;
        }
        if sweeps == max_sweeps {
            return Err(Error::NoConvergence(max_sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                // Symmetric Schur 2x2: choose t = tan(theta) of smaller
                // magnitude so the rotation angle stays below pi/4.
                let tau = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let values = order.iter().map(|&k| m[k][k]).collect();
    let vectors = order.iter().map(|&k| (0..n).map(|i| v[i][k]).collect()).collect();
    Ok(EigenDecomposition { values, vectors, sweeps })
}

fn off_diagonal_norm(m: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

/// Applies `J' M J` with the rotation in the (p, q) plane and accumulates
/// `V J`.
#[allow(clippy::needless_range_loop)]
fn rotate(m: &mut [Vec<f64>], v: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let n = m.len();
    for row in m.iter_mut() {
        let (mkp, mkq) = (row[p], row[q]);
        row[p] = c * mkp - s * mkq;
        row[q] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[p][k];
        let mqk = m[q][k];
        m[p][k] = c * mpk - s * mqk;
        m[q][k] = s * mpk + c * mqk;
    }
    m[p][q] = 0.0;
    m[q][p] = 0.0;
    for row in v.iter_mut() {
        let vp = row[p];
        let vq = row[q];
        row[p] = c * vp - s * vq;
        row[q] = s * vp + c * vq;
    }
}

/// Infinity-norm distance between two directions after normalizing both and
/// aligning the sign of `x` with `v`.
pub fn eigvec_error(x: &[f64], v: &[f64]) -> Result<f64> {
    crate::error::check_len(v.len(), x.len())?;
    let nx = crate::vecops::norm2(x);
    let nv = crate::vecops::norm2(v);
    if nx == 0.0 || nv == 0.0 {
        return Err(Error::DegenerateInput("zero vector in eigvec_error".into()));
    }
    let sign = if crate::vecops::dot(x, v) < 0.0 { -1.0 } else { 1.0 };
    Ok(x.iter().zip(v).fold(0.0, |m, (a, b)| m.max((sign * a / nx - b / nv).abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::moler_matrix;

    fn eig(a: &SymmetricMatrix) -> EigenDecomposition {
        jacobi_eigen(a, DEFAULT_TOLERANCE, DEFAULT_MAX_SWEEPS).unwrap()
    }

    #[test]
    fn diagonal_sorted() {
        let e = eig(&SymmetricMatrix::diagonal(&[3.0, 1.0, 2.0]).unwrap());
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two() {
        let e = eig(&SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap());
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn moler_ten_extremes() {
        let e = eig(&moler_matrix(10).unwrap());
        assert!((e.values[9] - 31.58981).abs() < 5e-6);
        assert!((e.values[0] - 8.582807e-06).abs() < 5e-13);
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let a = moler_matrix(12).unwrap();
        let e = eig(&a);
        for (k, lambda) in e.values.iter().enumerate() {
            let av = a.mul_vec(&e.vectors[k]);
            for (x, v) in av.iter().zip(&e.vectors[k]) {
                assert!((x - lambda * v).abs() <= 1e-9 * a.max_abs());
            }
        }
        for i in 0..12 {
            for j in 0..12 {
                let d = crate::vecops::dot(&e.vectors[i], &e.vectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigvec_error_examples() {
        let v = [0.6, 0.8];
        assert!(eigvec_error(&[1.2, 1.6], &v).unwrap() < 1e-15);
        assert!(eigvec_error(&[-0.6, -0.8], &v).unwrap() < 1e-15);
        assert!(eigvec_error(&[1.0, 0.0], &[0.0, 1.0]).unwrap() >= 1.0);
        assert!(eigvec_error(&[0.0, 0.0], &v).is_err());
    }
}
