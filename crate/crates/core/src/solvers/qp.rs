use nalgebra::{DMatrix, DVector};

use crate::error::{check_len, Error, Result};
use crate::matrix::SymmetricMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub solution: Vec<f64>,
    /// One multiplier per constraint column.
    pub multipliers: Vec<f64>,
    /// `0.5 x'Dx - d'x`
    pub objective_value: f64,
    /// `x'Dx`
    pub problem_value: f64,
    /// Infinity norm of the KKT system residual.
    pub residual: f64,
}

/// Minimizes `0.5 x'Dx - d'x` subject to `A'x = b`, where `a` holds the `n`
/// rows of the `n x m` constraint matrix. Solves the KKT system
/// `D x - A lambda = d`, `A'x = b` directly.
pub fn solve_eq_qp(d_mat: &SymmetricMatrix, d: &[f64], a: &[Vec<f64>], b: &[f64]) -> Result<QpSolution> {
    let n = d_mat.order();
    check_len(n, d.len())?;
    check_len(n, a.len())?;
    let m = b.len();
    for row in a {
        check_len(m, row.len())?;
    }
    let size = n + m;
    let mut k = DMatrix::<f64>::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            k[(i, j)] = d_mat.get(i, j);
        }
        for c in 0..m {
            k[(i, n + c)] = -a[i][c];
            k[(n + c, i)] = a[i][c];
        }
    }
    let rhs = DVector::from_iterator(size, d.iter().chain(b).copied());

    let sv = k.clone().singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    if !(smax > 0.0) || smin <= 1e-13 * smax {
        return Err(Error::SingularSystem(format!("KKT matrix is singular (singular values {smin:e} .. {smax:e})")));
    }
    let z = k.clone().lu().solve(&rhs).ok_or_else(|| Error::SingularSystem("LU solve failed".into()))?;
    let residual = (&k * &z - &rhs).amax();
    let solution: Vec<f64> = z.rows(0, n).iter().copied().collect();
    let multipliers: Vec<f64> = z.rows(n, m).iter().copied().collect();
    let problem_value = d_mat.quad_form(&solution);
    let linear: f64 = d.iter().zip(&solution).map(|(di, xi)| di * xi).sum();
    Ok(QpSolution { objective_value: 0.5 * problem_value - linear, problem_value, solution, multipliers, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_sum_of_squares_on_the_plane() {
        let d = SymmetricMatrix::diagonal(&[2.0, 4.0, 6.0]).unwrap();
        let a = vec![vec![1.0], vec![1.0], vec![1.0]];
        let s = solve_eq_qp(&d, &[0.0; 3], &a, &[1.0]).unwrap();
        let want = [6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0];
        for (x, w) in s.solution.iter().zip(want) {
            assert!((x - w).abs() < 1e-14);
        }
        assert!((s.multipliers[0] - 12.0 / 11.0).abs() < 1e-14);
        assert!((s.objective_value - 6.0 / 11.0).abs() < 1e-14);
        assert!((s.problem_value - 12.0 / 11.0).abs() < 1e-14);
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn dependent_constraints_are_singular() {
        let d = SymmetricMatrix::identity(2).unwrap();
        let a = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert!(matches!(solve_eq_qp(&d, &[0.0; 2], &a, &[1.0, 2.0]), Err(Error::SingularSystem(_))));
    }
}
