use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::solvers::{free_gradient, numerical_gradient, Bounds, GradientMode, GradientRef, ObjectiveRef};
use crate::vecops::norm_inf;

/// Smallest accepted ratio `lambda_min / |lambda_max|` of the Hessian on the
/// free coordinates for the second-order flag.
pub const KKT_CURVATURE_RATIO: f64 = 1e-6;

const GRADIENT_TOLERANCE: f64 = 1e-5;

/// First- and second-order optimality flags at `x`.
///
/// `kkt1` holds when the projected gradient satisfies
/// `||g||_inf <= 1e-5 (1 + |f|)`. `kkt2` holds when the finite-difference
/// Hessian restricted to coordinates not at a bound is positive definite by
/// the ratio test against [`KKT_CURVATURE_RATIO`]. With no free coordinates
/// `kkt2` is true.
pub fn kkt_check(
    objective: ObjectiveRef<'_>,
    x: &[f64],
    gradient: Option<GradientRef<'_>>,
    bounds: Option<Bounds<'_>>,
) -> Result<(bool, bool)> {
    let f = objective(x);
    if !f.is_finite() {
        return Err(Error::NonFiniteValue(format!("objective is {f} at the KKT point")));
    }
    let grad = |z: &[f64]| -> Result<Vec<f64>> {
        match gradient {
            Some(g) => g(z),
            None => numerical_gradient(objective, z, GradientMode::Central),
        }
    };
    let g = grad(x)?;
    let kkt1 = norm_inf(&free_gradient(x, &g, bounds)) <= GRADIENT_TOLERANCE * (1.0 + f.abs());

    let free: Vec<usize> =
        (0..x.len()).filter(|&i| bounds.is_none_or(|(lo, hi)| x[i] > lo[i] && x[i] < hi[i])).collect();
    if free.is_empty() {
        return Ok((kkt1, true));
    }
    let m = free.len();
    let mut h = DMatrix::<f64>::zeros(m, m);
    if gradient.is_some() {
        for (col, &j) in free.iter().enumerate() {
            let step = 1e-6 * (1.0 + x[j].abs());
            let mut up = x.to_vec();
            let mut down = x.to_vec();
            up[j] += step;
            down[j] -= step;
            let gu = grad(&up)?;
            let gd = grad(&down)?;
            for (row, &i) in free.iter().enumerate() {
                h[(row, col)] = (gu[i] - gd[i]) / (2.0 * step);
            }
        }
    } else {
        let steps: Vec<f64> = free.iter().map(|&j| 1e-4 * (1.0 + x[j].abs())).collect();
        let at = |shifts: &[(usize, f64)]| {
            let mut z = x.to_vec();
            for &(k, s) in shifts {
                z[free[k]] += s;
            }
            objective(&z)
        };
        for a in 0..m {
            let ha = steps[a];
            h[(a, a)] = (at(&[(a, ha)]) - 2.0 * f + at(&[(a, -ha)])) / (ha * ha);
            for b in 0..a {
                let hb = steps[b];
                let v = (at(&[(a, ha), (b, hb)]) - at(&[(a, ha), (b, -hb)]) - at(&[(a, -ha), (b, hb)])
                    + at(&[(a, -ha), (b, -hb)]))
                    / (4.0 * ha * hb);
                h[(a, b)] = v;
                h[(b, a)] = v;
            }
        }
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue("non-finite Hessian entry".into()));
    }
    let sym = (&h + h.transpose()) * 0.5;
    let eig = sym.symmetric_eigenvalues();
    let lmin = eig.min();
    let lmax = eig.max();
    let kkt2 = lmax > 0.0 && lmin > KKT_CURVATURE_RATIO * lmax.abs();
    Ok((kkt1, kkt2))
}
