//! Projections onto the feasible sets used with the spectral projected
//! gradient method.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::transforms::leading_sign;
use crate::vecops::norm2;

/// `x / sum(x)`. Collinear with `x`, sums to one. A vector whose sum is one
/// up to summation rounding is returned unchanged.
pub fn project_unit_sum(x: &[f64]) -> Result<Vec<f64>> {
    let s: f64 = x.iter().sum();
    if s == 0.0 {
        return Err(Error::DegenerateInput("cannot scale a zero-sum vector to unit sum".into()));
    }
    let magnitude: f64 = x.iter().map(|v| v.abs()).sum();
    if (s - 1.0).abs() <= x.len() as f64 * f64::EPSILON * magnitude {
        return Ok(x.to_vec());
    }
    Ok(x.iter().map(|v| v / s).collect())
}

/// Euclidean projection onto `{x : x >= 0, sum(x) = 1}` by the sort-based
/// threshold rule.
pub fn project_simplex(y: &[f64]) -> Vec<f64> {
    if y.is_empty() {
        return Vec::new();
    }
    let mut sorted = y.to_vec();
    // Stable descending sort. Ties do not change the threshold.
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, v) in sorted.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if *v > t {
            theta = t;
        }
    }
    y.iter().map(|v| (v - theta).max(0.0)).collect()
}

/// `sign * x / ||x||` where `sign` makes the first nonzero entry positive.
pub fn project_sphere_signed(x: &[f64]) -> Result<Vec<f64>> {
    let nrm = norm2(x);
    if nrm == 0.0 {
        return Err(Error::DegenerateInput("cannot project the zero vector onto the sphere".into()));
    }
    let c = leading_sign(x) / nrm;
    Ok(x.iter().map(|v| v * c).collect())
}

/// `x / ||x||`
pub fn project_sphere_unsigned(x: &[f64]) -> Result<Vec<f64>> {
    let nrm = norm2(x);
    if nrm == 0.0 {
        return Err(Error::DegenerateInput("cannot project the zero vector onto the sphere".into()));
    }
    Ok(x.iter().map(|v| v / nrm).collect())
}

/// Elementwise clamp to `[lower, upper]`.
pub fn project_box(x: &[f64], lower: &[f64], upper: &[f64]) -> Result<Vec<f64>> {
    check_len(x.len(), lower.len())?;
    check_len(x.len(), upper.len())?;
    if let Some(i) = (0..x.len()).find(|&i| !(lower[i] <= upper[i])) {
        return Err(Error::InvalidBounds(format!("lower[{i}] = {} exceeds upper[{i}] = {}", lower[i], upper[i])));
    }
    Ok(clamp(x, lower, upper))
}

pub(crate) fn clamp(x: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x.iter().zip(lower.iter().zip(upper)).map(|(v, (l, u))| v.max(*l).min(*u)).collect()
}

type ApplyFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// A named projection.
#[derive(Clone)]
pub struct Projection {
    pub name: String,
    apply: ApplyFn,
}

impl fmt::Debug for Projection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Projection").field("name", &self.name).finish()
    }
}

impl Projection {
    pub fn new(name: impl Into<String>, apply: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static) -> Self {
        Self { name: name.into(), apply: Arc::new(apply) }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        (self.apply)(x)
    }

    pub fn identity() -> Self {
        Self::new("identity", |x| Ok(x.to_vec()))
    }

    pub fn unit_sum() -> Self {
        Self::new("unit-sum", project_unit_sum)
    }

    pub fn simplex() -> Self {
        Self::new("simplex", |x| Ok(project_simplex(x)))
    }

    pub fn sphere_signed() -> Self {
        Self::new("sphere-signed", project_sphere_signed)
    }

    pub fn sphere() -> Self {
        Self::new("sphere", project_sphere_unsigned)
    }

    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        project_box(&lower, &lower, &upper)?;
        Ok(Self::new("box", move |x| project_box(x, &lower, &upper)))
    }

    /// `unit-sum`, `simplex`, `sphere-signed`, `sphere` or `identity`. The
    /// box projection needs bounds; see [`Projection::boxed`].
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "unit-sum" => Ok(Self::unit_sum()),
            "simplex" => Ok(Self::simplex()),
            "sphere-signed" => Ok(Self::sphere_signed()),
            "sphere" => Ok(Self::sphere()),
            "identity" | "none" => Ok(Self::identity()),
            other => Err(Error::UnknownName(format!("projection {other}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        crate::vecops::max_abs_diff(a, b) <= tol
    }

    #[test]
    fn unit_sum_examples() {
        assert_eq!(project_unit_sum(&[2.0, 2.0]).unwrap(), vec![0.5, 0.5]);
        let x = vec![0.01; 100];
        assert!(close(&project_unit_sum(&x).unwrap(), &x, 1e-15));
        assert!(close(&project_unit_sum(&[1.0, 2.0, 3.0, 4.0]).unwrap(), &[0.1, 0.2, 0.3, 0.4], 1e-15));
        assert!(project_unit_sum(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn simplex_examples() {
        assert!(close(&project_simplex(&[0.5, 0.3, 0.2]), &[0.5, 0.3, 0.2], 1e-15));
        assert_eq!(project_simplex(&[2.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn simplex_matches_grid_oracle() {
        // Brute force over a grid of the 3-simplex with spacing 1/3000.
        let y = [0.9, 0.4, 0.2];
        let steps = 3000;
        let mut best = (f64::INFINITY, [0.0; 3]);
        for i in 0..=steps {
            for j in 0..=steps - i {
                let z = [i as f64 / steps as f64, j as f64 / steps as f64, (steps - i - j) as f64 / steps as f64];
                let d: f64 = z.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
                if d < best.0 {
                    best = (d, z);
                }
            }
        }
        let p = project_simplex(&y);
        assert!(close(&p, &best.1, 1.0 / steps as f64));
        // Frozen from the oracle and the KKT conditions: theta = 1/6.
        assert!(close(&p, &[0.7333333333333334, 0.23333333333333334, 0.033333333333333326], 1e-12));
        // KKT: y - p = theta on the support, and y_i <= theta off it.
        let theta = y[0] - p[0];
        for (yi, pi) in y.iter().zip(&p) {
            if *pi > 0.0 {
                assert!((yi - pi - theta).abs() < 1e-12);
            } else {
                assert!(*yi <= theta);
            }
        }
    }

    #[test]
    fn sphere_examples() {
        let x: Vec<f64> = (1..=6).map(|i| i as f64 / 10.0).collect();
        let p = project_sphere_signed(&x).unwrap();
        let want = [0.1048285, 0.209657, 0.3144855, 0.4193139, 0.5241424, 0.6289709];
        assert!(close(&p, &want, 5e-7));
        assert_eq!(project_sphere_signed(&[-3.0, 0.0]).unwrap(), vec![1.0, 0.0]);
        let q = project_sphere_signed(&[0.0, 2.0]).unwrap();
        assert_eq!(q, vec![0.0, 1.0]);
        assert_eq!(project_sphere_signed(&q).unwrap(), q);
        assert!(project_sphere_signed(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn unsigned_sphere_examples() {
        assert!(close(&project_sphere_unsigned(&[3.0, 4.0]).unwrap(), &[0.6, 0.8], 1e-15));
        assert_eq!(project_sphere_unsigned(&[-3.0, 0.0]).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(project_sphere_unsigned(&[0.6, 0.8]).unwrap(), vec![0.6, 0.8]);
        assert!(project_sphere_unsigned(&[0.0]).is_err());
    }

    #[test]
    fn box_examples() {
        let lo = [0.0; 3];
        let hi = [1.0; 3];
        assert_eq!(project_box(&[-1.0, 0.5, 2.0], &lo, &hi).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(project_box(&[0.2, 0.5, 0.7], &lo, &hi).unwrap(), vec![0.2, 0.5, 0.7]);
        assert_eq!(project_box(&lo, &lo, &hi).unwrap(), lo.to_vec());
        assert!(matches!(project_box(&[0.0], &[1.0], &[0.0]), Err(Error::InvalidBounds(_))));
    }

    #[test]
    fn by_name_lookup() {
        for name in ["unit-sum", "simplex", "sphere-signed", "sphere", "identity"] {
            assert_eq!(Projection::by_name(name).unwrap().name, name);
        }
        assert!(Projection::by_name("dykstra").is_err());
    }
}
