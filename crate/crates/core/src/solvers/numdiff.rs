use crate::error::{Error, Result};
use crate::solvers::{GradientMode, GradientRef, ObjectiveRef};

/// Finite-difference gradient. Steps are `1e-7 (1 + |x_i|)` forward and
/// `1e-6 (1 + |x_i|)` central. Probes ignore any bounds, so a probe may land
/// on an infeasible point; a non-finite probe value is an error.
pub fn numerical_gradient(objective: ObjectiveRef<'_>, x: &[f64], mode: GradientMode) -> Result<Vec<f64>> {
    let mut probe = x.to_vec();
    let mut g = Vec::with_capacity(x.len());
    let eval = |p: &[f64]| -> Result<f64> {
        let v = objective(p);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteValue(format!("objective is {v} at a difference probe")))
        }
    };
    match mode {
        GradientMode::Forward => {
            let f0 = eval(x)?;
            for i in 0..x.len() {
                let h = 1e-7 * (1.0 + x[i].abs());
                probe[i] = x[i] + h;
                let f1 = eval(&probe)?;
                probe[i] = x[i];
                g.push((f1 - f0) / h);
            }
        }
        GradientMode::Central | GradientMode::Analytic => {
            for i in 0..x.len() {
                let h = 1e-6 * (1.0 + x[i].abs());
                probe[i] = x[i] + h;
                let up = eval(&probe)?;
                probe[i] = x[i] - h;
                let down = eval(&probe)?;
                probe[i] = x[i];
                g.push((up - down) / (2.0 * h));
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub enum GradientCheck {
    Pass { max_rel_diff: f64 },
    Fail { max_rel_diff: f64, reason: String },
}

impl GradientCheck {
    pub fn passed(&self) -> bool {
        matches!(self, GradientCheck::Pass { .. })
    }
}

/// Compares an analytic gradient with central differences. The difference is
/// measured as `||analytic - numeric||_inf / max(1, ||numeric||_inf)`. Never
/// fails with an error: NaN, infinities and evaluation errors on either side
/// produce [`GradientCheck::Fail`].
pub fn check_gradient(objective: ObjectiveRef<'_>, gradient: GradientRef<'_>, x: &[f64], tol: f64) -> GradientCheck {
    let fail = |reason: String| GradientCheck::Fail { max_rel_diff: f64::NAN, reason };
    let analytic = match gradient(x) {
        Ok(g) => g,
        Err(e) => return fail(format!("analytic gradient failed: {e}")),
    };
    if analytic.len() != x.len() {
        return fail(format!("analytic gradient has length {}", analytic.len()));
    }
    if let Some(i) = analytic.iter().position(|v| !v.is_finite()) {
        return fail(format!("analytic gradient component {i} is {}", analytic[i]));
    }
    let numeric = match numerical_gradient(objective, x, GradientMode::Central) {
        Ok(g) => g,
        Err(e) => return fail(format!("numerical gradient failed: {e}")),
    };
    if let Some(i) = numeric.iter().position(|v| !v.is_finite()) {
        return fail(format!("numerical gradient component {i} is {}", numeric[i]));
    }
    let scale = crate::vecops::norm_inf(&numeric).max(1.0);
    let max_rel_diff = crate::vecops::max_abs_diff(&analytic, &numeric) / scale;
    if max_rel_diff <= tol {
        GradientCheck::Pass { max_rel_diff }
    } else {
        GradientCheck::Fail {
            max_rel_diff,
            reason: format!("max relative difference {max_rel_diff:.3e} exceeds {tol:.1e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{nll, nll_grad, nllrv, nllrv_grad};

    #[test]
    fn central_on_sum_of_squares() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let g = numerical_gradient(&f, &[1.0, 2.0], GradientMode::Central).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-8 && (g[1] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn central_matches_nllrv_analytic() {
        let f = |x: &[f64]| nllrv(x).unwrap_or(f64::INFINITY);
        let x = vec![0.01; 100];
        let num = numerical_gradient(&f, &x, GradientMode::Central).unwrap();
        let ana = nllrv_grad(&x).unwrap();
        for (a, b) in num.iter().zip(&ana) {
            assert!(((a - b) / b).abs() < 1e-5);
        }
    }

    #[test]
    fn forward_difference_hits_nll_safeguard_near_boundary() {
        // sum(y) sits just below 1: a forward probe pushes it over and lands
        // on the f64::MAX plateau, giving a useless gradient.
        let y = [0.5, 0.5 - 1e-9];
        let g = numerical_gradient(&nll, &y, GradientMode::Forward).unwrap();
        assert!(g.iter().any(|v| v.abs() > 1e300));
        let ok = nll_grad(&y).unwrap();
        assert!(ok.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn non_finite_probe_is_an_error() {
        let f = |x: &[f64]| if x[0] > 0.0 { f64::INFINITY } else { 0.0 };
        assert!(matches!(numerical_gradient(&f, &[0.0], GradientMode::Central), Err(Error::NonFiniteValue(_))));
    }

    #[test]
    fn check_gradient_cases() {
        let g = |y: &[f64]| nll_grad(y);
        assert!(check_gradient(&nll, &g, &[0.15; 4], 1e-5).passed());
        let wrong = |y: &[f64]| nll_grad(y).map(|v| v.iter().map(|x| 2.0 * x).collect());
        // Zero gradient at 0.2 would make a doubled gradient pass, so probe
        // off the solution.
        assert!(!check_gradient(&nll, &wrong, &[0.15; 4], 1e-5).passed());
        let nan = |y: &[f64]| Ok(vec![f64::NAN; y.len()]);
        assert!(!check_gradient(&nll, &nan, &[0.15; 4], 1e-5).passed());
        let nan_f = |_: &[f64]| f64::NAN;
        assert!(!check_gradient(&nan_f, &g, &[0.15; 4], 1e-5).passed());
    }
}
