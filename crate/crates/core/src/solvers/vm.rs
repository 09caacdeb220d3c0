use crate::projections::clamp;
use crate::solvers::linesearch::{wolfe_search, LineSearchParams, Outcome};
use crate::solvers::{
    check_bounds, free_gradient, Bounds, ConvergenceCode, Evaluator, GradientRef, ObjectiveRef, SolveReport,
    SolverConfig,
};
use crate::vecops::{dot, is_acceptable, norm2, norm_inf, sub};

const PARAMS: LineSearchParams = LineSearchParams { c1: 1e-4, c2: 0.9, strong: false, max_trials: 60 };

/// Variable metric (BFGS) minimization with an inverse-Hessian
/// approximation started at the identity. Bounds are handled by clamping
/// trial points and freezing coordinates whose gradient pushes outward at an
/// active bound. The metric resets to the identity when it stops producing
/// descent directions.
pub fn vm(
    objective: ObjectiveRef<'_>,
    gradient: Option<GradientRef<'_>>,
    x0: &[f64],
    config: &SolverConfig,
    bounds: Option<Bounds<'_>>,
) -> SolveReport {
    if let Err(e) = config.validate().and_then(|_| check_bounds(x0.len(), bounds)) {
        return SolveReport::not_run(x0, e.to_string());
    }
    let mut eval = match Evaluator::new(objective, gradient, config.gradient_mode) {
        Ok(e) => e,
        Err(e) => return SolveReport::not_run(x0, e.to_string()),
    };
    let n = x0.len();
    let mut x = match bounds {
        Some((lo, hi)) => clamp(x0, lo, hi),
        None => x0.to_vec(),
    };
    let mut f = eval.value(&x);
    if !is_acceptable(f) {
        return eval.report(x, f, 0, ConvergenceCode::NotRun, format!("non-finite value {f} at start"), vec![f]);
    }
    let mut g = match eval.gradient(&x) {
        Ok(g) => g,
        Err(e) => {
            return eval.report(x, f, 0, ConvergenceCode::NotRun, format!("gradient failed at start: {e}"), vec![f])
        }
    };
    let mut history = vec![f];
    let mut h = identity(n);
    let mut fresh = true;

    for iter in 1..=config.max_iterations {
        let pg = free_gradient(&x, &g, bounds);
        if norm_inf(&pg) <= config.g_tolerance {
            return eval.report(x, f, iter - 1, ConvergenceCode::Converged, "gradient below tolerance", history);
        }
        let mut d = mat_vec(&h, &pg, n);
        for i in 0..n {
            d[i] = -d[i];
            if pg[i] == 0.0 {
                d[i] = 0.0;
            }
        }
        if !(dot(&pg, &d) < 0.0) {
            h = identity(n);
            fresh = true;
            d = pg.iter().map(|v| -v).collect();
        }
        let t_init = if fresh && iter == 1 { (1.0 / norm_inf(&pg)).min(1.0) } else { 1.0 };
        match wolfe_search(&mut eval, config.max_function_evals, &x, f, &pg, &d, t_init, bounds, &PARAMS) {
            Outcome::Accepted(a) => {
                let s = sub(&a.x, &x);
                let y = sub(&a.g, &g);
                let sy = dot(&s, &y);
                if sy > 1e-12 * norm2(&s) * norm2(&y) {
                    bfgs_update(&mut h, &s, &y, sy, n);
                    fresh = false;
                }
                x = a.x;
                f = a.f;
                g = a.g;
                history.push(f);
            }
            Outcome::Budget => {
                return eval.report(
                    x,
                    f,
                    iter - 1,
                    ConvergenceCode::LimitReached,
                    "function evaluation limit reached",
                    history,
                )
            }
            Outcome::Failed => {
                if fresh {
                    return eval.report(
                        x,
                        f,
                        iter - 1,
                        ConvergenceCode::LineSearchFailure,
                        "line search failed",
                        history,
                    );
                }
                h = identity(n);
                fresh = true;
            }
        }
        if eval.out_of_budget(config) {
            return eval.report(
                x,
                f,
                iter,
                ConvergenceCode::LimitReached,
                "function evaluation limit reached",
                history,
            );
        }
    }
    eval.report(x, f, config.max_iterations, ConvergenceCode::LimitReached, "iteration limit reached", history)
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec(h: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| dot(&h[i * n..(i + 1) * n], v)).collect()
}

/// `H <- (I - r s y') H (I - r y s') + r s s'` with `r = 1 / s'y`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let r = 1.0 / sy;
    let hy = mat_vec(h, y, n);
    let yhy = dot(y, &hy);
    let c = r * r * yhy + r;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += c * s[i] * s[j] - r * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::{GradientMode, Method};

    fn rosen(x: &[f64]) -> f64 {
        100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
    }

    fn rosen_grad(x: &[f64]) -> crate::Result<Vec<f64>> {
        Ok(vec![-400.0 * x[0] * (x[1] - x[0] * x[0]) - 2.0 * (1.0 - x[0]), 200.0 * (x[1] - x[0] * x[0])])
    }

    #[test]
    fn rosenbrock_2d() {
        let r = vm(&rosen, Some(&rosen_grad), &[-1.2, 1.0], &SolverConfig::new(Method::Vm), None);
        assert_eq!(r.convergence, ConvergenceCode::Converged, "{}", r.message);
        assert!((r.parameters[0] - 1.0).abs() < 1e-6 && (r.parameters[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn active_bound() {
        let f = |x: &[f64]| (x[0] + 1.0).powi(2) + (x[1] - 0.5).powi(2);
        let cfg = SolverConfig::new(Method::Vm).with_gradient_mode(GradientMode::Central);
        let lo = [0.0, 0.0];
        let hi = [1.0, 1.0];
        let r = vm(&f, None, &[0.7, 0.7], &cfg, Some((&lo, &hi)));
        assert_eq!(r.convergence, ConvergenceCode::Converged, "{}", r.message);
        assert_eq!(r.parameters[0], 0.0);
        assert!((r.parameters[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn history_is_monotone() {
        let r = vm(&rosen, Some(&rosen_grad), &[-1.2, 1.0], &SolverConfig::new(Method::Vm), None);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }
}
