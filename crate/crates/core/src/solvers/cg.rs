use crate::projections::clamp;
use crate::solvers::linesearch::{wolfe_search, LineSearchParams, Outcome};
use crate::solvers::{
    check_bounds, free_gradient, Bounds, ConvergenceCode, Evaluator, GradientRef, ObjectiveRef, SolveReport,
    SolverConfig,
};
use crate::vecops::{dot, is_acceptable, norm_inf};

const PARAMS: LineSearchParams = LineSearchParams { c1: 1e-4, c2: 0.1, strong: true, max_trials: 60 };

/// Nonlinear conjugate gradients (Polak-Ribiere with nonnegative beta).
/// Restarts along steepest descent every `n` steps, when successive
/// gradients lose orthogonality, and after a failed line search.
pub fn cg(
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
    let g = match eval.gradient(&x) {
        Ok(g) => g,
        Err(e) => {
            return eval.report(x, f, 0, ConvergenceCode::NotRun, format!("gradient failed at start: {e}"), vec![f])
        }
    };
    let mut history = vec![f];
    let mut pg = free_gradient(&x, &g, bounds);
    let mut d: Vec<f64> = pg.iter().map(|v| -v).collect();
    let mut steepest = true;
    let mut since_restart = 0;
    let mut prev: Option<(f64, f64)> = None;

    for iter in 1..=config.max_iterations {
        if norm_inf(&pg) <= config.g_tolerance {
            return eval.report(x, f, iter - 1, ConvergenceCode::Converged, "gradient below tolerance", history);
        }
        for i in 0..n {
            if pg[i] == 0.0 {
                d[i] = 0.0;
            }
        }
        let mut slope = dot(&pg, &d);
        if !(slope < 0.0) {
            d = pg.iter().map(|v| -v).collect();
            steepest = true;
            since_restart = 0;
            slope = dot(&pg, &d);
        }
        let t_init = match prev {
            Some((t, s)) if !steepest || s != 0.0 => (t * s / slope).clamp(1e-10, 1e10),
            _ => (1.0 / norm_inf(&pg)).min(1.0),
        };
        match wolfe_search(&mut eval, config.max_function_evals, &x, f, &pg, &d, t_init, bounds, &PARAMS) {
            Outcome::Accepted(a) => {
                let pg_new = free_gradient(&a.x, &a.g, bounds);
                prev = Some((a.step, slope));
                x = a.x;
                f = a.f;
                history.push(f);
                since_restart += 1;
                let gg = dot(&pg, &pg);
                let orth_lost = dot(&pg_new, &pg).abs() >= 0.2 * dot(&pg_new, &pg_new);
                if since_restart >= n || orth_lost || gg == 0.0 {
                    d = pg_new.iter().map(|v| -v).collect();
                    steepest = true;
                    since_restart = 0;
                } else {
                    let beta = (dot(&pg_new, &pg_new) - dot(&pg_new, &pg)) / gg;
                    let beta = beta.max(0.0);
                    d = pg_new.iter().zip(&d).map(|(gi, di)| -gi + beta * di).collect();
                    steepest = false;
                }
                pg = pg_new;
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
                if steepest {
                    return eval.report(
                        x,
                        f,
                        iter - 1,
                        ConvergenceCode::LineSearchFailure,
                        "line search failed",
                        history,
                    );
                }
                d = pg.iter().map(|v| -v).collect();
                steepest = true;
                since_restart = 0;
                prev = None;
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
