use std::collections::VecDeque;

use crate::projections::Projection;
use crate::solvers::{ConvergenceCode, Evaluator, GradientRef, ObjectiveRef, SolveReport, SolverConfig};
use crate::vecops::{axpy, dot, is_acceptable, norm_inf, sub};

const SUFFICIENT_DECREASE: f64 = 1e-4;
const SIGMA_LOW: f64 = 0.1;
const SIGMA_HIGH: f64 = 0.9;

/// Spectral projected gradient with a nonmonotone line search.
///
/// Each iteration moves along `d = P(x - lambda g) - x`, where `lambda` is
/// the Barzilai-Borwein step `s's / s'y` clipped to
/// `config.bb_step_bounds`. A trial point `P(x + alpha d)` is accepted when
/// its value is at most the largest of the last `config.step_memory` accepted
/// values plus `1e-4 alpha g'd`; otherwise `alpha` shrinks by safeguarded
/// quadratic interpolation. Every iterate is a fixed point of `P`.
///
/// With a nonconvex projection (the signed sphere) `d` can point uphill even
/// though `P(x - lambda g)` is a good point. The full projected step is then
/// taken if it lowers the reference value by `1e-4 lambda ||g||^2`; otherwise
/// `lambda` is divided by 10 and the direction recomputed.
///
/// Converges (code 0) exactly when `||P(x - g) - x||_inf <= g_tolerance`.
pub fn spg(
    objective: ObjectiveRef<'_>,
    gradient: Option<GradientRef<'_>>,
    projection: &Projection,
    x0: &[f64],
    config: &SolverConfig,
) -> SolveReport {
    if let Err(e) = config.validate() {
        return SolveReport::not_run(x0, e.to_string());
    }
    let mut eval = match Evaluator::new(objective, gradient, config.gradient_mode) {
        Ok(e) => e,
        Err(e) => return SolveReport::not_run(x0, e.to_string()),
    };
    let (lambda_min, lambda_max) = config.bb_step_bounds;

    let mut x = match projection.apply(x0) {
        Ok(x) => x,
        Err(e) => return SolveReport::not_run(x0, format!("projection of start failed: {e}")),
    };
    let mut f = eval.value(&x);
    if !is_acceptable(f) {
        let mut r = eval.report(x, f, 0, ConvergenceCode::NotRun, "", vec![f]);
        r.message = format!("non-finite value {f} at projected start");
        return r;
    }
    let mut g = match eval.gradient(&x) {
        Ok(g) => g,
        Err(e) => {
            return eval.report(x, f, 0, ConvergenceCode::NotRun, format!("gradient failed at start: {e}"), vec![f])
        }
    };
    let mut history = vec![f];
    let mut recent: VecDeque<f64> = VecDeque::from([f]);

    let pg_norm =
        |x: &[f64], g: &[f64]| -> Option<f64> { projection.apply(&sub(x, g)).ok().map(|p| norm_inf(&sub(&p, x))) };
    let Some(mut pginf) = pg_norm(&x, &g) else {
        return eval.report(x, f, 0, ConvergenceCode::NotRun, "projection failed", history);
    };
    if pginf <= config.g_tolerance {
        return eval.report(x, f, 0, ConvergenceCode::Converged, "projected gradient below tolerance", history);
    }
    let mut lambda = (1.0 / pginf).clamp(lambda_min, lambda_max);

    for iter in 1..=config.max_iterations {
        let f_max = recent.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut step = lambda;
        let outcome = loop {
            let d = match projection.apply(&axpy(&x, -step, &g)) {
                Ok(p) => sub(&p, &x),
                Err(e) => break Step::Failed(format!("projection failed: {e}")),
            };
            let dd = dot(&d, &d);
            let gtd = dot(&g, &d);
            if dd == 0.0 {
                break Step::Failed("projected step is zero".into());
            }
            let magnitude: f64 = g.iter().zip(&d).map(|(a, b)| (a * b).abs()).sum();
            if gtd < 0.0 {
                break line_search(&mut eval, config, projection, &x, f, f_max, &d, gtd);
            }
            if gtd <= 64.0 * f64::EPSILON * magnitude {
                // Cancellation in g'd; use the bound that holds for convex sets.
                break line_search(&mut eval, config, projection, &x, f, f_max, &d, -dd / step);
            }
            // Uphill direction from a nonconvex projection: accept the full
            // projected step only if it beats the gradient-step decrease.
            if eval.out_of_budget(config) {
                break Step::Budget;
            }
            let trial = axpy(&x, 1.0, &d);
            let trial = projection.apply(&trial).unwrap_or(trial);
            let f_trial = eval.value(&trial);
            if is_acceptable(f_trial) && f_trial <= f_max - SUFFICIENT_DECREASE * step * dot(&g, &g) {
                break Step::Accepted(trial, f_trial);
            }
            if step * 0.1 < lambda_min {
                break Step::Failed("projected direction is not a descent direction".into());
            }
            step *= 0.1;
        };
        let (x_new, f_new) = match outcome {
            Step::Accepted(x_new, f_new) => (x_new, f_new),
            Step::Budget => {
                return eval.report(
                    x,
                    f,
                    iter - 1,
                    ConvergenceCode::LimitReached,
                    "function evaluation limit reached",
                    history,
                )
            }
            Step::Failed(msg) => return eval.report(x, f, iter - 1, ConvergenceCode::LineSearchFailure, msg, history),
        };
        let g_new = match eval.gradient(&x_new) {
            Ok(g) => g,
            Err(e) => {
                return eval.report(
                    x,
                    f,
                    iter - 1,
                    ConvergenceCode::LineSearchFailure,
                    format!("gradient failed: {e}"),
                    history,
                )
            }
        };

        let s = sub(&x_new, &x);
        let y = sub(&g_new, &g);
        let sts = dot(&s, &s);
        let sty = dot(&s, &y);
        lambda = if sty <= 0.0 { lambda_max } else { (sts / sty).clamp(lambda_min, lambda_max) };

        x = x_new;
        f = f_new;
        g = g_new;
        history.push(f);
        recent.push_back(f);
        if recent.len() > config.step_memory {
            recent.pop_front();
        }

        match pg_norm(&x, &g) {
            Some(p) => pginf = p,
            None => return eval.report(x, f, iter, ConvergenceCode::LineSearchFailure, "projection failed", history),
        }
        if pginf <= config.g_tolerance {
            return eval.report(x, f, iter, ConvergenceCode::Converged, "projected gradient below tolerance", history);
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

enum Step {
    Accepted(Vec<f64>, f64),
    Budget,
    Failed(String),
}

/// Nonmonotone backtracking on `P(x + alpha d)` from `alpha = 1`.
#[allow(clippy::too_many_arguments)]
fn line_search(
    eval: &mut Evaluator<'_>,
    config: &SolverConfig,
    projection: &Projection,
    x: &[f64],
    f: f64,
    f_max: f64,
    d: &[f64],
    gtd: f64,
) -> Step {
    let mut alpha = 1.0;
    loop {
        if eval.out_of_budget(config) {
            return Step::Budget;
        }
        let trial = match projection.apply(&axpy(x, alpha, d)) {
            Ok(t) => t,
            Err(_) => {
                alpha *= 0.5;
                continue;
            }
        };
        let f_trial = eval.value(&trial);
        if is_acceptable(f_trial) && f_trial <= f_max + SUFFICIENT_DECREASE * alpha * gtd {
            return Step::Accepted(trial, f_trial);
        }
        alpha = if is_acceptable(f_trial) {
            let denom = 2.0 * (f_trial - f - alpha * gtd);
            let t = if denom > 0.0 { -gtd * alpha * alpha / denom } else { -1.0 };
            if t >= SIGMA_LOW && t <= SIGMA_HIGH * alpha {
                t
            } else {
                0.5 * alpha
            }
        } else {
            0.5 * alpha
        };
        if alpha * norm_inf(d) <= f64::EPSILON * (1.0 + norm_inf(x)) {
            return Step::Failed("line search step underflow".into());
        }
    }
}
