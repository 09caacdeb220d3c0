use crate::solvers::{ConvergenceCode, Evaluator, ObjectiveRef, SolveReport, SolverConfig};
use crate::vecops::is_acceptable;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Derivative-free Nelder-Mead simplex search.
///
/// The initial simplex adds `0.1 * max|x0|` (or 0.1 when `x0` is zero) to
/// each coordinate in turn. Unacceptable values are treated as `+inf`.
/// Stops when `f_max - f_min <= f_tol * (|f_min| + f_tol)`.
pub fn nelder_mead(objective: ObjectiveRef<'_>, x0: &[f64], config: &SolverConfig) -> SolveReport {
    if let Err(e) = config.validate() {
        return SolveReport::not_run(x0, e.to_string());
    }
    let mut eval = Evaluator::value_only(objective);
    let n = x0.len();
    if n == 0 {
        return SolveReport::not_run(x0, "empty parameter vector");
    }
    let value = |eval: &mut Evaluator<'_>, x: &[f64]| {
        let f = eval.value(x);
        if is_acceptable(f) {
            f
        } else {
            f64::INFINITY
        }
    };
    let f0 = value(&mut eval, x0);
    if !f0.is_finite() {
        return eval.report(x0.to_vec(), f0, 0, ConvergenceCode::NotRun, "non-finite value at start", vec![f0]);
    }
    let scale = x0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let step = if scale > 0.0 { 0.1 * scale } else { 0.1 };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f0)];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step;
        let fv = value(&mut eval, &v);
        simplex.push((v, fv));
    }
    let mut history = vec![f0];

    for iter in 1..=config.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[n].1;
        if history.last() != Some(&f_best) {
            history.push(f_best);
        }
        if f_worst - f_best <= config.f_tolerance * (f_best.abs() + config.f_tolerance) {
            let (x, f) = simplex.swap_remove(0);
            return eval.report(x, f, iter - 1, ConvergenceCode::Converged, "simplex spread below tolerance", history);
        }
        if eval.out_of_budget(config) {
            let (x, f) = simplex.swap_remove(0);
            return eval.report(
                x,
                f,
                iter - 1,
                ConvergenceCode::LimitReached,
                "function evaluation limit reached",
                history,
            );
        }

        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, vi) in centroid.iter_mut().zip(v) {
                *c += vi / n as f64;
            }
        }
        let toward =
            |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = toward(REFLECT);
        let fr = value(&mut eval, &xr);
        if fr < f_best {
            let xe = toward(REFLECT * EXPAND);
            let fe = value(&mut eval, &xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < f_worst {
            let xc = toward(REFLECT * CONTRACT);
            let fc = value(&mut eval, &xc);
            (xc, fc)
        } else {
            let xc = toward(-CONTRACT);
            let fc = value(&mut eval, &xc);
            (xc, fc)
        };
        if fc < fr.min(f_worst) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = best.iter().zip(&vertex.0).map(|(b, w)| b + SHRINK * (w - b)).collect();
            let fv = value(&mut eval, &v);
            *vertex = (v, fv);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    eval.report(x, f, config.max_iterations, ConvergenceCode::LimitReached, "iteration limit reached", history)
}
