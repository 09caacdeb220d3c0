//! Line search along a box-clamped path, shared by the variable-metric and
//! conjugate-gradient methods.

use crate::projections::clamp;
use crate::solvers::{Bounds, Evaluator};
use crate::vecops::{axpy, dot, is_acceptable};

pub(crate) struct LineSearchParams {
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant; the strong condition `|phi'(t)| <= c2 |phi'(0)|`
    /// is used when `strong` is set, otherwise `phi'(t) >= c2 phi'(0)`.
    pub c2: f64,
    pub strong: bool,
    pub max_trials: usize,
}

pub(crate) struct Accepted {
    pub x: Vec<f64>,
    pub f: f64,
    pub g: Vec<f64>,
    pub step: f64,
}

pub(crate) enum Outcome {
    Accepted(Accepted),
    /// No trial point satisfied sufficient decrease.
    Failed,
    /// The evaluation budget ran out mid-search.
    Budget,
}

/// Trial point `clamp(x + t d)`, or `x + t d` without bounds.
fn trial(x: &[f64], t: f64, d: &[f64], bounds: Option<Bounds<'_>>) -> Vec<f64> {
    let raw = axpy(x, t, d);
    match bounds {
        Some((lo, hi)) => clamp(&raw, lo, hi),
        None => raw,
    }
}

/// Directional derivative along the clamped path at `xt`: coordinates pinned
/// at a bound do not move.
fn path_slope(xt: &[f64], g: &[f64], d: &[f64], bounds: Option<Bounds<'_>>) -> f64 {
    match bounds {
        None => dot(g, d),
        Some((lo, hi)) => (0..xt.len())
            .filter(|&i| !((xt[i] <= lo[i] && d[i] < 0.0) || (xt[i] >= hi[i] && d[i] > 0.0)))
            .map(|i| g[i] * d[i])
            .sum(),
    }
}

/// Relative band around `phi(0)` inside which sufficient decrease is judged
/// from the slope instead of the value.
const APPROXIMATE_EPSILON: f64 = 1e-12;

/// Bracketing search for a step satisfying the Wolfe conditions. Rejected
/// trial values (non-finite or the `f64::MAX` plateau) shrink the step.
/// Near the level of `phi(0)`, where values no longer resolve the decrease,
/// the approximate condition `phi'(t) <= (2 c1 - 1) phi'(0)` stands in for
/// sufficient decrease.
/// When the curvature condition cannot be met within the trial budget the
/// best point satisfying sufficient decrease is returned.
#[allow(clippy::too_many_arguments)]
pub(crate) fn wolfe_search(
    eval: &mut Evaluator<'_>,
    max_fevals: usize,
    x: &[f64],
    f0: f64,
    g0: &[f64],
    d: &[f64],
    t_init: f64,
    bounds: Option<Bounds<'_>>,
    params: &LineSearchParams,
) -> Outcome {
    let slope0 = dot(g0, d);
    if !(slope0 < 0.0) {
        return Outcome::Failed;
    }
    let mut lo = 0.0;
    let mut hi = f64::INFINITY;
    let mut t = t_init;
    let mut best: Option<Accepted> = None;

    for _ in 0..params.max_trials {
        if eval.fevals >= max_fevals {
            return best.map_or(Outcome::Budget, Outcome::Accepted);
        }
        let xt = trial(x, t, d, bounds);
        if xt.iter().zip(x).all(|(a, b)| a == b) {
            // Step too small to move any coordinate.
            break;
        }
        let ft = eval.value(&xt);
        let decrease = dot(g0, &crate::vecops::sub(&xt, x));
        let armijo = is_acceptable(ft) && ft <= f0 + params.c1 * decrease && !(ft >= f0 && decrease == 0.0);
        let level = is_acceptable(ft) && ft <= f0 + APPROXIMATE_EPSILON * f0.abs();
        if !armijo && !level {
            hi = t;
            t = if lo == 0.0 && is_acceptable(ft) {
                // Quadratic interpolation from phi(0), phi'(0), phi(t).
                let denom = 2.0 * (ft - f0 - slope0 * t);
                let tq = if denom > 0.0 { -slope0 * t * t / denom } else { 0.5 * t };
                tq.clamp(0.1 * t, 0.5 * t)
            } else if lo == 0.0 {
                0.2 * t
            } else {
                0.5 * (lo + hi)
            };
            continue;
        }
        let gt = match eval.gradient(&xt) {
            Ok(g) if g.iter().all(|v| v.is_finite()) => g,
            _ => {
                hi = t;
                t = 0.5 * (lo + hi);
                continue;
            }
        };
        let slope = path_slope(&xt, &gt, d, bounds);
        if !armijo && slope > (2.0 * params.c1 - 1.0) * slope0 {
            // Approximate sufficient decrease fails: the step overshoots.
            hi = t;
            t = 0.5 * (lo + hi);
            continue;
        }
        let candidate = Accepted { x: xt, f: ft, g: gt, step: t };
        if slope < params.c2 * slope0 {
            // Still descending steeply: the step is too short.
            lo = t;
            let better = best.as_ref().is_none_or(|b| candidate.f < b.f);
            if better {
                best = Some(candidate);
            }
            t = if hi.is_finite() { 0.5 * (lo + hi) } else { 4.0 * t };
        } else if params.strong && slope > -params.c2 * slope0 {
            hi = t;
            let better = best.as_ref().is_none_or(|b| candidate.f < b.f);
            if better {
                best = Some(candidate);
            }
            t = 0.5 * (lo + hi);
        } else {
            return Outcome::Accepted(candidate);
        }
    }
    best.map_or(Outcome::Failed, Outcome::Accepted)
}
