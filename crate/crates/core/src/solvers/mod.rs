//! Optimizers and diagnostics.
//!
//! All solvers share [`SolverConfig`] and return a [`SolveReport`]. They work
//! on plain closures so that tests can wrap objectives with counters; the
//! [`solve`] entry point runs a [`Problem`] end to end and fills in the KKT
//! flags.

mod cg;
mod kkt;
mod linesearch;
mod nelder_mead;
mod numdiff;
mod qp;
mod spg;
mod vm;

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::projections::Projection;

pub use cg::cg;
pub use kkt::{kkt_check, KKT_CURVATURE_RATIO};
pub use nelder_mead::nelder_mead;
pub use numdiff::{check_gradient, numerical_gradient, GradientCheck};
pub use qp::{solve_eq_qp, QpSolution};
pub use spg::spg;
pub use vm::vm;

/// Largest parameter count for which [`solve`] computes KKT flags; the
/// finite-difference Hessian grows quadratically.
pub const KKT_MAX_DIM: usize = 500;

pub type ObjectiveRef<'a> = &'a dyn Fn(&[f64]) -> f64;
pub type GradientRef<'a> = &'a dyn Fn(&[f64]) -> Result<Vec<f64>>;
pub type Bounds<'a> = (&'a [f64], &'a [f64]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Spg,
    Vm,
    Cg,
    NelderMead,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Spg => "spg",
            Method::Vm => "vm",
            Method::Cg => "cg",
            Method::NelderMead => "nm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spg" => Ok(Method::Spg),
            "vm" => Ok(Method::Vm),
            "cg" => Ok(Method::Cg),
            "nm" | "nelder-mead" => Ok(Method::NelderMead),
            other => Err(Error::UnknownName(format!("method {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    Analytic,
    Forward,
    Central,
}

impl GradientMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GradientMode::Analytic => "analytic",
            GradientMode::Forward => "forward",
            GradientMode::Central => "central",
        }
    }
}

impl fmt::Display for GradientMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GradientMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(GradientMode::Analytic),
            "forward" => Ok(GradientMode::Forward),
            "central" => Ok(GradientMode::Central),
            other => Err(Error::UnknownName(format!("gradient mode {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub max_iterations: usize,
    pub max_function_evals: usize,
    pub gradient_mode: GradientMode,
    /// Relative objective tolerance (Nelder-Mead simplex spread).
    pub f_tolerance: f64,
    /// Infinity-norm tolerance on the projected gradient.
    pub g_tolerance: f64,
    /// SPG nonmonotone history length.
    pub step_memory: usize,
    pub bb_step_bounds: (f64, f64),
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Vm,
            max_iterations: 1500,
            max_function_evals: 10_000,
            gradient_mode: GradientMode::Analytic,
            f_tolerance: 1e-10,
            g_tolerance: 1e-7,
            step_memory: 10,
            bb_step_bounds: (1e-10, 1e10),
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    pub fn with_gradient_mode(mut self, mode: GradientMode) -> Self {
        self.gradient_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f_tolerance > 0.0 && self.g_tolerance > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.step_memory == 0 {
            return Err(Error::InvalidArgument("step memory must be at least 1".into()));
        }
        let (lo, hi) = self.bb_step_bounds;
        if !(lo > 0.0 && lo <= hi) {
            return Err(Error::InvalidArgument("invalid spectral step bounds".into()));
        }
        Ok(())
    }
}

/// Termination status: 0 converged, 1 limit reached, 2 line-search failure,
/// 9999 not run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceCode {
    Converged,
    LimitReached,
    LineSearchFailure,
    NotRun,
}

impl ConvergenceCode {
    pub fn code(self) -> i32 {
        match self {
            ConvergenceCode::Converged => 0,
            ConvergenceCode::LimitReached => 1,
            ConvergenceCode::LineSearchFailure => 2,
            ConvergenceCode::NotRun => 9999,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    /// Terminal parameters in the solver's own coordinates.
    pub parameters: Vec<f64>,
    pub value: f64,
    pub fevals: usize,
    pub gevals: usize,
    pub hevals: usize,
    pub iterations: usize,
    pub convergence: ConvergenceCode,
    pub kkt1: Option<bool>,
    pub kkt2: Option<bool>,
    pub wall_time_seconds: f64,
    pub message: String,
    /// Objective value after each accepted step, starting with the initial
    /// point.
    pub history: Vec<f64>,
}

impl SolveReport {
    pub(crate) fn not_run(x0: &[f64], message: impl Into<String>) -> Self {
        Self {
            parameters: x0.to_vec(),
            value: f64::NAN,
            fevals: 0,
            gevals: 0,
            hevals: 0,
            iterations: 0,
            convergence: ConvergenceCode::NotRun,
            kkt1: None,
            kkt2: None,
            wall_time_seconds: 0.0,
            message: message.into(),
            history: Vec::new(),
        }
    }
}

/// Counts objective and gradient invocations and supplies gradients in the
/// configured mode. Finite-difference probes count as objective
/// evaluations.
pub(crate) struct Evaluator<'a> {
    objective: ObjectiveRef<'a>,
    gradient: Option<GradientRef<'a>>,
    mode: GradientMode,
    pub fevals: usize,
    pub gevals: usize,
    start: Instant,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: ObjectiveRef<'a>, gradient: Option<GradientRef<'a>>, mode: GradientMode) -> Result<Self> {
        if mode == GradientMode::Analytic && gradient.is_none() {
            return Err(Error::InvalidArgument("analytic gradient requested but none supplied".into()));
        }
        Ok(Self { objective, gradient, mode, fevals: 0, gevals: 0, start: Instant::now() })
    }

    /// Evaluator that never needs a gradient.
    pub fn value_only(objective: ObjectiveRef<'a>) -> Self {
        Self { objective, gradient: None, mode: GradientMode::Central, fevals: 0, gevals: 0, start: Instant::now() }
    }

    pub fn value(&mut self, x: &[f64]) -> f64 {
        self.fevals += 1;
        (self.objective)(x)
    }

    pub fn gradient(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.gevals += 1;
        match self.mode {
            GradientMode::Analytic => (self.gradient.expect("checked in new"))(x),
            mode => {
                let objective = self.objective;
                let probes = Cell::new(0);
                let g = numerical_gradient(
                    &|z: &[f64]| {
                        probes.set(probes.get() + 1);
                        objective(z)
                    },
                    x,
                    mode,
                );
                self.fevals += probes.get();
                g
            }
        }
    }

    pub fn report(
        &self,
        parameters: Vec<f64>,
        value: f64,
        iterations: usize,
        convergence: ConvergenceCode,
        message: impl Into<String>,
        history: Vec<f64>,
    ) -> SolveReport {
        SolveReport {
            parameters,
            value,
            fevals: self.fevals,
            gevals: self.gevals,
            hevals: 0,
            iterations,
            convergence,
            kkt1: None,
            kkt2: None,
            wall_time_seconds: self.start.elapsed().as_secs_f64(),
            message: message.into(),
            history,
        }
    }

    pub fn out_of_budget(&self, config: &SolverConfig) -> bool {
        self.fevals >= config.max_function_evals
    }
}

/// Projected gradient for box constraints: components that push outward at
/// an active bound are zeroed.
pub(crate) fn free_gradient(x: &[f64], g: &[f64], bounds: Option<Bounds<'_>>) -> Vec<f64> {
    match bounds {
        None => g.to_vec(),
        Some((lo, hi)) => x
            .iter()
            .zip(g)
            .enumerate()
            .map(|(i, (xi, gi))| if (*xi <= lo[i] && *gi > 0.0) || (*xi >= hi[i] && *gi < 0.0) { 0.0 } else { *gi })
            .collect(),
    }
}

pub(crate) fn check_bounds(n: usize, bounds: Option<Bounds<'_>>) -> Result<()> {
    if let Some((lo, hi)) = bounds {
        crate::error::check_len(n, lo.len())?;
        crate::error::check_len(n, hi.len())?;
        if lo.iter().zip(hi).any(|(l, u)| !(l <= u)) {
            return Err(Error::InvalidBounds("lower bound exceeds upper bound".into()));
        }
    }
    Ok(())
}

/// Runs `config.method` on `problem` from `x0` (the problem's default start
/// when `None`). SPG uses `projection`, or the problem's box when no
/// projection is given. KKT flags are computed for the unprojected methods
/// on problems with at most [`KKT_MAX_DIM`] parameters.
pub fn solve(
    problem: &Problem,
    config: &SolverConfig,
    projection: Option<&Projection>,
    x0: Option<&[f64]>,
) -> SolveReport {
    let x0 = x0.unwrap_or(&problem.default_start);
    if x0.len() != problem.dim {
        return SolveReport::not_run(x0, format!("start has length {}, problem needs {}", x0.len(), problem.dim));
    }
    let objective = problem.objective_fn();
    let gradient_fn = problem.gradient_fn();
    let f = |x: &[f64]| objective(x);
    let g_holder;
    let g: Option<GradientRef<'_>> = match &gradient_fn {
        Some(gf) => {
            g_holder = move |x: &[f64]| gf(x);
            Some(&g_holder)
        }
        None => None,
    };
    let bounds = problem.bounds();

    let mut report = match config.method {
        Method::Spg => {
            let proj = match (projection, bounds) {
                (Some(p), _) => p.clone(),
                (None, Some((lo, hi))) => match Projection::boxed(lo.to_vec(), hi.to_vec()) {
                    Ok(p) => p,
                    Err(e) => return SolveReport::not_run(x0, e.to_string()),
                },
                (None, None) => Projection::identity(),
            };
            spg(&f, g, &proj, x0, config)
        }
        Method::Vm => vm(&f, g, x0, config, bounds),
        Method::Cg => cg(&f, g, x0, config, bounds),
        Method::NelderMead => nelder_mead(&f, x0, config),
    };

    let projected = config.method == Method::Spg && projection.is_some_and(|p| p.name != "identity" && p.name != "box");
    if report.convergence != ConvergenceCode::NotRun
        && !projected
        && !report.parameters.is_empty()
        && problem.dim <= KKT_MAX_DIM
    {
        if let Ok((k1, k2)) = kkt_check(&f, &report.parameters, g, bounds) {
            report.kkt1 = Some(k1);
            report.kkt2 = Some(k2);
        }
    }
    report
}
