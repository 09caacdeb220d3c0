//! Turning a [`RunSpec`] into a result row.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use sumscale_core::problems;
use sumscale_core::solvers::{self, solve_eq_qp};
use sumscale_core::transforms::{self, canonical_error, MaskSpec};
use sumscale_core::{ConvergenceCode, GradientMode, Method, Problem, Projection, SolverConfig, SymmetricMatrix};

use crate::error::{HarnessError, Result};
use crate::rng::uniform_start;
use crate::spec::{RunSpec, Start};

/// Exit-style code used for rows whose run could not be set up.
pub const SETUP_FAILURE: i32 = 9999;

/// One row of a benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub problem: String,
    pub n: usize,
    pub reformulation: String,
    pub method: String,
    pub gradient: String,
    pub bounds: Option<(f64, f64)>,
    #[serde(serialize_with = "finite_or_null")]
    pub value: f64,
    pub fevals: usize,
    pub gevals: usize,
    pub hevals: usize,
    pub conv: i32,
    pub kkt1: Option<bool>,
    pub kkt2: Option<bool>,
    pub time_s: f64,
    pub canonical_error: Option<f64>,
    /// Terminal parameters mapped back to the full raw vector.
    pub parameters: Vec<f64>,
    /// Terminal parameters in the solver's coordinates.
    pub internal_parameters: Vec<f64>,
    pub status: String,
}

fn finite_or_null<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

impl Row {
    pub fn succeeded(&self) -> bool {
        self.conv == 0
    }

    /// Row for a spec that failed before any solver ran.
    pub fn setup_failure(spec: &RunSpec, error: &HarnessError) -> Self {
        Self {
            problem: spec.problem.clone(),
            n: spec.n,
            reformulation: spec.reformulation.clone(),
            method: spec.method.clone(),
            gradient: spec.gradient.clone().unwrap_or_default(),
            bounds: spec.bounds,
            value: f64::NAN,
            fevals: 0,
            gevals: 0,
            hevals: 0,
            conv: SETUP_FAILURE,
            kkt1: None,
            kkt2: None,
            time_s: 0.0,
            canonical_error: None,
            parameters: Vec::new(),
            internal_parameters: Vec::new(),
            status: format!("Method  {}  failed  -- {error}", spec.method),
        }
    }
}

/// Resolved method: a core solver with an optional SPG projection, or the
/// equality-constrained QP.
#[derive(Debug, Clone)]
pub enum MethodChoice {
    Solver { method: Method, projection: Option<Projection> },
    Qp,
}

pub fn parse_method(name: &str) -> Result<MethodChoice> {
    if name == "qp" {
        return Ok(MethodChoice::Qp);
    }
    let (base, projection) = match name.split_once('+') {
        Some((b, p)) => (b, Some(p)),
        None => (name, None),
    };
    let method: Method = base.parse()?;
    let projection = match projection {
        None => None,
        Some(p) if method == Method::Spg => Some(Projection::by_name(p)?),
        Some(p) => {
            return Err(HarnessError::Usage(format!("projection {p:?} only applies to spg")));
        }
    };
    Ok(MethodChoice::Solver { method, projection })
}

/// Builds the problem described by `spec`: the named base problem, the
/// reformulation chain, then the bounds.
pub fn build_problem(spec: &RunSpec) -> Result<Problem> {
    let mut problem = problems::by_name(&spec.problem, spec.n)?;
    for step in spec.reformulation.split('+').map(str::trim).filter(|s| !s.is_empty()) {
        problem = apply_step(problem, step)?;
    }
    if let Some((lo, hi)) = spec.bounds {
        if !(lo <= hi) {
            return Err(HarnessError::Usage(format!("bounds {lo},{hi} are reversed")));
        }
        let dim = problem.dim;
        problem = problem.with_bounds(vec![lo; dim], vec![hi; dim]);
    }
    Ok(problem)
}

fn apply_step(problem: Problem, step: &str) -> Result<Problem> {
    use sumscale_core::problems::Form;
    if step == "loo" && problem.form == Form::LeaveOneOut {
        // Already written in leave-one-out parameters.
        return Ok(problem);
    }
    if let Some(rest) = step.strip_prefix("mask:") {
        let last = problem.dim.saturating_sub(1).to_string();
        let rest = rest.replace("last", &last);
        return Ok(transforms::apply_mask(&problem, &MaskSpec::parse(&rest)?)?);
    }
    let reform = transforms::by_name(step, problem.dim)?;
    Ok(transforms::compose(&problem, &reform)?)
}

fn start_vector(spec: &RunSpec, problem: &Problem) -> Result<Vec<f64>> {
    let x0 = match &spec.start {
        Start::Default => problem.default_start.clone(),
        Start::Explicit(v) => v.clone(),
        Start::Seeded(seed) => uniform_start(*seed, problem.dim),
    };
    if x0.len() != problem.dim {
        return Err(HarnessError::Usage(format!(
            "start has length {}, problem {} needs {}",
            x0.len(),
            problem.name,
            problem.dim
        )));
    }
    Ok(x0)
}

fn config_for(spec: &RunSpec, method: Method, problem: &Problem) -> Result<SolverConfig> {
    let mode = match &spec.gradient {
        Some(g) => g.parse::<GradientMode>()?,
        None if problem.has_gradient() => GradientMode::Analytic,
        None => GradientMode::Central,
    };
    let mut config = SolverConfig::new(method).with_gradient_mode(mode);
    let o = &spec.overrides;
    if let Some(v) = o.max_iterations {
        config.max_iterations = v;
    }
    if let Some(v) = o.max_function_evals {
        config.max_function_evals = v;
    }
    if let Some(v) = o.f_tolerance {
        config.f_tolerance = v;
    }
    if let Some(v) = o.g_tolerance {
        config.g_tolerance = v;
    }
    if let Some(v) = o.step_memory {
        config.step_memory = v;
    }
    config.validate()?;
    Ok(config)
}

/// Executes one run. Name resolution and argument errors are returned as
/// `Err`; solver failures come back as rows with a nonzero `conv`.
pub fn run(spec: &RunSpec) -> Result<Row> {
    run_with_projection(spec, None)
}

/// Like [`run`], but an SPG run uses `projection` in place of the one named
/// in the method string.
pub fn run_with_projection(spec: &RunSpec, projection_override: Option<&Projection>) -> Result<Row> {
    let problem = build_problem(spec)?;
    match parse_method(&spec.method)? {
        MethodChoice::Qp => run_qp(spec, &problem),
        MethodChoice::Solver { method, projection } => {
            let projection = match (method, projection_override) {
                (Method::Spg, Some(p)) => Some(p.clone()),
                _ => projection,
            };
            let config = config_for(spec, method, &problem)?;
            let x0 = start_vector(spec, &problem)?;
            let report = solvers::solve(&problem, &config, projection.as_ref(), Some(&x0));
            let parameters = problem.expand(&report.parameters);
            let canonical = match &problem.known_solution {
                Some(known) if report.convergence != ConvergenceCode::NotRun => {
                    canonical_error(&parameters, known, problem.canonical).ok()
                }
                _ => None,
            };
            let conv = report.convergence.code();
            let status = if conv == 0 {
                format!("Method  {}  converged  -- fval= {}", spec.method, report.value)
            } else {
                format!("Method  {}  failed  -- fval= {} ({})", spec.method, report.value, report.message)
            };
            Ok(Row {
                problem: spec.problem.clone(),
                n: spec.n,
                reformulation: spec.reformulation.clone(),
                method: spec.method.clone(),
                gradient: config.gradient_mode.to_string(),
                bounds: spec.bounds,
                value: report.value,
                fevals: report.fevals,
                gevals: report.gevals,
                hevals: report.hevals,
                conv,
                kkt1: report.kkt1,
                kkt2: report.kkt2,
                time_s: report.wall_time_seconds,
                canonical_error: canonical,
                parameters,
                internal_parameters: report.parameters,
                status,
            })
        }
    }
}

/// Minimizes `0.5 x' diag(1..n) x` on `sum(x) = 1`. Only the weighted sum
/// of squares problems have this form. The reported value is `x' D x`.
fn run_qp(spec: &RunSpec, problem: &Problem) -> Result<Row> {
    if !spec.problem.starts_with("rhelp-ssq") || problem.dim != spec.n {
        return Err(HarnessError::Usage(format!("qp is not available for {}", problem.name)));
    }
    let n = spec.n;
    let started = Instant::now();
    let weights: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let d = SymmetricMatrix::diagonal(&weights)?;
    let a = vec![vec![1.0]; n];
    let sol = solve_eq_qp(&d, &vec![0.0; n], &a, &[1.0])?;
    let canonical =
        problem.known_solution.as_ref().and_then(|k| canonical_error(&sol.solution, k, problem.canonical).ok());
    Ok(Row {
        problem: spec.problem.clone(),
        n,
        reformulation: spec.reformulation.clone(),
        method: "qp".into(),
        gradient: "none".into(),
        bounds: spec.bounds,
        value: sol.problem_value,
        fevals: 0,
        gevals: 0,
        hevals: 0,
        conv: 0,
        kkt1: None,
        kkt2: None,
        time_s: started.elapsed().as_secs_f64(),
        canonical_error: canonical,
        parameters: sol.solution.clone(),
        internal_parameters: sol.solution,
        status: format!("Method  qp  converged  -- value= {} multiplier= {:?}", sol.objective_value, sol.multipliers),
    })
}

/// Runs every spec, in parallel when `threads` allows, and returns rows in
/// spec order. Setup errors become failure rows.
pub fn run_all(specs: &[RunSpec], threads: Option<usize>) -> Result<Vec<Row>> {
    let work =
        || -> Vec<Row> { specs.par_iter().map(|s| run(s).unwrap_or_else(|e| Row::setup_failure(s, &e))).collect() };
    match threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| HarnessError::Usage(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(work))
        }
        None => Ok(work()),
    }
}

/// Sorts rows by ascending value; rows without a finite value go last.
pub fn sort_by_value(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        let key = |r: &Row| if r.value.is_finite() { r.value } else { f64::INFINITY };
        key(a).total_cmp(&key(b))
    });
}
