//! Acceptance checks against reference results.
//!
//! Each criterion runs its own solves and compares against the reference
//! numbers and against independent oracles (closed-form optima, the
//! Jacobi eigensolver). The simplex projection is injectable so that a
//! faulty projection shows up only in the criteria that use it.

use std::cell::Cell;
use std::f64::consts::PI;

use sumscale_core::oracle::{eigvec_error, jacobi_eigen, DEFAULT_MAX_SWEEPS, DEFAULT_TOLERANCE};
use sumscale_core::problems::{self, moler_matrix, neg_prod_scaled};
use sumscale_core::projections::{project_box, project_simplex, project_sphere_signed, project_unit_sum};
use sumscale_core::solvers::{check_gradient, solve_eq_qp, spg, vm, GradientRef};
use sumscale_core::transforms::{self, MaskSpec};
use sumscale_core::{GradientMode, Method, Problem, Projection, SolverConfig, SymmetricMatrix};

use crate::emit::sig7;
use crate::error::{HarnessError, Result};
use crate::rng::uniform_start;
use crate::runner::{run_with_projection, Row};
use crate::spec::{RunSpec, Start};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    /// Measured against expected values, one clause per check.
    pub detail: String,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

/// Injected pieces of the verification run.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub simplex: Projection,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { simplex: Projection::simplex() }
    }
}

pub const CRITERIA_SETS: &[&str] = &["paper"];

/// Runs a named set of criteria. Only `paper` exists.
pub fn verify(set: &str, options: &VerifyOptions) -> Result<Vec<Criterion>> {
    match set {
        "paper" => Ok(all_criteria(options)),
        other => {
            Err(HarnessError::Usage(format!("unknown criteria set {other:?}; available: {}", CRITERIA_SETS.join(", "))))
        }
    }
}

pub fn all_criteria(options: &VerifyOptions) -> Vec<Criterion> {
    vec![
        multinomial(options),
        product_forms(),
        log_transform(),
        masked(),
        rayleigh(),
        rosenbrock(),
        rhelp(options),
        underflow(),
        gradient_checks(),
        properties(),
    ]
}

struct Checks {
    parts: Vec<String>,
    ok: bool,
}

impl Checks {
    fn new() -> Self {
        Self { parts: Vec::new(), ok: true }
    }

    fn check(&mut self, passed: bool, text: String) {
        self.ok &= passed;
        self.parts.push(format!("{}{}", if passed { "" } else { "[x] " }, text));
    }

    /// `|measured - expected| <= tol`
    fn near(&mut self, label: &str, measured: f64, expected: f64, tol: f64) -> bool {
        let passed = (measured - expected).abs() <= tol;
        self.check(passed, format!("{label} {} vs {} (tol {})", full(measured), full(expected), sig7(tol)));
        passed
    }

    /// `measured <= limit`, with `None` failing.
    fn at_most(&mut self, label: &str, measured: Option<f64>, limit: f64) -> bool {
        let passed = measured.is_some_and(|m| m <= limit);
        let shown = measured.map_or_else(|| "NA".into(), sig7);
        self.check(passed, format!("{label} {shown} <= {}", sig7(limit)));
        passed
    }

    fn finish(self, id: u32, title: &'static str) -> Criterion {
        Criterion { id, title, passed: self.ok, detail: self.parts.join("; ") }
    }
}

fn full(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.10}").trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        sig7(x)
    }
}

fn row_or_failure(spec: &RunSpec, projection: Option<&Projection>) -> Row {
    run_with_projection(spec, projection).unwrap_or_else(|e| Row::setup_failure(spec, &e))
}

fn n_log_n(n: usize) -> f64 {
    n as f64 * (n as f64).ln()
}

/// Multinomial negative log-likelihood with bounds, leave-one-out, and with
/// the simplex projection.
pub fn multinomial(options: &VerifyOptions) -> Criterion {
    let mut c = Checks::new();
    for (n, reference) in [(5usize, 8.04719), (100, 460.517), (1000, 6907.755)] {
        let exact = n_log_n(n);
        c.check(sig7(exact) == sig7(reference), format!("n={n} exact {} prints as {}", full(exact), sig7(reference)));
        let err_limit = if n <= 100 { 1e-5 } else { 1e-4 };
        let runs = [
            RunSpec::new("nll", n, "loo+identity", "vm").bounds(0.0, 1.0),
            RunSpec::new("nll", n, "loo+identity", "cg").bounds(0.0, 1.0),
            RunSpec::new("nllrv", n, "none", "spg+simplex"),
        ];
        let mut reached = 0;
        for spec in &runs {
            let projection = spec.method.starts_with("spg").then_some(&options.simplex);
            let row = row_or_failure(spec, projection);
            let mut sub = Checks::new();
            sub.near(&format!("n={n} {}", spec.method), row.value, exact, 1e-4);
            sub.check(sig7(row.value) == sig7(reference), format!("printed {}", sig7(row.value)));
            sub.at_most("error", row.canonical_error, err_limit);
            if sub.ok {
                reached += 1;
            }
            c.parts.push(format!("{} ({})", sub.parts.join(", "), if sub.ok { "ok" } else { "miss" }));
        }
        c.check(reached >= 2, format!("n={n}: {reached}/3 methods reached the optimum"));
    }
    c.finish(1, "multinomial NLL golden values")
}

/// Product forms `pr0` (scale-embedded) and `pr1` (leave-one-out).
pub fn product_forms() -> Criterion {
    let mut c = Checks::new();
    let exact = -(0.2f64.powi(5));
    c.near("reference", -0.00032, exact, 1e-12);
    for problem in ["pr0", "pr1"] {
        for method in ["nm", "vm"] {
            let row = row_or_failure(&RunSpec::new(problem, 5, "none", method), None);
            c.near(&format!("{problem} {method}"), row.value, -0.00032, 1e-6);
            c.at_most("error", row.canonical_error, 1e-4);
        }
    }
    c.finish(2, "product-form problems")
}

/// Log parameters on the scaled NLL: value, parameters and the KKT flags.
pub fn log_transform() -> Criterion {
    let mut c = Checks::new();
    let exact = n_log_n(100);
    for method in ["vm", "cg"] {
        let row = row_or_failure(&RunSpec::new("enll", 100, "none", method), None);
        c.near(&format!("enll {method}"), row.value, exact, 1e-6);
        c.check(sig7(row.value) == "460.517", format!("printed {}", sig7(row.value)));
        c.at_most("error", row.canonical_error, 1e-7);
        c.check(
            row.kkt1 == Some(true) && row.kkt2 == Some(false),
            format!("kkt {:?}/{:?} expected TRUE/FALSE", row.kkt1, row.kkt2),
        );
    }
    c.finish(3, "log-transform path")
}

/// Scaled NLL with the last parameter fixed at 0.02.
pub fn masked() -> Criterion {
    let mut c = Checks::new();
    for (n, reference) in [(100usize, 460.517), (1000, 6907.755)] {
        let row = row_or_failure(&RunSpec::new("snll", n, "mask:last=0.02", "cg"), None);
        c.near(&format!("n={n} cg"), row.value, n_log_n(n), 1e-4);
        c.check(sig7(row.value) == sig7(reference), format!("printed {}", sig7(row.value)));
        c.at_most("error", row.canonical_error, 1e-6);
        let fixed = row.parameters.last().copied().unwrap_or(f64::NAN);
        c.check(fixed == 0.02, format!("masked value {fixed}"));
    }
    c.finish(4, "masked scaled NLL")
}

/// Extreme eigenvalues of `moler(10)` by SPG on the sphere, against the
/// reference values and the Jacobi oracle.
pub fn rayleigh() -> Criterion {
    let mut c = Checks::new();
    let oracle = moler_matrix(10).and_then(|a| jacobi_eigen(&a, DEFAULT_TOLERANCE, DEFAULT_MAX_SWEEPS));
    let oracle = match oracle {
        Ok(e) => e,
        Err(e) => {
            c.check(false, format!("oracle failed: {e}"));
            return c.finish(5, "Rayleigh quotient extreme eigenvalues");
        }
    };
    let cases = [("rq-moler-max", 31.58981, 9usize, -1.0, 1e-4), ("rq-moler-min", 8.582807e-06, 0, 1.0, 1e-8)];
    for (problem, reference, k, sign, tol) in cases {
        let row = row_or_failure(&RunSpec::new(problem, 10, "none", "spg+sphere-signed"), None);
        let eigenvalue = sign * row.value;
        c.near(&format!("{problem} oracle vs reference"), oracle.values[k], reference, tol);
        c.near(&format!("{problem} spg"), eigenvalue, reference, tol);
        c.near(&format!("{problem} spg vs oracle"), eigenvalue, oracle.values[k], tol);
        let err = eigvec_error(&row.parameters, &oracle.vector(k)).ok();
        c.at_most("eigenvector error", err, 1e-4);
    }
    c.finish(5, "Rayleigh quotient extreme eigenvalues")
}

pub const ROSENBROCK_MIN: f64 = 2.467509;
pub const ROSENBROCK_POINT: [f64; 6] = [0.7480, 0.56499, 0.32738, 0.11654, 0.02302, 0.00052];

/// Extended Rosenbrock on the unit sphere: signed and unsigned projections,
/// and spherical coordinates with and without angle bounds.
pub fn rosenbrock() -> Criterion {
    let mut c = Checks::new();
    let start: Vec<f64> = (1..=6).map(|i| i as f64 / 10.0).collect();

    let signed = row_or_failure(
        &RunSpec::new("rosbkext-ball", 6, "none", "spg+sphere-signed").start(Start::Explicit(start.clone())),
        None,
    );
    c.near("(a) signed spg", signed.value, ROSENBROCK_MIN, 1e-5);
    let dev = signed.parameters.iter().zip(ROSENBROCK_POINT).map(|(a, b)| (a - b).abs()).fold(0.0f64, f64::max);
    c.at_most("(a) point deviation", (signed.parameters.len() == 6).then_some(dev), 1e-3);

    let unsigned =
        row_or_failure(&RunSpec::new("rosbkext-ball", 6, "none", "spg+sphere").start(Start::Explicit(start)), None);
    c.check(unsigned.conv != 0, format!("(b) unsigned spg conv {}", unsigned.conv));
    c.near("(b) unsigned spg", unsigned.value, 46.34, 5e-3);

    for reform in ["spherical", "spherical-bounded"] {
        for method in ["vm", "cg"] {
            let row = row_or_failure(
                &RunSpec::new("rosbkext-ball", 6, reform, method).start(Start::Explicit(vec![1.0; 5])),
                None,
            );
            c.near(&format!("(c) {reform} {method}"), row.value, ROSENBROCK_MIN, 1e-5);
        }
    }
    c.finish(6, "Rosenbrock on the unit ball")
}

pub const RHELP_REFERENCE: [f64; 3] = [0.5454545, 0.2727273, 0.1818182];

/// Weighted sum of squares on the simplex by projected SPG and by the
/// equality-constrained QP.
pub fn rhelp(options: &VerifyOptions) -> Criterion {
    let mut c = Checks::new();
    let exact_min = 6.0 / 11.0;
    let spg_row = row_or_failure(&RunSpec::new("rhelp-ssq", 3, "none", "spg+simplex"), Some(&options.simplex));
    let qp_row = row_or_failure(&RunSpec::new("rhelp-ssq", 3, "none", "qp"), None);
    for (label, row) in [("spg+simplex", &spg_row), ("qp", &qp_row)] {
        for (i, want) in RHELP_REFERENCE.iter().enumerate() {
            let got = row.parameters.get(i).copied().unwrap_or(f64::NAN);
            c.near(&format!("{label} x{}", i + 1), got, *want, 1e-5);
        }
        let scaled = problems::weighted_ssq_scaled(&row.parameters).unwrap_or(f64::NAN);
        c.near(&format!("{label} scaled objective"), scaled, 0.5454545, 1e-6);
    }
    let weights = SymmetricMatrix::diagonal(&[1.0, 2.0, 3.0]).expect("positive order");
    match solve_eq_qp(&weights, &[0.0; 3], &vec![vec![1.0]; 3], &[1.0]) {
        Ok(sol) => {
            c.near("qp multiplier", sol.multipliers[0], exact_min, 1e-9);
            c.check(sig7(sol.multipliers[0]) == "0.5454545", format!("printed {}", sig7(sol.multipliers[0])));
            c.near("qp objective", sol.objective_value, 0.2727273, 1e-7);
        }
        Err(e) => c.check(false, format!("qp failed: {e}")),
    }
    c.finish(7, "weighted sum of squares")
}

/// Smallest `n` for which `neg_prod_scaled(ones(n))` is exactly zero.
pub fn underflow_crossover() -> Option<usize> {
    (2..2000).find(|&n| neg_prod_scaled(&vec![1.0; n]).is_ok_and(|v| v == 0.0))
}

/// Underflow of the scaled product for long vectors.
pub fn underflow() -> Criterion {
    let mut c = Checks::new();
    let v143 = neg_prod_scaled(&vec![1.0; 143]).unwrap_or(f64::NAN);
    let v140 = neg_prod_scaled(&vec![1.0; 140]).unwrap_or(f64::NAN);
    c.check(v143 == 0.0, format!("n=143 gives {v143:e}, expected exactly 0"));
    c.check(v140 < 0.0, format!("n=140 gives {v140:e}, expected < 0"));
    let crossover = underflow_crossover();
    c.parts.push(format!("first exact zero at n={}", crossover.map_or("none".into(), |n| n.to_string())));
    c.finish(8, "underflow of the scaled product")
}

struct GradientCase {
    name: &'static str,
    problem: Problem,
    /// Maps uniform draws to a strictly feasible point.
    point: fn(&[f64]) -> Vec<f64>,
}

fn positive(u: &[f64]) -> Vec<f64> {
    u.iter().map(|v| 0.1 + v).collect()
}

fn sub_unit_sum(u: &[f64]) -> Vec<f64> {
    let s: f64 = u.iter().sum::<f64>() + 0.5;
    u.iter().map(|v| (0.05 + v) / (s + 0.05 * u.len() as f64)).collect()
}

fn log_sub_unit_sum(u: &[f64]) -> Vec<f64> {
    sub_unit_sum(u).iter().map(|v| v.ln()).collect()
}

fn centred(u: &[f64]) -> Vec<f64> {
    u.iter().map(|v| 2.0 * v - 1.0).collect()
}

fn angles(u: &[f64]) -> Vec<f64> {
    u.iter().map(|v| PI * (2.0 * v - 1.0)).collect()
}

fn gradient_cases() -> std::result::Result<Vec<GradientCase>, sumscale_core::Error> {
    let n = 7;
    let snll = problems::by_name("snll", n)?;
    let rosen = problems::by_name("rosbkext-ball", n)?;
    Ok(vec![
        GradientCase { name: "pr0", problem: problems::by_name("pr0", n)?, point: positive },
        GradientCase { name: "pr1", problem: problems::by_name("pr1", n)?, point: sub_unit_sum },
        GradientCase { name: "nll", problem: problems::by_name("nll", n)?, point: sub_unit_sum },
        GradientCase { name: "snll", problem: snll.clone(), point: positive },
        GradientCase { name: "enll", problem: problems::by_name("enll", n)?, point: centred },
        GradientCase { name: "xnll", problem: problems::by_name("xnll", n)?, point: log_sub_unit_sum },
        GradientCase { name: "nllrv", problem: problems::by_name("nllrv", n)?, point: positive },
        GradientCase { name: "rq-moler-max", problem: problems::by_name("rq-moler-max", n)?, point: centred },
        GradientCase { name: "rq-moler-min", problem: problems::by_name("rq-moler-min", n)?, point: centred },
        GradientCase { name: "rosbkext-ball", problem: rosen.clone(), point: centred },
        GradientCase { name: "rhelp-ssq", problem: problems::by_name("rhelp-ssq", n)?, point: positive },
        GradientCase { name: "rhelp-ssq-raw", problem: problems::by_name("rhelp-ssq-raw", n)?, point: centred },
        GradientCase {
            name: "loo(snll)",
            problem: transforms::compose(&snll, &transforms::leave_one_out(n)?)?,
            point: sub_unit_sum,
        },
        GradientCase {
            name: "log(snll)",
            problem: transforms::compose(&snll, &transforms::log_params(n)?)?,
            point: centred,
        },
        GradientCase {
            name: "log-loo(snll)",
            problem: transforms::compose(&snll, &transforms::log_leave_one_out(n)?)?,
            point: log_sub_unit_sum,
        },
        GradientCase {
            name: "spherical(rosbkext)",
            problem: transforms::compose(&rosen, &transforms::spherical(n, false)?)?,
            point: angles,
        },
        GradientCase {
            name: "mask(snll)",
            problem: transforms::apply_mask(&snll, &MaskSpec::new([(n - 1, 0.02)]))?,
            point: positive,
        },
    ])
}

/// Every analytic gradient against central differences at 20 seeded points,
/// plus the checker's behaviour on NaN input.
pub fn gradient_checks() -> Criterion {
    let mut c = Checks::new();
    let cases = match gradient_cases() {
        Ok(cases) => cases,
        Err(e) => {
            c.check(false, format!("setup failed: {e}"));
            return c.finish(9, "gradient checks");
        }
    };
    for case in &cases {
        let f = case.problem.objective_fn();
        let g = case.problem.gradient_fn().expect("analytic gradient");
        let objective = |x: &[f64]| f(x);
        let gradient = |x: &[f64]| g(x);
        let mut worst = 0.0f64;
        let mut failures = 0;
        for seed in 0..20u64 {
            let x = (case.point)(&uniform_start(seed, case.problem.dim));
            match check_gradient(&objective, &gradient, &x, 1e-5) {
                sumscale_core::solvers::GradientCheck::Pass { max_rel_diff } => worst = worst.max(max_rel_diff),
                sumscale_core::solvers::GradientCheck::Fail { .. } => failures += 1,
            }
        }
        c.check(failures == 0, format!("{} worst {} ({failures} failed)", case.name, sig7(worst)));
    }
    let nan_objective = |_: &[f64]| f64::NAN;
    let nan_gradient = |x: &[f64]| -> sumscale_core::Result<Vec<f64>> { Ok(vec![f64::NAN; x.len()]) };
    let outcome = std::panic::catch_unwind(|| {
        let a = check_gradient(&nan_objective, &nan_gradient, &[0.5, 0.5], 1e-5);
        let b = check_gradient(&|x: &[f64]| x[0] * x[1], &|x: &[f64]| Ok(vec![x[1], x[0]]), &[f64::NAN, 1.0], 1e-5);
        !a.passed() && !b.passed()
    });
    c.check(matches!(outcome, Ok(true)), "NaN inputs reported as failures without panicking".into());
    c.finish(9, "gradient checks")
}

/// Quick seeded versions of the invariant suites.
pub fn properties() -> Criterion {
    let mut c = Checks::new();

    let mut worst_idem = 0.0f64;
    let mut kkt_ok = true;
    for seed in 0..50u64 {
        let y = centred(&uniform_start(seed, 9)).iter().map(|v| 3.0 * v).collect::<Vec<_>>();
        let p = project_simplex(&y);
        worst_idem = worst_idem.max(max_diff(&project_simplex(&p), &p));
        let s = project_sphere_signed(&y).expect("nonzero");
        worst_idem = worst_idem.max(max_diff(&project_sphere_signed(&s).expect("unit"), &s));
        let lo = vec![-0.5; 9];
        let hi = vec![0.5; 9];
        let b = project_box(&y, &lo, &hi).expect("valid box");
        worst_idem = worst_idem.max(max_diff(&project_box(&b, &lo, &hi).expect("valid box"), &b));
        let q = y.iter().map(|v| v.abs() + 0.1).collect::<Vec<_>>();
        let u = project_unit_sum(&q).expect("positive sum");
        worst_idem = worst_idem.max(max_diff(&project_unit_sum(&u).expect("unit sum"), &u));
        // Simplex optimality: y - p is constant on the support and bounds y off it.
        let support: Vec<usize> = (0..9).filter(|&i| p[i] > 0.0).collect();
        let theta = y[support[0]] - p[support[0]];
        kkt_ok &= support.iter().all(|&i| (y[i] - p[i] - theta).abs() <= 1e-12);
        kkt_ok &= (0..9).filter(|i| !support.contains(i)).all(|i| y[i] <= theta + 1e-12);
        kkt_ok &= (p.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
    }
    c.at_most("projection idempotence", Some(worst_idem), 1e-12);
    c.check(kkt_ok, "simplex projection optimality".into());

    let mut worst_scale = 0.0f64;
    for seed in 0..20u64 {
        let x = positive(&uniform_start(seed, 6));
        for k in [0.5, 3.0, 1e3] {
            let kx: Vec<f64> = x.iter().map(|v| k * v).collect();
            for f in [problems::scaled_nll, |z: &[f64]| problems::weighted_ssq_scaled(z).unwrap_or(f64::NAN)] {
                let (a, b) = (f(&x), f(&kx));
                worst_scale = worst_scale.max((a - b).abs() / a.abs().max(1e-300));
            }
            let (a, b) = (neg_prod_scaled(&x).unwrap_or(f64::NAN), neg_prod_scaled(&kx).unwrap_or(f64::NAN));
            worst_scale = worst_scale.max((a - b).abs() / a.abs());
        }
    }
    c.at_most("scale invariance (relative)", Some(worst_scale), 1e-12);

    // SPG on the simplex: feasibility and the nonmonotone envelope.
    let n = 20;
    let f = |x: &[f64]| problems::nllrv(x).unwrap_or(f64::INFINITY);
    let g = |x: &[f64]| problems::nllrv_grad(x);
    let config = SolverConfig::new(Method::Spg);
    let report = spg(&f, Some(&g), &Projection::simplex(), &positive(&uniform_start(5, n)), &config);
    let feasible =
        report.parameters.iter().all(|v| *v >= 0.0) && (report.parameters.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
    let envelope = report.history.windows(2).enumerate().all(|(k, _)| {
        let lo = (k + 1).saturating_sub(config.step_memory);
        let max = report.history[lo..=k].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        report.history[k + 1] <= max
    });
    c.check(feasible && envelope, format!("spg feasibility {feasible}, envelope {envelope}"));

    // Counter honesty: the solver's counts equal the calls made.
    let calls = Cell::new(0usize);
    let grads = Cell::new(0usize);
    let counted = |x: &[f64]| {
        calls.set(calls.get() + 1);
        problems::rosbkext(x).unwrap_or(f64::INFINITY)
    };
    let counted_grad = |x: &[f64]| {
        grads.set(grads.get() + 1);
        problems::rosbkext_grad(x)
    };
    let start = [-1.2, 1.0, -1.2, 1.0];
    let r = vm(&counted, Some(&counted_grad as GradientRef<'_>), &start, &SolverConfig::new(Method::Vm), None);
    let analytic_ok = r.fevals == calls.get() && r.gevals == grads.get();
    calls.set(0);
    let cfg = SolverConfig::new(Method::Vm).with_gradient_mode(GradientMode::Central);
    let r = vm(&counted, None, &start, &cfg, None);
    let numeric_ok = r.fevals == calls.get() && r.gevals > 0;
    c.check(analytic_ok && numeric_ok, format!("counter honesty analytic {analytic_ok}, numeric {numeric_ok}"));

    // QP residual on a random positive definite system.
    let m = 6;
    let u = uniform_start(11, m * m);
    let d = SymmetricMatrix::from_fn(m, |i, j| {
        let s: f64 = (0..m).map(|k| u[i * m + k] * u[j * m + k]).sum();
        s + if i == j { 1.0 } else { 0.0 }
    })
    .expect("positive order");
    let a: Vec<Vec<f64>> = (0..m).map(|i| vec![1.0, i as f64]).collect();
    let residual = solve_eq_qp(&d, &uniform_start(12, m), &a, &[1.0, 2.0]).map(|s| s.residual).ok();
    c.at_most("qp KKT residual", residual, 1e-10);

    // Jacobi reconstruction and trace on moler(2..50).
    let mut worst_rec = 0.0f64;
    let mut worst_trace = 0.0f64;
    for k in 2..=50 {
        let a = moler_matrix(k).expect("positive order");
        match jacobi_eigen(&a, DEFAULT_TOLERANCE, DEFAULT_MAX_SWEEPS) {
            Ok(e) => {
                let rec = e.reconstruct();
                let diff = (0..k)
                    .flat_map(|i| (0..k).map(move |j| (i, j)))
                    .map(|(i, j)| (rec[i][j] - a.get(i, j)).abs())
                    .fold(0.0f64, f64::max);
                worst_rec = worst_rec.max(diff / a.max_abs());
                let tr: f64 = e.values.iter().sum();
                worst_trace = worst_trace.max((tr - a.trace()).abs() / a.trace().abs());
            }
            Err(_) => worst_rec = f64::INFINITY,
        }
    }
    c.at_most("jacobi reconstruction (relative)", Some(worst_rec), 1e-9);
    c.at_most("jacobi trace (relative)", Some(worst_trace), 1e-9);
    c.finish(10, "property suites")
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
