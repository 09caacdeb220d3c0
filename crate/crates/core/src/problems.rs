//! Test objectives for sumscale problems and the [`Problem`] container the
//! solvers and harness work with.
//!
//! Every objective is a pure function. The raw functions report bad input
//! through [`Error`]; once wrapped in a [`Problem`] they become extended-real
//! valued, returning `+inf` where the raw function fails, so that solvers can
//! reject such trial points during a line search.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::oracle;
use crate::transforms::CanonicalMode;
use crate::vecops::dot;

/// Threshold below which a reduced NLL parameter counts as non-positive.
pub const NLL_TINY: f64 = 10.0 * f64::MIN_POSITIVE;
/// Last-parameter cutoff used by [`xnll`].
pub const XNLL_CUTOFF: f64 = 1e-8;
/// Value [`xnll`] returns when the implied last parameter is too small.
pub const XNLL_SENTINEL: f64 = 1e25;

// ---------------------------------------------------------------------------
// Product forms
// ---------------------------------------------------------------------------

/// `-prod(x / sum(x))`. Invariant under positive rescaling of `x`.
pub fn neg_prod_scaled(x: &[f64]) -> Result<f64> {
    let s: f64 = x.iter().sum();
    if s == 0.0 {
        return Err(Error::DegenerateInput("sum of parameters is zero".into()));
    }
    Ok(-x.iter().fold(1.0, |p, v| p * (v / s)))
}

pub fn neg_prod_scaled_grad(x: &[f64]) -> Result<Vec<f64>> {
    let s: f64 = x.iter().sum();
    if s == 0.0 {
        return Err(Error::DegenerateInput("sum of parameters is zero".into()));
    }
    let n = x.len() as f64;
    let f = neg_prod_scaled(x)?;
    // d/dx_k of -prod(x_i)/s^n, written with exclusive products so a zero
    // coordinate does not produce 0/0.
    let excl = exclusive_products(&x.iter().map(|v| v / s).collect::<Vec<_>>());
    Ok(excl.iter().map(|e| -e / s - f * n / s).collect())
}

/// `-prod(y) * (1 - sum(y))`, the product with the last parameter eliminated.
pub fn neg_prod_loo(y: &[f64]) -> f64 {
    let rest = 1.0 - y.iter().sum::<f64>();
    -y.iter().product::<f64>() * rest
}

pub fn neg_prod_loo_grad(y: &[f64]) -> Vec<f64> {
    let p: f64 = y.iter().product();
    let rest = 1.0 - y.iter().sum::<f64>();
    exclusive_products(y).iter().map(|e| -e * rest + p).collect()
}

/// `out[k] = prod_{i != k} v[i]`
fn exclusive_products(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![1.0; n];
    let mut acc = 1.0;
    for i in 0..n {
        out[i] = acc;
        acc *= v[i];
    }
    acc = 1.0;
    for i in (0..n).rev() {
        out[i] *= acc;
        acc *= v[i];
    }
    out
}

// ---------------------------------------------------------------------------
// Multinomial negative log-likelihood family
// ---------------------------------------------------------------------------

/// Safeguarded leave-one-out NLL: `-sum(log y) - log(1 - sum y)`.
///
/// Returns `f64::MAX` when some `y_i <= 10 * MIN_POSITIVE` or
/// `sum(y) > 1 - EPSILON`.
pub fn nll(y: &[f64]) -> f64 {
    let s: f64 = y.iter().sum();
    if y.iter().any(|&v| v <= NLL_TINY) || s > 1.0 - f64::EPSILON {
        return f64::MAX;
    }
    -y.iter().map(|v| v.ln()).sum::<f64>() - (1.0 - s).ln()
}

/// Gradient of [`nll`], `-1/y + 1/(1 - sum y)`. Defined on the open interior
/// of the simplex only.
pub fn nll_grad(y: &[f64]) -> Result<Vec<f64>> {
    let s: f64 = y.iter().sum();
    if y.iter().any(|&v| v <= 0.0) || s >= 1.0 {
        return Err(Error::InfeasiblePoint("nll gradient needs y > 0 and sum(y) < 1".into()));
    }
    let last = 1.0 / (1.0 - s);
    Ok(y.iter().map(|v| -1.0 / v + last).collect())
}

/// Scale-embedded NLL on raw parameters: `-sum(log(x / sum x))`.
/// Non-positive coordinates give `+inf`.
pub fn scaled_nll(x: &[f64]) -> f64 {
    if x.iter().any(|&v| v <= 0.0) {
        return f64::INFINITY;
    }
    let s: f64 = x.iter().sum();
    -x.iter().map(|v| (v / s).ln()).sum::<f64>()
}

/// Gradient of [`scaled_nll`], `n / sum(x) - 1/x`.
pub fn scaled_nll_grad(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::InfeasiblePoint("scaled NLL needs x > 0".into()));
    }
    let s: f64 = x.iter().sum();
    let n = x.len() as f64;
    Ok(x.iter().map(|v| n / s - 1.0 / v).collect())
}

/// NLL in log parameters: `x = exp(lx)`, value `-sum(log(x / sum x))`.
/// Invariant under adding a constant to every `lx_i`.
pub fn enll(lx: &[f64]) -> f64 {
    let x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
    let s: f64 = x.iter().sum();
    if !s.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    -x.iter().map(|v| (v / s).ln()).sum::<f64>()
}

/// `(n / sum(x) - 1/x) * exp(lx)`
pub fn enll_grad(lx: &[f64]) -> Vec<f64> {
    let x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
    let s: f64 = x.iter().sum();
    let n = x.len() as f64;
    x.iter().map(|v| (n / s - 1.0 / v) * v).collect()
}

/// Leave-one-out NLL in log parameters with the last parameter
/// `1 - sum(exp(lx))`. Returns [`XNLL_SENTINEL`] when that parameter falls
/// below [`XNLL_CUTOFF`].
pub fn xnll(lx: &[f64]) -> f64 {
    let x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
    let xn = 1.0 - x.iter().sum::<f64>();
    if !(xn >= XNLL_CUTOFF) {
        return XNLL_SENTINEL;
    }
    -x.iter().map(|v| v.ln()).sum::<f64>() - xn.ln()
}

pub fn xnll_grad(lx: &[f64]) -> Vec<f64> {
    let x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
    let xn = 1.0 - x.iter().sum::<f64>();
    x.iter().map(|v| (-1.0 / v + 1.0 / xn) * v).collect()
}

/// Unscaled NLL `-sum(log x)`, meant to be minimized under a projection
/// onto the unit sum.
pub fn nllrv(x: &[f64]) -> Result<f64> {
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::InfeasiblePoint("nllrv needs x > 0".into()));
    }
    Ok(-x.iter().map(|v| v.ln()).sum::<f64>())
}

pub fn nllrv_grad(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::InfeasiblePoint("nllrv needs x > 0".into()));
    }
    Ok(x.iter().map(|v| -1.0 / v).collect())
}

// ---------------------------------------------------------------------------
// Rayleigh quotient
// ---------------------------------------------------------------------------

/// Moler matrix: `A[i][i] = i`, `A[i][j] = min(i, j) - 2` (1-based).
pub fn moler_matrix(n: usize) -> Result<SymmetricMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("Moler matrix order must be >= 1".into()));
    }
    SymmetricMatrix::from_fn(n, |i, j| if i == j { (i + 1) as f64 } else { (i.min(j) + 1) as f64 - 2.0 })
}

/// `(x' A x) / (x' B x)`, with `B = I` when absent.
pub fn rayleigh_quotient(x: &[f64], a: &SymmetricMatrix, b: Option<&SymmetricMatrix>) -> Result<f64> {
    check_len(a.order(), x.len())?;
    let denom = match b {
        Some(b) => {
            check_len(b.order(), x.len())?;
            b.quad_form(x)
        }
        None => dot(x, x),
    };
    if denom == 0.0 {
        return Err(Error::DegenerateInput("Rayleigh quotient denominator is zero".into()));
    }
    Ok(a.quad_form(x) / denom)
}

/// `2 (A x - R(x) x) / (x' x)`; orthogonal to `x`.
pub fn rq_grad(x: &[f64], a: &SymmetricMatrix) -> Result<Vec<f64>> {
    check_len(a.order(), x.len())?;
    let xx = dot(x, x);
    if xx == 0.0 {
        return Err(Error::DegenerateInput("Rayleigh quotient at the zero vector".into()));
    }
    let ax = a.mul_vec(x);
    let r = dot(&ax, x) / xx;
    Ok(ax.iter().zip(x).map(|(av, xv)| 2.0 * (av - r * xv) / xx).collect())
}

// ---------------------------------------------------------------------------
// Extended Rosenbrock and the unit-sphere constraint
// ---------------------------------------------------------------------------

/// `sum(100 (p_i^2 - p_{i+1})^2 + (p_i - 1)^2)` over `i < n`.
pub fn rosbkext(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument("extended Rosenbrock needs n >= 2".into()));
    }
    Ok(x.windows(2).map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2)).sum())
}

pub fn rosbkext_grad(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::InvalidArgument("extended Rosenbrock needs n >= 2".into()));
    }
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() - 1 {
        let r = x[i] * x[i] - x[i + 1];
        g[i] += 400.0 * x[i] * r + 2.0 * (x[i] - 1.0);
        g[i + 1] -= 200.0 * r;
    }
    Ok(g)
}

/// Equality residual `1 - sum(x^2)`; zero on the unit sphere.
pub fn heq(x: &[f64]) -> f64 {
    1.0 - dot(x, x)
}

// ---------------------------------------------------------------------------
// Weighted sum of squares
// ---------------------------------------------------------------------------

/// `sum(i * (x_i / sum x)^2)` with 1-based weights.
pub fn weighted_ssq_scaled(x: &[f64]) -> Result<f64> {
    let s: f64 = x.iter().sum();
    if s == 0.0 {
        return Err(Error::DegenerateInput("sum of parameters is zero".into()));
    }
    Ok(x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * (v / s) * (v / s)).sum())
}

pub fn weighted_ssq_scaled_grad(x: &[f64]) -> Result<Vec<f64>> {
    let s: f64 = x.iter().sum();
    if s == 0.0 {
        return Err(Error::DegenerateInput("sum of parameters is zero".into()));
    }
    let q: f64 = x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum();
    let s2 = s * s;
    Ok(x.iter().enumerate().map(|(i, v)| 2.0 * (i + 1) as f64 * v / s2 - 2.0 * q / (s2 * s)).collect())
}

/// `sum(i * x_i^2)` with 1-based weights.
pub fn weighted_ssq_raw(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum()
}

pub fn weighted_ssq_raw_grad(x: &[f64]) -> Vec<f64> {
    x.iter().enumerate().map(|(i, v)| 2.0 * (i + 1) as f64 * v).collect()
}

// ---------------------------------------------------------------------------
// Problem container
// ---------------------------------------------------------------------------

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;
pub type VectorMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// How a problem's parameters relate to the full raw vector of the
/// underlying sumscale problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// Parameters are the raw `n`-vector.
    Raw,
    /// Last raw parameter eliminated through the sum constraint.
    LeaveOneOut,
    /// Parameters are logarithms of the raw vector.
    Log,
    /// Logarithms of the first `n - 1` raw parameters.
    LogLeaveOneOut,
    /// Angles of spherical coordinates on the unit sphere.
    Spherical,
    /// Some raw parameters held fixed.
    Masked,
}

/// A named objective with optional analytic gradient, bounds and known
/// solution.
///
/// `known_solution` lives in the full raw space (length `full_dim`), which is
/// where solutions are compared. `known_point` is the same solution in this
/// problem's own parameters, when such a point exists.
#[derive(Clone)]
pub struct Problem {
    pub name: String,
    pub dim: usize,
    pub full_dim: usize,
    pub form: Form,
    objective: ObjectiveFn,
    gradient: Option<GradientFn>,
    expand: VectorMap,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    pub known_solution: Option<Vec<f64>>,
    pub known_point: Option<Vec<f64>>,
    pub known_value: Option<f64>,
    pub default_start: Vec<f64>,
    pub canonical: CanonicalMode,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("full_dim", &self.full_dim)
            .field("form", &self.form)
            .field("has_gradient", &self.gradient.is_some())
            .field("canonical", &self.canonical)
            .finish()
    }
}

impl Problem {
    /// A raw-form problem of dimension `dim` with no gradient, no bounds and
    /// a zero start.
    pub fn new(name: impl Into<String>, dim: usize, objective: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            dim,
            full_dim: dim,
            form: Form::Raw,
            objective: Arc::new(objective),
            gradient: None,
            expand: Arc::new(|x: &[f64]| x.to_vec()),
            lower: None,
            upper: None,
            known_solution: None,
            known_point: None,
            known_value: None,
            default_start: vec![0.0; dim],
            canonical: CanonicalMode::None,
        }
    }

    pub fn with_gradient(mut self, gradient: impl Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn without_gradient(mut self) -> Self {
        self.gradient = None;
        self
    }

    pub fn with_start(mut self, start: Vec<f64>) -> Self {
        self.default_start = start;
        self
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = Some(lower);
        self.upper = Some(upper);
        self
    }

    pub fn with_canonical(mut self, mode: CanonicalMode) -> Self {
        self.canonical = mode;
        self
    }

    /// Declares the problem's parameters to be a reduced view of a
    /// `full_dim`-vector recovered by `expand`.
    pub fn with_expansion(
        mut self,
        form: Form,
        full_dim: usize,
        expand: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.form = form;
        self.full_dim = full_dim;
        self.expand = Arc::new(expand);
        self
    }

    pub fn with_known(mut self, solution: Vec<f64>, point: Option<Vec<f64>>, value: Option<f64>) -> Self {
        self.known_solution = Some(solution);
        self.known_point = point;
        self.known_value = value;
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        (self.objective)(x)
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn gradient(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        self.gradient.as_ref().map(|g| g(x))
    }

    /// Maps this problem's parameters to the full raw vector.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        (self.expand)(x)
    }

    pub fn objective_fn(&self) -> ObjectiveFn {
        self.objective.clone()
    }

    pub fn gradient_fn(&self) -> Option<GradientFn> {
        self.gradient.clone()
    }

    pub(crate) fn expand_fn(&self) -> VectorMap {
        self.expand.clone()
    }

    pub fn bounds(&self) -> Option<(&[f64], &[f64])> {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => Some((l.as_slice(), u.as_slice())),
            _ => None,
        }
    }

    /// Replaces the objective and gradient while keeping the metadata; used
    /// by the reformulation layer.
    pub(crate) fn with_functions(mut self, objective: ObjectiveFn, gradient: Option<GradientFn>) -> Self {
        self.objective = objective;
        self.gradient = gradient;
        self
    }
}

/// `(1, 2, ..., m) / n^2`
pub fn nll_start(m: usize, n: usize) -> Vec<f64> {
    let n2 = (n * n) as f64;
    (1..=m).map(|i| i as f64 / n2).collect()
}

fn loo_expand(y: &[f64]) -> Vec<f64> {
    let mut x = y.to_vec();
    x.push(1.0 - y.iter().sum::<f64>());
    x
}

fn require_n(name: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        Err(Error::InvalidArgument(format!("problem {name} needs n >= {min}, got {n}")))
    } else {
        Ok(())
    }
}

/// Names accepted by [`by_name`].
pub const PROBLEM_NAMES: &[&str] = &[
    "pr0",
    "pr1",
    "nll",
    "snll",
    "enll",
    "xnll",
    "nllrv",
    "rq-moler-max",
    "rq-moler-min",
    "rosbkext-ball",
    "rhelp-ssq",
    "rhelp-ssq-raw",
];

/// Builds a named problem whose underlying raw vector has length `n`.
pub fn by_name(name: &str, n: usize) -> Result<Problem> {
    match name {
        "pr0" => product_scaled(n),
        "pr1" => product_loo(n),
        "nll" => nll_problem(n),
        "snll" => scaled_nll_problem(n),
        "enll" => enll_problem(n),
        "xnll" => xnll_problem(n),
        "nllrv" => nllrv_problem(n),
        "rq-moler-max" => rayleigh_moler(n, true),
        "rq-moler-min" => rayleigh_moler(n, false),
        "rosbkext-ball" => rosenbrock_ball(n),
        "rhelp-ssq" => rhelp(n, true),
        "rhelp-ssq-raw" => rhelp(n, false),
        other => Err(Error::UnknownName(format!("problem {other}"))),
    }
}

fn uniform_solution(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

pub fn product_scaled(n: usize) -> Result<Problem> {
    require_n("pr0", n, 2)?;
    Ok(Problem::new("pr0", n, |x| neg_prod_scaled(x).unwrap_or(f64::INFINITY))
        .with_gradient(neg_prod_scaled_grad)
        .with_start(nll_start(n, n))
        .with_canonical(CanonicalMode::SumScale)
        .with_known(uniform_solution(n), Some(uniform_solution(n)), Some(-(n as f64).powi(-(n as i32)))))
}

pub fn product_loo(n: usize) -> Result<Problem> {
    require_n("pr1", n, 2)?;
    let known = uniform_solution(n);
    Ok(Problem::new("pr1", n - 1, neg_prod_loo)
        .with_gradient(|y| Ok(neg_prod_loo_grad(y)))
        .with_expansion(Form::LeaveOneOut, n, loo_expand)
        .with_start(nll_start(n - 1, n))
        .with_canonical(CanonicalMode::SumScale)
        .with_known(known.clone(), Some(known[..n - 1].to_vec()), Some(-(n as f64).powi(-(n as i32)))))
}

pub fn nll_problem(n: usize) -> Result<Problem> {
    require_n("nll", n, 2)?;
    let known = uniform_solution(n);
    Ok(Problem::new("nll", n - 1, nll)
        .with_gradient(nll_grad)
        .with_expansion(Form::LeaveOneOut, n, loo_expand)
        .with_start(nll_start(n - 1, n))
        .with_canonical(CanonicalMode::SumScale)
        .with_known(known.clone(), Some(known[..n - 1].to_vec()), Some(n as f64 * (n as f64).ln())))
}

pub fn scaled_nll_problem(n: usize) -> Result<Problem> {
    require_n("snll", n, 1)?;
    Ok(Problem::new("snll", n, scaled_nll)
        .with_gradient(scaled_nll_grad)
        .with_start(nll_start(n, n))
        .with_canonical(CanonicalMode::SumScale)
        .with_known(uniform_solution(n), Some(uniform_solution(n)), Some(n as f64 * (n as f64).ln())))
}

pub fn enll_problem(n: usize) -> Result<Problem> {
    require_n("enll", n, 1)?;
    let start = nll_start(n, n).iter().map(|v| v.ln()).collect();
    Ok(Problem::new("enll", n, enll)
        .with_gradient(|lx| Ok(enll_grad(lx)))
        .with_expansion(Form::Log, n, |lx| lx.iter().map(|v| v.exp()).collect())
        .with_start(start)
        .with_canonical(CanonicalMode::SumScale)
        .with_known(uniform_solution(n), Some(vec![(1.0 / n as f64).ln(); n]), Some(n as f64 * (n as f64).ln())))
}

pub fn xnll_problem(n: usize) -> Result<Problem> {
    require_n("xnll", n, 2)?;
    let start = nll_start(n - 1, n).iter().map(|v| v.ln()).collect();
    Ok(Problem::new("xnll", n - 1, xnll)
        .with_gradient(|lx| Ok(xnll_grad(lx)))
        .with_expansion(Form::LogLeaveOneOut, n, |lx| {
            let x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
            loo_expand(&x)
        })
        .with_start(start)
        .with_canonical(CanonicalMode::SumScale)
        .with_known(uniform_solution(n), Some(vec![(1.0 / n as f64).ln(); n - 1]), Some(n as f64 * (n as f64).ln())))
}

pub fn nllrv_problem(n: usize) -> Result<Problem> {
    require_n("nllrv", n, 1)?;
    Ok(Problem::new("nllrv", n, |x| nllrv(x).unwrap_or(f64::INFINITY))
        .with_gradient(nllrv_grad)
        .with_start(nll_start(n, n))
        .with_canonical(CanonicalMode::SumScale)
        .with_known(uniform_solution(n), Some(uniform_solution(n)), Some(n as f64 * (n as f64).ln())))
}

/// Rayleigh quotient of `-moler(n)` (`maximal = true`, whose minimum is minus
/// the largest eigenvalue) or of `moler(n)`. The known solution is the
/// oracle eigenvector, normalized with a positive leading component.
pub fn rayleigh_moler(n: usize, maximal: bool) -> Result<Problem> {
    require_n("rq-moler", n, 1)?;
    let moler = moler_matrix(n)?;
    let eig = oracle::jacobi_eigen(&moler, oracle::DEFAULT_TOLERANCE, oracle::DEFAULT_MAX_SWEEPS)?;
    let (lambda, v) = if maximal { (eig.values[n - 1], eig.vector(n - 1)) } else { (eig.values[0], eig.vector(0)) };
    let v = crate::transforms::canonicalize(&v, CanonicalMode::SphereSigned);
    let a = Arc::new(if maximal { moler.negated() } else { moler });
    let (af, ag) = (a.clone(), a);
    let name = if maximal { "rq-moler-max" } else { "rq-moler-min" };
    let start = vec![1.0 / (n as f64).sqrt(); n];
    Ok(Problem::new(name, n, move |x| rayleigh_quotient(x, &af, None).unwrap_or(f64::INFINITY))
        .with_gradient(move |x| rq_grad(x, &ag))
        .with_start(start)
        .with_canonical(CanonicalMode::SphereSigned)
        .with_known(v.clone(), Some(v), Some(if maximal { -lambda } else { lambda })))
}

/// Extended Rosenbrock in cartesian coordinates, to be kept on the unit
/// sphere by a projection or a spherical reformulation.
pub fn rosenbrock_ball(n: usize) -> Result<Problem> {
    require_n("rosbkext-ball", n, 2)?;
    Ok(Problem::new("rosbkext-ball", n, |x| rosbkext(x).unwrap_or(f64::INFINITY))
        .with_gradient(rosbkext_grad)
        .with_start((1..=n).map(|i| i as f64 / 10.0).collect())
        .with_canonical(CanonicalMode::None))
}

/// Start used for the 3-parameter weighted sum of squares: the first three
/// uniform draws of the original seeded run.
pub const RHELP_START: [f64; 3] = [0.1137034, 0.6222994, 0.6092747];

/// Weighted sum of squares `sum(i x_i^2)` on the unit simplex; scale-embedded
/// when `scaled` is true. The minimizer is `x_i = (1/i) / H_n`.
pub fn rhelp(n: usize, scaled: bool) -> Result<Problem> {
    require_n("rhelp-ssq", n, 1)?;
    let harmonic: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    let known: Vec<f64> = (1..=n).map(|i| 1.0 / (i as f64 * harmonic)).collect();
    let start = if n == 3 { RHELP_START.to_vec() } else { nll_start(n, n) };
    let base = if scaled {
        Problem::new("rhelp-ssq", n, |x| weighted_ssq_scaled(x).unwrap_or(f64::INFINITY))
            .with_gradient(weighted_ssq_scaled_grad)
    } else {
        Problem::new("rhelp-ssq-raw", n, weighted_ssq_raw).with_gradient(|x| Ok(weighted_ssq_raw_grad(x)))
    };
    Ok(base.with_start(start).with_canonical(CanonicalMode::SumScale).with_known(
        known.clone(),
        Some(known),
        Some(1.0 / harmonic),
    ))
}
