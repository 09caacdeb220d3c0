//! Reformulations that remove the scaling constraint from a problem, plus
//! the canonical forms used to compare solutions that are only determined up
//! to scale or sign.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::problems::{Form, GradientFn, ObjectiveFn, Problem, VectorMap};

type Pullback = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
use crate::vecops::{dot, norm2};

/// How raw parameters are normalized before comparing them with a known
/// solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalMode {
    /// Divide by the sum.
    SumScale,
    /// Divide by the Euclidean norm and make the first nonzero entry
    /// positive.
    SphereSigned,
    None,
}

impl CanonicalMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CanonicalMode::SumScale => "sum-scale",
            CanonicalMode::SphereSigned => "sphere-signed",
            CanonicalMode::None => "none",
        }
    }
}

impl fmt::Display for CanonicalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CanonicalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum-scale" => Ok(CanonicalMode::SumScale),
            "sphere-signed" => Ok(CanonicalMode::SphereSigned),
            "none" => Ok(CanonicalMode::None),
            other => Err(Error::UnknownName(format!("canonical mode {other}"))),
        }
    }
}

/// Sign of the first nonzero entry, `+1` for the zero vector.
pub(crate) fn leading_sign(x: &[f64]) -> f64 {
    match x.iter().find(|v| **v != 0.0) {
        Some(v) if *v < 0.0 => -1.0,
        _ => 1.0,
    }
}

/// Applies `mode` to `x`. Degenerate inputs (zero sum or zero norm) are
/// returned unchanged.
pub fn canonicalize(x: &[f64], mode: CanonicalMode) -> Vec<f64> {
    match mode {
        CanonicalMode::SumScale => {
            let s: f64 = x.iter().sum();
            if s == 0.0 {
                x.to_vec()
            } else {
                x.iter().map(|v| v / s).collect()
            }
        }
        CanonicalMode::SphereSigned => {
            let nrm = norm2(x);
            if nrm == 0.0 {
                x.to_vec()
            } else {
                let c = leading_sign(x) / nrm;
                x.iter().map(|v| v * c).collect()
            }
        }
        CanonicalMode::None => x.to_vec(),
    }
}

/// Infinity-norm distance between `canonicalize(raw)` and `known`.
pub fn canonical_error(raw: &[f64], known: &[f64], mode: CanonicalMode) -> Result<f64> {
    check_len(known.len(), raw.len())?;
    Ok(crate::vecops::max_abs_diff(&canonicalize(raw, mode), known))
}

/// Parameters held fixed during optimization. Indices are 0-based.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaskSpec {
    pub fixed: Vec<(usize, f64)>,
}

impl MaskSpec {
    pub fn new(fixed: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut fixed: Vec<_> = fixed.into_iter().collect();
        fixed.sort_by_key(|(i, _)| *i);
        fixed.dedup_by_key(|(i, _)| *i);
        Self { fixed }
    }

    pub fn is_fixed(&self, i: usize) -> bool {
        self.fixed.iter().any(|(j, _)| *j == i)
    }

    /// Parses `idx=val[,idx=val...]`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut fixed = Vec::new();
        for part in s.split(',').filter(|p| !p.is_empty()) {
            let (i, v) =
                part.split_once('=').ok_or_else(|| Error::InvalidArgument(format!("bad mask entry {part:?}")))?;
            let i: usize = i.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad mask index {i:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad mask value {v:?}")))?;
            fixed.push((i, v));
        }
        Ok(Self::new(fixed))
    }
}

/// A map from internal parameters to the raw parameters of a problem,
/// together with the chain rule for gradients.
#[derive(Clone)]
pub struct Reformulation {
    pub name: String,
    pub internal_dim: usize,
    pub raw_dim: usize,
    pub form: Form,
    forward: VectorMap,
    /// (internal params, raw gradient) -> internal gradient
    pullback: Pullback,
    /// Left inverse of `forward`, used to carry starts and known solutions
    /// into internal coordinates.
    inverse: VectorMap,
    pub internal_bounds: Option<(Vec<f64>, Vec<f64>)>,
    pub canonical: CanonicalMode,
}

impl fmt::Debug for Reformulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Reformulation")
            .field("name", &self.name)
            .field("internal_dim", &self.internal_dim)
            .field("raw_dim", &self.raw_dim)
            .field("canonical", &self.canonical)
            .finish()
    }
}

impl Reformulation {
    pub fn forward(&self, internal: &[f64]) -> Vec<f64> {
        (self.forward)(internal)
    }

    pub fn pullback_gradient(&self, internal: &[f64], raw_gradient: &[f64]) -> Vec<f64> {
        (self.pullback)(internal, raw_gradient)
    }

    pub fn inverse(&self, raw: &[f64]) -> Vec<f64> {
        (self.inverse)(raw)
    }

    pub fn canonicalize(&self, raw: &[f64]) -> Vec<f64> {
        canonicalize(raw, self.canonical)
    }

    /// Identity map that only marks the problem as scale-embedded.
    pub fn scale_embed(n: usize) -> Self {
        Self {
            name: "scale-embed".into(),
            internal_dim: n,
            raw_dim: n,
            form: Form::Raw,
            forward: Arc::new(|x: &[f64]| x.to_vec()),
            pullback: Arc::new(|_: &[f64], g: &[f64]| g.to_vec()),
            inverse: Arc::new(|x: &[f64]| x.to_vec()),
            internal_bounds: None,
            canonical: CanonicalMode::SumScale,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self { name: "identity".into(), canonical: CanonicalMode::None, ..Self::scale_embed(n) }
    }
}

/// Eliminates the last parameter: `forward(y) = (y, 1 - sum y)`.
pub fn leave_one_out(n: usize) -> Result<Reformulation> {
    if n < 2 {
        return Err(Error::InvalidArgument("leave-one-out needs n >= 2".into()));
    }
    Ok(Reformulation {
        name: "loo".into(),
        internal_dim: n - 1,
        raw_dim: n,
        form: Form::LeaveOneOut,
        forward: Arc::new(|y: &[f64]| {
            let mut x = y.to_vec();
            x.push(1.0 - y.iter().sum::<f64>());
            x
        }),
        pullback: Arc::new(|y: &[f64], g: &[f64]| {
            let last = g[y.len()];
            g[..y.len()].iter().map(|gi| gi - last).collect()
        }),
        inverse: Arc::new(|x: &[f64]| x[..x.len() - 1].to_vec()),
        internal_bounds: None,
        canonical: CanonicalMode::None,
    })
}

/// Optimizes over `lx = log(x)`.
pub fn log_params(n: usize) -> Result<Reformulation> {
    if n < 1 {
        return Err(Error::InvalidArgument("log parameters need n >= 1".into()));
    }
    Ok(Reformulation {
        name: "log".into(),
        internal_dim: n,
        raw_dim: n,
        form: Form::Log,
        forward: Arc::new(|lx: &[f64]| lx.iter().map(|v| v.exp()).collect()),
        pullback: Arc::new(|lx: &[f64], g: &[f64]| g.iter().zip(lx).map(|(gi, l)| gi * l.exp()).collect()),
        inverse: Arc::new(|x: &[f64]| x.iter().map(|v| v.ln()).collect()),
        internal_bounds: None,
        canonical: CanonicalMode::SumScale,
    })
}

/// Log parameters for the first `n - 1` entries, the last one recovered from
/// the unit sum.
pub fn log_leave_one_out(n: usize) -> Result<Reformulation> {
    if n < 2 {
        return Err(Error::InvalidArgument("log-loo needs n >= 2".into()));
    }
    Ok(Reformulation {
        name: "log-loo".into(),
        internal_dim: n - 1,
        raw_dim: n,
        form: Form::LogLeaveOneOut,
        forward: Arc::new(|lx: &[f64]| {
            let mut x: Vec<f64> = lx.iter().map(|v| v.exp()).collect();
            x.push(1.0 - x.iter().sum::<f64>());
            x
        }),
        pullback: Arc::new(|lx: &[f64], g: &[f64]| {
            let last = g[lx.len()];
            lx.iter().zip(g).map(|(l, gi)| (gi - last) * l.exp()).collect()
        }),
        inverse: Arc::new(|x: &[f64]| x[..x.len() - 1].iter().map(|v| v.ln()).collect()),
        internal_bounds: None,
        canonical: CanonicalMode::SumScale,
    })
}

/// Maps `n - 1` spherical angles to a unit vector of length `n`:
/// `z_1 = cos a_1`, `z_k = sin a_1 ... sin a_{k-1} cos a_k`,
/// `z_n = sin a_1 ... sin a_{n-1}`.
pub fn spherical_to_cartesian(angles: &[f64]) -> Vec<f64> {
    let m = angles.len();
    let mut z = Vec::with_capacity(m + 1);
    let mut sin_prod = 1.0;
    for a in angles {
        z.push(sin_prod * a.cos());
        sin_prod *= a.sin();
    }
    z.push(sin_prod);
    z
}

/// Left inverse of [`spherical_to_cartesian`] for nonzero `z`; the angles
/// are in `[0, pi]` except the last, which is in `(-pi, pi]`.
pub fn cartesian_to_spherical(z: &[f64]) -> Vec<f64> {
    let m = z.len() - 1;
    let mut angles = Vec::with_capacity(m);
    for k in 0..m {
        let tail = if k + 1 == m { z[m] } else { norm2(&z[k + 1..]) };
        angles.push(tail.atan2(z[k]));
    }
    angles
}

/// Spherical-angle reformulation. The gradient pullback multiplies the raw
/// gradient by a central-difference Jacobian of the angle map.
pub fn spherical(n: usize, bounded: bool) -> Result<Reformulation> {
    if n < 2 {
        return Err(Error::InvalidArgument("spherical coordinates need n >= 2".into()));
    }
    let m = n - 1;
    Ok(Reformulation {
        name: "spherical".into(),
        internal_dim: m,
        raw_dim: n,
        form: Form::Spherical,
        forward: Arc::new(spherical_to_cartesian),
        pullback: Arc::new(|ax: &[f64], g: &[f64]| {
            let mut out = Vec::with_capacity(ax.len());
            let mut probe = ax.to_vec();
            for i in 0..ax.len() {
                let h = 1e-6 * (1.0 + ax[i].abs());
                probe[i] = ax[i] + h;
                let up = spherical_to_cartesian(&probe);
                probe[i] = ax[i] - h;
                let down = spherical_to_cartesian(&probe);
                probe[i] = ax[i];
                let col: Vec<f64> = up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * h)).collect();
                out.push(dot(&col, g));
            }
            out
        }),
        inverse: Arc::new(cartesian_to_spherical),
        internal_bounds: bounded.then(|| (vec![-PI; m], vec![PI; m])),
        canonical: CanonicalMode::SphereSigned,
    })
}

/// Holds the listed raw parameters fixed; the remaining ones are optimized.
pub fn mask(n: usize, spec: &MaskSpec) -> Result<Reformulation> {
    for (i, _) in &spec.fixed {
        if *i >= n {
            return Err(Error::IndexOutOfRange { index: *i, dim: n });
        }
    }
    let spec = Arc::new(spec.clone());
    let free: Arc<Vec<usize>> = Arc::new((0..n).filter(|i| !spec.is_fixed(*i)).collect());
    let (fs, ff) = (spec.clone(), free.clone());
    let (pf, invf) = (free.clone(), free.clone());
    let name = format!("mask:{}", spec.fixed.iter().map(|(i, v)| format!("{i}={v}")).collect::<Vec<_>>().join(","));
    Ok(Reformulation {
        name,
        internal_dim: free.len(),
        raw_dim: n,
        form: Form::Masked,
        forward: Arc::new(move |u: &[f64]| {
            let mut x = vec![0.0; n];
            for (i, v) in &fs.fixed {
                x[*i] = *v;
            }
            for (k, i) in ff.iter().enumerate() {
                x[*i] = u[k];
            }
            x
        }),
        pullback: Arc::new(move |_: &[f64], g: &[f64]| pf.iter().map(|i| g[*i]).collect()),
        inverse: Arc::new(move |x: &[f64]| invf.iter().map(|i| x[*i]).collect()),
        internal_bounds: None,
        canonical: CanonicalMode::None,
    })
}

/// Looks up a reformulation by harness name for a raw dimension `n`.
/// Accepts `scale-embed`, `identity`/`none`, `loo`, `log`, `log-loo`,
/// `spherical`, `spherical-bounded` and `mask:<idx>=<val>[,...]`.
pub fn by_name(name: &str, n: usize) -> Result<Reformulation> {
    match name {
        "scale-embed" => Ok(Reformulation::scale_embed(n)),
        "identity" | "none" => Ok(Reformulation::identity(n)),
        "loo" => leave_one_out(n),
        "log" => log_params(n),
        "log-loo" => log_leave_one_out(n),
        "spherical" => spherical(n, false),
        "spherical-bounded" => spherical(n, true),
        other => match other.strip_prefix("mask:") {
            Some(rest) => mask(n, &MaskSpec::parse(rest)?),
            None => Err(Error::UnknownName(format!("reformulation {other}"))),
        },
    }
}

/// Composes `problem` with `reform`: the new problem optimizes over the
/// internal parameters and evaluates `problem` at `reform.forward(u)`.
pub fn compose(problem: &Problem, reform: &Reformulation) -> Result<Problem> {
    check_len(problem.dim, reform.raw_dim)?;
    let f = problem.objective_fn();
    let fwd = reform.forward.clone();
    let objective: ObjectiveFn = {
        let fwd = fwd.clone();
        Arc::new(move |u: &[f64]| f(&fwd(u)))
    };
    let gradient: Option<GradientFn> = problem.gradient_fn().map(|g| {
        let fwd = fwd.clone();
        let pull = reform.pullback.clone();
        Arc::new(move |u: &[f64]| {
            let raw = g(&fwd(u))?;
            Ok(pull(u, &raw))
        }) as GradientFn
    });

    let inverse = reform.inverse.clone();
    let expand_base = problem.expand_fn();
    let expand_fwd = fwd.clone();
    let form = match (problem.form, reform.form) {
        (base, Form::Raw) => base,
        (_, f) => f,
    };

    let bounds = if let Some((lo, hi)) = &reform.internal_bounds {
        Some((lo.clone(), hi.clone()))
    } else if reform.form == Form::Masked {
        problem.bounds().map(|(lo, hi)| (inverse(lo), inverse(hi)))
    } else if reform.form == Form::Raw {
        problem.bounds().map(|(lo, hi)| (lo.to_vec(), hi.to_vec()))
    } else {
        None
    };

    let mut out =
        problem
            .clone()
            .with_functions(objective, gradient)
            .with_expansion(form, problem.full_dim, move |u| expand_base(&expand_fwd(u)));
    out.name =
        if reform.name == "identity" { problem.name.clone() } else { format!("{}+{}", problem.name, reform.name) };
    out.dim = reform.internal_dim;
    out.default_start = inverse(&problem.default_start);
    out.known_point = match reform.form {
        // Masked problems only reach the known point if it agrees with the
        // fixed values; compare through the canonical form instead.
        Form::Masked => None,
        _ => problem.known_point.as_ref().map(|p| inverse(p)),
    };
    if reform.canonical != CanonicalMode::None {
        out.canonical = reform.canonical;
    }
    out.lower = bounds.as_ref().map(|b| b.0.clone());
    out.upper = bounds.map(|b| b.1);
    Ok(out)
}

/// Problem with the parameters in `spec` held fixed.
pub fn apply_mask(problem: &Problem, spec: &MaskSpec) -> Result<Problem> {
    if spec.fixed.is_empty() {
        return Ok(problem.clone());
    }
    compose(problem, &mask(problem.dim, spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems;

    #[test]
    fn loo_examples() {
        let r = leave_one_out(5).unwrap();
        let x = r.forward(&[0.2; 4]);
        assert!(x.iter().all(|v| (v - 0.2).abs() < 1e-15));
        assert_eq!(r.forward(&[0.0; 4]), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        let g = [1.0, 2.0, 3.0, 4.0, 10.0];
        assert_eq!(r.pullback_gradient(&[0.1; 4], &g), vec![-9.0, -8.0, -7.0, -6.0]);
        assert!(leave_one_out(1).is_err());
    }

    #[test]
    fn log_examples() {
        let r = log_params(3).unwrap();
        assert_eq!(r.forward(&[0.0; 3]), vec![1.0; 3]);
        let c = r.canonicalize(&vec![0.505; 100]);
        assert!(c.iter().all(|v| (v - 0.01).abs() < 1e-15));
        assert_eq!(log_params(2).unwrap().pullback_gradient(&[0.0, 0.0], &[3.0, -2.0]), vec![3.0, -2.0]);
    }

    #[test]
    fn spherical_examples() {
        let z = spherical_to_cartesian(&[1.0; 5]);
        let want = [0.5403023, 0.4546487, 0.3825737, 0.3219247, 0.2708903, 0.4218866];
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).abs() < 5e-8);
        }
        assert_eq!(spherical_to_cartesian(&[0.0]), vec![1.0, 0.0]);
        let f = problems::rosbkext(&z).unwrap();
        assert!((f - 25.64734).abs() < 5e-6);
    }

    #[test]
    fn spherical_inverse_round_trip() {
        let ax = [0.3, 1.2, 2.0, -0.7];
        let z = spherical_to_cartesian(&ax);
        let back = spherical_to_cartesian(&cartesian_to_spherical(&z));
        assert!(crate::vecops::max_abs_diff(&z, &back) < 1e-14);
    }

    #[test]
    fn canonical_error_examples() {
        let e = canonical_error(&vec![0.505; 100], &vec![0.01; 100], CanonicalMode::SumScale).unwrap();
        assert!(e < 1e-12);
        let v = [0.6, 0.8];
        assert_eq!(canonical_error(&[-0.6, -0.8], &v, CanonicalMode::SphereSigned).unwrap(), 0.0);
        assert_eq!(canonical_error(&v, &v, CanonicalMode::None).unwrap(), 0.0);
        assert!(canonical_error(&[1.0], &v, CanonicalMode::None).is_err());
    }

    #[test]
    fn sphere_canonical_uses_first_nonzero() {
        assert_eq!(canonicalize(&[0.0, -2.0], CanonicalMode::SphereSigned), vec![0.0, 1.0]);
    }

    #[test]
    fn mask_keeps_fixed_values_bit_identical() {
        let spec = MaskSpec::new([(1, 0.1 + 0.2), (3, -0.0)]);
        let r = mask(5, &spec).unwrap();
        assert_eq!(r.internal_dim, 3);
        let x = r.forward(&[7.0, 8.0, 9.0]);
        assert_eq!(x[1].to_bits(), (0.1f64 + 0.2).to_bits());
        assert_eq!(x[3].to_bits(), (-0.0f64).to_bits());
        assert_eq!(x, vec![7.0, 0.1 + 0.2, 8.0, -0.0, 9.0]);
        assert!(matches!(mask(3, &MaskSpec::new([(3, 1.0)])), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn mask_all_and_none() {
        let p = problems::scaled_nll_problem(3).unwrap();
        let all = apply_mask(&p, &MaskSpec::new([(0, 1.0), (1, 2.0), (2, 3.0)])).unwrap();
        assert_eq!(all.dim, 0);
        let v = all.value(&[]);
        assert_eq!(v, p.value(&[1.0, 2.0, 3.0]));
        assert_eq!(v, all.value(&[]));
        let none = apply_mask(&p, &MaskSpec::default()).unwrap();
        assert_eq!(none.dim, 3);
        assert_eq!(none.value(&[0.2, 0.3, 0.5]), p.value(&[0.2, 0.3, 0.5]));
    }

    #[test]
    fn mask_parse() {
        let m = MaskSpec::parse("99=0.02").unwrap();
        assert_eq!(m.fixed, vec![(99, 0.02)]);
        assert!(MaskSpec::parse("x=1").is_err());
        assert!(by_name("mask:4=0.5", 5).is_ok());
        assert!(by_name("bogus", 5).is_err());
    }

    #[test]
    fn log_composed_with_scaled_nll_is_enll() {
        let base = problems::scaled_nll_problem(6).unwrap();
        let p = compose(&base, &log_params(6).unwrap()).unwrap();
        let lx = [0.1, -0.4, 0.9, 0.0, -1.2, 0.3];
        assert!((p.value(&lx) - problems::enll(&lx)).abs() < 1e-12);
        let g = p.gradient(&lx).unwrap().unwrap();
        let want = problems::enll_grad(&lx);
        assert!(crate::vecops::max_abs_diff(&g, &want) < 1e-12);
        assert_eq!(p.canonical, CanonicalMode::SumScale);
    }

    #[test]
    fn loo_composed_with_nllrv_matches_nll_in_interior() {
        let base = problems::nllrv_problem(5).unwrap();
        let p = compose(&base, &leave_one_out(5).unwrap()).unwrap();
        let y = [0.1, 0.2, 0.15, 0.3];
        assert!((p.value(&y) - problems::nll(&y)).abs() < 1e-12);
        let g = p.gradient(&y).unwrap().unwrap();
        assert!(crate::vecops::max_abs_diff(&g, &problems::nll_grad(&y).unwrap()) < 1e-12);
        assert_eq!(p.expand(&y).len(), 5);
    }
}
