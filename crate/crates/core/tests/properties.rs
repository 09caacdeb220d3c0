mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{central_difference, max_abs_diff, relative_gap, simplex_interior};
use sumscale_core::problems::{self, Form};
use sumscale_core::projections::{project_simplex, project_sphere_signed};
use sumscale_core::transforms::{self, canonicalize, spherical_to_cartesian};
use sumscale_core::{CanonicalMode, MaskSpec, Problem, Projection, SymmetricMatrix};

type Objective<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Moves a point of the raw simplex into `problem`'s own parameters.
fn into_form(problem: &Problem, w: &[f64]) -> Vec<f64> {
    let n = w.len();
    match problem.form {
        Form::Raw => w.to_vec(),
        Form::LeaveOneOut => w[..n - 1].to_vec(),
        Form::Log => w.iter().map(|v| v.ln()).collect(),
        Form::LogLeaveOneOut => w[..n - 1].iter().map(|v| v.ln()).collect(),
        other => panic!("unexpected form {other:?}"),
    }
}

fn projections() -> Vec<Projection> {
    vec![
        Projection::unit_sum(),
        Projection::simplex(),
        Projection::sphere_signed(),
        Projection::sphere(),
        Projection::boxed(vec![-0.5; 10], vec![2.0; 10]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn scale_embedded_objectives_ignore_scale(w in simplex_interior(2..=20)) {
        let n = w.len();
        let a = problems::moler_matrix(n).unwrap();
        let f: Vec<(&str, Objective)> = vec![
            ("neg_prod_scaled", Box::new(|x| problems::neg_prod_scaled(x).unwrap())),
            ("scaled_nll", Box::new(problems::scaled_nll)),
            ("rayleigh_quotient", Box::new(|x| problems::rayleigh_quotient(x, &a, None).unwrap())),
            ("weighted_ssq_scaled", Box::new(|x| problems::weighted_ssq_scaled(x).unwrap())),
        ];
        for c in [0.5, 3.0, 100.0] {
            let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
            for (name, f) in &f {
                prop_assert!(rel(f(&scaled), f(&w)) <= 1e-12, "{name} at c={c}");
            }
            let lx: Vec<f64> = w.iter().map(|v| v.ln()).collect();
            let shifted: Vec<f64> = lx.iter().map(|v| v + c.ln()).collect();
            prop_assert!(rel(problems::enll(&shifted), problems::enll(&lx)) <= 1e-12);
        }
    }

    #[test]
    fn analytic_gradients_match_central_differences(w in simplex_interior(3..=12)) {
        let n = w.len();
        for name in problems::PROBLEM_NAMES {
            let problem = problems::by_name(name, n).unwrap();
            let x = into_form(&problem, &w);
            let f = problem.objective_fn();
            let g = problem.gradient_fn().unwrap();
            let analytic = g(&x).unwrap();
            let numeric = central_difference(&*f, &x);
            prop_assert!(relative_gap(&analytic, &numeric) <= 1e-6, "{name}: {analytic:?} vs {numeric:?}");
        }
    }

    #[test]
    fn reformulation_gradients_match_central_differences(w in simplex_interior(3..=8)) {
        let n = w.len();
        let snll = problems::scaled_nll_problem(n).unwrap();
        let rosen = problems::rosenbrock_ball(n).unwrap();
        let nrm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let on_sphere: Vec<f64> = w.iter().map(|v| v / nrm).collect();
        let cases = [
            (&snll, "loo", w.clone()),
            (&snll, "log", w.clone()),
            (&snll, "log-loo", w.clone()),
            (&snll, "mask:0=0.3", w.clone()),
            (&snll, "scale-embed", w.clone()),
            (&rosen, "spherical", on_sphere.clone()),
            (&rosen, "spherical-bounded", on_sphere),
        ];
        for (problem, name, raw) in cases {
            let reform = transforms::by_name(name, n).unwrap();
            let composed = transforms::compose(problem, &reform).unwrap();
            let u = reform.inverse(&raw);
            let f = composed.objective_fn();
            let analytic = composed.gradient_fn().unwrap()(&u).unwrap();
            let numeric = central_difference(&*f, &u);
            prop_assert!(relative_gap(&analytic, &numeric) <= 1e-6, "{name}");
        }
    }

    #[test]
    fn sum_scale_canonical_form_ignores_scale(w in simplex_interior(1..=10)) {
        let base = canonicalize(&w, CanonicalMode::SumScale);
        for c in [0.1, 7.0] {
            let scaled: Vec<f64> = w.iter().map(|v| c * v).collect();
            prop_assert!(max_abs_diff(&canonicalize(&scaled, CanonicalMode::SumScale), &base) <= 1e-12);
        }
    }

    #[test]
    fn forward_canonicalize_forward_is_stable(w in simplex_interior(2..=10)) {
        let n = w.len();
        for name in ["loo", "log", "log-loo"] {
            let reform = transforms::by_name(name, n).unwrap();
            let u = reform.inverse(&w);
            let once = reform.canonicalize(&reform.forward(&u));
            let twice = reform.canonicalize(&reform.forward(&reform.inverse(&once)));
            prop_assert!(max_abs_diff(&once, &twice) <= 1e-12, "{name}");
        }
    }

    #[test]
    fn masked_entries_are_bit_identical(u in prop::collection::vec(-5.0f64..5.0, 4), v in -3.0f64..3.0) {
        let spec = MaskSpec::new([(1, v), (4, 0.02)]);
        let reform = transforms::mask(6, &spec).unwrap();
        let raw = reform.forward(&u);
        prop_assert_eq!(raw[1].to_bits(), v.to_bits());
        prop_assert_eq!(raw[4].to_bits(), 0.02f64.to_bits());
        prop_assert_eq!(&[raw[0], raw[2], raw[3], raw[5]], &u[..]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projections_are_idempotent(x in prop::collection::vec(-10.0f64..10.0, 10)) {
        for p in projections() {
            let Ok(once) = p.apply(&x) else { continue };
            let twice = p.apply(&once).unwrap();
            prop_assert!(max_abs_diff(&once, &twice) <= 1e-12, "{}", p.name);
        }
    }

    #[test]
    fn signed_sphere_leads_with_a_positive_entry(x in prop::collection::vec(-10.0f64..10.0, 1..10)) {
        prop_assume!(x.iter().any(|v| *v != 0.0));
        let p = project_sphere_signed(&x).unwrap();
        let lead = p.iter().find(|v| **v != 0.0).unwrap();
        prop_assert!(*lead > 0.0);
    }

    #[test]
    fn simplex_projection_is_feasible(y in prop::collection::vec(-5.0f64..5.0, 1..20)) {
        let p = project_simplex(&y);
        prop_assert!(p.iter().all(|v| *v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn spherical_map_lands_on_the_sphere(a in prop::collection::vec(-7.0f64..7.0, 1..10)) {
        let z = spherical_to_cartesian(&a);
        let nrm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((nrm - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn log_parameters_ignore_shift(lx in prop::collection::vec(-5.0f64..5.0, 1..12), c in -20.0f64..20.0) {
        let shifted: Vec<f64> = lx.iter().map(|v| v + c).collect();
        prop_assert!(rel(problems::enll(&shifted), problems::enll(&lx)) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_projection_is_nearest(y in (3usize..=6).prop_flat_map(|n| prop::collection::vec(-2.0f64..2.0, n)), seed: u64) {
        let p = project_simplex(&y);
        let dist = |z: &[f64]| z.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let best = dist(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..10_000 {
            let e: Vec<f64> = (0..y.len()).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
            let s: f64 = e.iter().sum();
            let z: Vec<f64> = e.iter().map(|v| v / s).collect();
            prop_assert!(best <= dist(&z) + 1e-9);
        }
    }
}

#[test]
fn rayleigh_gradient_is_orthogonal_to_its_point() {
    let a = SymmetricMatrix::from_rows(&common::moler(7)).unwrap();
    let x = [0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7];
    let g = problems::rq_grad(&x, &a).unwrap();
    let xg: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
    assert!(xg.abs() <= 1e-14);
}
