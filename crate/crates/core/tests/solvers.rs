use std::cell::Cell;

use proptest::prelude::*;

use sumscale_core::problems::{self, nll_problem, nllrv_problem};
use sumscale_core::solvers::{self, cg, nelder_mead, solve, solve_eq_qp, spg, vm};
use sumscale_core::{
    ConvergenceCode, GradientMode, Method, Problem, Projection, SolveReport, SolverConfig, SymmetricMatrix,
};

fn bounded_nll(n: usize) -> Problem {
    let p = nll_problem(n).unwrap();
    let dim = p.dim;
    p.with_bounds(vec![0.0; dim], vec![1.0; dim])
}

fn run(problem: &Problem, method: Method, projection: Option<&Projection>) -> SolveReport {
    solve(problem, &SolverConfig::new(method), projection, None)
}

fn same_report(a: &SolveReport, b: &SolveReport) -> bool {
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    bits(&a.parameters) == bits(&b.parameters)
        && a.value.to_bits() == b.value.to_bits()
        && (a.fevals, a.gevals, a.hevals, a.iterations) == (b.fevals, b.gevals, b.hevals, b.iterations)
        && a.convergence == b.convergence
        && (a.kkt1, a.kkt2) == (b.kkt1, b.kkt2)
        && a.message == b.message
        && bits(&a.history) == bits(&b.history)
}

#[test]
fn solvers_agree_on_the_multinomial_likelihood() {
    let simplex = Projection::simplex();
    for n in [5usize, 100] {
        let exact = n as f64 * (n as f64).ln();
        let values = [
            run(&bounded_nll(n), Method::Vm, None).value,
            run(&bounded_nll(n), Method::Cg, None).value,
            run(&nllrv_problem(n).unwrap(), Method::Spg, Some(&simplex)).value,
        ];
        for v in values {
            assert!((v - exact).abs() <= 1e-6 * exact, "n={n}: {values:?}");
        }
    }
}

#[test]
fn spg_output_is_a_fixed_point_of_its_projection() {
    let cases = [
        (nllrv_problem(20).unwrap(), Projection::simplex()),
        (nllrv_problem(20).unwrap(), Projection::unit_sum()),
        (problems::rayleigh_moler(8, false).unwrap(), Projection::sphere_signed()),
        (problems::rosenbrock_ball(4).unwrap(), Projection::sphere()),
        (problems::rhelp(5, true).unwrap(), Projection::simplex()),
    ];
    for (problem, projection) in cases {
        let r = run(&problem, Method::Spg, Some(&projection));
        let again = projection.apply(&r.parameters).unwrap();
        let gap = again.iter().zip(&r.parameters).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap <= 1e-12, "{} with {}: {gap:e}", problem.name, projection.name);
    }
}

#[test]
fn bounded_variable_metric_and_cg_stay_in_bounds() {
    let problem = problems::rosenbrock_ball(5).unwrap().with_bounds(vec![-0.3; 5], vec![0.4; 5]);
    for method in [Method::Vm, Method::Cg] {
        let r = run(&problem, method, None);
        assert!(r.parameters.iter().all(|v| (-0.3..=0.4).contains(v)), "{method:?}: {:?}", r.parameters);
    }
}

#[test]
fn spg_history_has_a_nonincreasing_envelope() {
    let memory = SolverConfig::default().step_memory;
    let cases = [
        (problems::rayleigh_moler(10, true).unwrap(), Projection::sphere_signed()),
        (problems::rosenbrock_ball(6).unwrap(), Projection::sphere_signed()),
        (nllrv_problem(50).unwrap(), Projection::simplex()),
    ];
    for (problem, projection) in cases {
        let h = run(&problem, Method::Spg, Some(&projection)).history;
        assert!(h.len() > 2);
        let envelope: Vec<f64> = (0..h.len())
            .map(|k| h[k.saturating_sub(memory - 1)..=k].iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        assert!(envelope.windows(2).all(|w| w[1] <= w[0]), "{}", problem.name);
    }
}

#[test]
fn counters_match_actual_calls() {
    let fcalls = Cell::new(0usize);
    let gcalls = Cell::new(0usize);
    let f = |x: &[f64]| {
        fcalls.set(fcalls.get() + 1);
        problems::rosbkext(x).unwrap()
    };
    let g = |x: &[f64]| {
        gcalls.set(gcalls.get() + 1);
        problems::rosbkext_grad(x)
    };
    let x0 = [-1.2, 1.0, -0.5];
    let reset = || {
        fcalls.set(0);
        gcalls.set(0);
    };
    for mode in [GradientMode::Analytic, GradientMode::Forward, GradientMode::Central] {
        let analytic = mode == GradientMode::Analytic;
        let grad: Option<solvers::GradientRef<'_>> = if analytic { Some(&g) } else { None };
        let reports = [
            {
                reset();
                let cfg = SolverConfig::new(Method::Vm).with_gradient_mode(mode);
                (vm(&f, grad, &x0, &cfg, None), fcalls.get(), gcalls.get())
            },
            {
                reset();
                let cfg = SolverConfig::new(Method::Cg).with_gradient_mode(mode);
                (cg(&f, grad, &x0, &cfg, None), fcalls.get(), gcalls.get())
            },
            {
                reset();
                let cfg = SolverConfig::new(Method::Spg).with_gradient_mode(mode);
                (spg(&f, grad, &Projection::sphere(), &x0, &cfg), fcalls.get(), gcalls.get())
            },
        ];
        for (r, fc, gc) in reports {
            assert_eq!(r.fevals, fc, "{mode:?}");
            assert!(r.fevals > 0);
            if analytic {
                assert_eq!(r.gevals, gc);
            } else {
                assert_eq!(gc, 0);
                assert!(r.gevals > 0);
            }
        }
    }
    reset();
    let r = nelder_mead(&f, &x0, &SolverConfig::new(Method::NelderMead));
    assert_eq!((r.fevals, r.gevals), (fcalls.get(), 0));
}

#[test]
fn repeated_solves_are_bit_identical() {
    let simplex = Projection::simplex();
    let cases: Vec<(Problem, Method, Option<&Projection>)> = vec![
        (bounded_nll(30), Method::Vm, None),
        (bounded_nll(30), Method::Cg, None),
        (nllrv_problem(30).unwrap(), Method::Spg, Some(&simplex)),
        (problems::product_scaled(5).unwrap(), Method::NelderMead, None),
    ];
    for (problem, method, projection) in cases {
        let a = run(&problem, method, projection);
        let b = run(&problem, method, projection);
        assert!(same_report(&a, &b), "{method:?}");
    }
}

#[test]
fn budget_exhaustion_is_reported() {
    let mut cfg = SolverConfig::new(Method::Vm);
    cfg.max_function_evals = 5;
    let r = solve(&bounded_nll(50), &cfg, None, None);
    assert_eq!(r.convergence, ConvergenceCode::LimitReached);
    assert!(r.fevals <= 5 + 1);
}

#[test]
fn kkt_flags_follow_curvature() {
    // Strict minimum of a scaled problem in leave-one-out form.
    let r = run(&bounded_nll(10), Method::Vm, None);
    assert_eq!((r.kkt1, r.kkt2), (Some(true), Some(true)));
    // Log parameters leave a flat direction.
    let r = run(&problems::enll_problem(10).unwrap(), Method::Vm, None);
    assert_eq!((r.kkt1, r.kkt2), (Some(true), Some(false)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qp_kkt_residual_is_small(
        weights in prop::collection::vec(0.1f64..10.0, 2..12),
        seed in prop::collection::vec(-1.0f64..1.0, 12),
        rhs in 0.1f64..5.0,
    ) {
        let n = weights.len();
        let d_mat = SymmetricMatrix::diagonal(&weights).unwrap();
        let d: Vec<f64> = seed[..n].to_vec();
        let a: Vec<Vec<f64>> = (0..n).map(|i| vec![1.0, i as f64]).collect();
        let b = [rhs, 0.5 * rhs];
        let sol = solve_eq_qp(&d_mat, &d, &a, &b).unwrap();
        let scale = weights.iter().chain(&d).chain(&b).fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(sol.residual <= 1e-10 * scale);
        let sum: f64 = sol.solution.iter().sum();
        prop_assert!((sum - rhs).abs() <= 1e-10 * scale);
    }
}
