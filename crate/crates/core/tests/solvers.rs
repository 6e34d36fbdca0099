use nalgebra::DMatrix;

use rcg::batch::{map_seeds, map_seeds_seq, multi_start, multi_start_seq};
use rcg::cg::StepContext;
use rcg::cg::{check_newbeta_identity, check_ratio_identity, NewBetaCheck};
use rcg::linalg::random_symmetric;
use rcg::problems::{brockett_problem, quadratic_problem, rayleigh_problem};
use rcg::{solve, Error, Manifold, Method, SolveOptions, SymmetricMatrix, Termination, WarmStart};

fn col(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(v.len(), 1, v)
}

fn diag_quadratic() -> rcg::Problem {
    quadratic_problem(&SymmetricMatrix::from_diagonal(&[1.0, 2.0]), &[1.0, 1.0]).unwrap()
}

#[test]
fn diagonal_quadratic_reaches_its_minimizer() {
    let p = diag_quadratic();
    let x0 = p.manifold.point(col(&[0.0, 0.0])).unwrap();
    for method in [
        Method::ScaledDY,
        Method::ScaledDYBarBeta,
        Method::FletcherReevesScaled,
        Method::SteepestDescent,
        Method::EuclideanDYReference,
    ] {
        let r = solve(&p, &x0, &SolveOptions::new(method)).unwrap();
        assert!(r.converged, "{method}");
        let x = r.x_final.coords();
        assert!(
            (x[0] - 1.0).abs() <= 1e-8 && (x[1] - 0.5).abs() <= 1e-8,
            "{method}: {x}"
        );
        assert!((r.f_final + 0.75).abs() <= 1e-12, "{method}");
    }
}

#[test]
fn rayleigh_started_at_eigenvector_stops_immediately() {
    let p = rayleigh_problem(&SymmetricMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
    let x0 = p.manifold.point(col(&[1.0, 0.0, 0.0])).unwrap();
    let r = solve(&p, &x0, &SolveOptions::default()).unwrap();
    assert_eq!(r.termination, Termination::ZeroGradient);
    assert_eq!(r.iters, 0);
    assert_eq!(r.trace.len(), 1);
    assert_eq!(r.f_final, 3.0);
}

#[test]
fn reference_at_exact_solution_stops_immediately() {
    let p = diag_quadratic();
    let x0 = p.manifold.point(col(&[1.0, 0.5])).unwrap();
    let r = solve(&p, &x0, &SolveOptions::new(Method::EuclideanDYReference)).unwrap();
    assert_eq!(r.termination, Termination::ZeroGradient);
    assert_eq!(r.iters, 0);
}

#[test]
fn newbeta_check_skips_orthogonal_transports() {
    // g = A x − b = (1, 0) at the origin, η = (0, 1)
    let p = quadratic_problem(&SymmetricMatrix::from_diagonal(&[1.0, 2.0]), &[-1.0, 0.0]).unwrap();
    let x = p.manifold.point(col(&[0.0, 0.0])).unwrap();
    let eta = p.manifold.tangent(&x, col(&[0.0, 1.0])).unwrap();
    let step = StepContext {
        x,
        eta,
        alpha: 0.5,
        beta_next: 1.0,
    };
    assert_eq!(
        check_newbeta_identity(&p, &step).unwrap(),
        NewBetaCheck::Skipped
    );
}

#[test]
fn dy_traces_satisfy_the_ratio_identity() {
    let a = SymmetricMatrix::new(random_symmetric(40, 9)).unwrap();
    let p = rayleigh_problem(&a).unwrap();
    let r = solve(&p, &p.manifold.random_point(3), &SolveOptions::default()).unwrap();
    assert!(r.converged);
    assert!(check_ratio_identity(&r.trace) <= 1e-10);
    let gap = r.oracle_gap(p.oracle_value).unwrap();
    assert!(gap <= 1e-8, "{gap}");
    assert!(r.trace.iter().skip(1).all(|t| t.f_change < 0.0));
}

#[test]
fn baselines_converge_on_brockett() {
    let a = SymmetricMatrix::new(random_symmetric(20, 4)).unwrap();
    let p = brockett_problem(&a, &[1.0, 2.0, 3.0]).unwrap();
    let x0 = p.manifold.random_point(8);
    for method in [
        Method::ScaledDY,
        Method::ScaledDYBarBeta,
        Method::FletcherReevesScaled,
        Method::SteepestDescent,
    ] {
        let r = solve(&p, &x0, &SolveOptions::new(method)).unwrap();
        assert!(r.converged, "{method}: {:?}", r.termination);
        assert!(r.oracle_gap(p.oracle_value).unwrap() <= 1e-6, "{method}");
        assert!(p.manifold.point_residual(r.x_final.coords()) <= p.manifold.point_tolerance());
    }
}

#[test]
fn steepest_descent_records_zero_beta() {
    let a = SymmetricMatrix::new(random_symmetric(15, 2)).unwrap();
    let p = rayleigh_problem(&a).unwrap();
    let r = solve(
        &p,
        &p.manifold.random_point(1),
        &SolveOptions::new(Method::SteepestDescent),
    )
    .unwrap();
    assert!(r.trace.iter().all(|t| t.beta == 0.0));
}

#[test]
fn previous_step_warm_start_still_converges() {
    let a = SymmetricMatrix::new(random_symmetric(30, 6)).unwrap();
    let p = rayleigh_problem(&a).unwrap();
    let opts = SolveOptions {
        warm_start: WarmStart::PreviousStep,
        ..SolveOptions::default()
    };
    let r = solve(&p, &p.manifold.random_point(2), &opts).unwrap();
    assert!(r.converged, "{:?}", r.termination);
    for w in r.trace.windows(3) {
        // the next search starts from the accepted step, so a first-try
        // acceptance repeats it exactly
        assert!(w[1].alpha > 0.0 && w[2].alpha > 0.0);
    }
}

#[test]
fn warm_start_rules() {
    assert_eq!(WarmStart::default(), WarmStart::Interpolated);
    assert_eq!(
        WarmStart::PreviousStep.next(0.25, -1.0, -4.0, -1.0, 1e10),
        0.25
    );
    assert_eq!(
        WarmStart::SlopeRatio.next(0.25, -1.0, -4.0, -1.0, 1e10),
        1.0
    );
    assert_eq!(
        WarmStart::SlopeRatio.next(0.25, -1.0, -4.0, 0.0, 1e10),
        0.25
    );
    assert_eq!(
        WarmStart::SlopeRatio.next(0.25, -1.0, -4.0, -1e-20, 1e3),
        1e3
    );
    // 1.01 · 2 · (−0.5) / (−2)
    assert_eq!(
        WarmStart::Interpolated.next(0.25, -0.5, -4.0, -2.0, 1e10),
        0.505
    );
    assert_eq!(
        WarmStart::Interpolated.next(0.25, 0.0, -4.0, -2.0, 1e10),
        0.25
    );
}

#[test]
fn iteration_cap_is_reported() {
    let a = SymmetricMatrix::new(random_symmetric(50, 1)).unwrap();
    let p = rayleigh_problem(&a).unwrap();
    let opts = SolveOptions {
        max_iters: 2,
        ..SolveOptions::default()
    };
    let r = solve(&p, &p.manifold.random_point(0), &opts).unwrap();
    assert_eq!(r.termination, Termination::MaxIters);
    assert!(!r.converged);
    assert_eq!(r.trace.len(), 3);
}

#[test]
fn invalid_options_are_rejected() {
    let p = diag_quadratic();
    let x0 = p.manifold.random_point(0);
    let mut opts = SolveOptions::default();
    opts.wolfe.c2 = opts.wolfe.c1;
    assert!(matches!(
        solve(&p, &x0, &opts),
        Err(Error::InvalidOptions(_))
    ));
    let opts = SolveOptions {
        grad_tol: 0.0,
        ..SolveOptions::default()
    };
    assert!(matches!(
        solve(&p, &x0, &opts),
        Err(Error::InvalidOptions(_))
    ));
}

#[test]
fn reference_refuses_curved_manifolds() {
    let a = SymmetricMatrix::new(random_symmetric(5, 1)).unwrap();
    let p = rayleigh_problem(&a).unwrap();
    let r = solve(
        &p,
        &p.manifold.random_point(0),
        &SolveOptions::new(Method::EuclideanDYReference),
    );
    assert!(r.is_err());
}

#[test]
fn multi_start_matches_sequential_bitwise() {
    let a = SymmetricMatrix::new(random_symmetric(25, 5)).unwrap();
    let p = rayleigh_problem(&a).unwrap();
    let seeds: Vec<u64> = (0..6).collect();
    let opts = SolveOptions::default();
    let par = multi_start(&p, &seeds, &opts);
    let seq = multi_start_seq(&p, &seeds, &opts);
    for (a, b) in par.iter().zip(&seq) {
        let (a, b) = (a.as_ref().unwrap(), b.as_ref().unwrap());
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.x_final.coords(), b.x_final.coords());
    }
    assert_eq!(
        map_seeds(&seeds, |s| s * 3),
        map_seeds_seq(&seeds, |s| s * 3)
    );
}
