use overdet_core::analytic::{self, sigma_singular};
use overdet_core::newton::{solve_free_boundary, uniqueness_check, InitialGuess, SolveParams};
use overdet_core::{BoundaryFunction, Discretization, Error, InnerProfile, ProblemSpec};

fn disc() -> Discretization {
    Discretization::new(128, 32).unwrap()
}

fn params() -> SolveParams {
    SolveParams {
        cutoff: 32,
        ..SolveParams::default()
    }
}

fn bernoulli() -> ProblemSpec {
    ProblemSpec::bernoulli(2, 0.5).unwrap()
}

#[test]
fn trivial_inner_gives_trivial_outer() {
    let r = solve_free_boundary(&InnerProfile::zero(), &bernoulli(), &params(), &disc()).unwrap();
    assert!(r.converged);
    assert_eq!(r.iterations, 1);
    assert!(r.g_final.tail_max(0) == 0.0);
    assert!((r.c_final - 1.0 / 0.5f64.ln()).abs() < 1e-10);
}

#[test]
fn residual_contracts_by_half_each_step() {
    let f: InnerProfile = BoundaryFunction::from_cos_sin(&[0.0, 0.03, 0.02], &[0.0, 0.0, 0.0, 0.01]).into();
    let p = SolveParams {
        initial: InitialGuess::Zero,
        ..params()
    };
    let r = solve_free_boundary(&f, &bernoulli(), &p, &disc()).unwrap();
    assert!(r.converged);
    for w in r.residual_history.windows(2).skip(1) {
        assert!(w[1] <= 0.5 * w[0], "{:?}", r.residual_history);
    }
    assert_eq!(r.g_final.mean(), 0.0);
}

#[test]
fn first_step_matches_first_order_prediction() {
    // g¹ from g⁰ = 0 is t·g₁ + O(t²)
    let spec = ProblemSpec::two_phase(2, 0.5, 2.0).unwrap();
    let f = BoundaryFunction::cos_mode(2, 1.0);
    let g1 = analytic::first_order_g(&f, &spec, 1e-9).unwrap();
    let mut errs = Vec::new();
    for t in [0.02, 0.01] {
        let p = SolveParams {
            initial: InitialGuess::Zero,
            max_iter: 2,
            residual_tol: 1e-300,
            ..params()
        };
        let r = solve_free_boundary(&f.scaled(t).into(), &spec, &p, &disc()).unwrap();
        assert!(!r.converged);
        errs.push(r.g_final.add_scaled(&g1, -t).sup_norm(128));
    }
    assert!(errs[1] < 0.3 * errs[0], "{errs:?}");
}

#[test]
fn restarts_land_on_the_same_solution() {
    let f: InnerProfile = BoundaryFunction::cos_mode(2, 0.04).into();
    let p = params();
    let u = uniqueness_check(&f, &bernoulli(), &p, &disc(), &[0.0, 0.5, 1.5, 2.0]).unwrap();
    assert!(u.all_converged);
    assert!(u.max_distance <= 10.0 * p.residual_tol, "{:?}", u.restarts);
}

#[test]
fn non_convergence_is_reported() {
    let p = SolveParams {
        max_iter: 2,
        initial: InitialGuess::Zero,
        ..params()
    };
    let f: InnerProfile = BoundaryFunction::cos_mode(1, 0.05).into();
    let r = solve_free_boundary(&f, &bernoulli(), &p, &disc()).unwrap();
    assert!(!r.converged);
    assert_eq!(r.residual_history.len(), 2);
}

#[test]
fn resonance_is_refused() {
    let s3 = sigma_singular(3, 2, 0.9);
    let spec = ProblemSpec::two_phase(2, 0.9, s3 + 1e-12).unwrap();
    let f: InnerProfile = BoundaryFunction::cos_mode(2, 0.01).into();
    match solve_free_boundary(&f, &spec, &params(), &disc()) {
        Err(Error::Resonance { k, .. }) => assert_eq!(k, 3),
        other => panic!("expected resonance error, got {other:?}"),
    }
}

#[test]
fn leaving_the_domain_returns_last_iterate() {
    let f: InnerProfile = BoundaryFunction::cos_mode(1, 0.2).into();
    let p = SolveParams {
        initial: InitialGuess::Given {
            g: BoundaryFunction::cos_mode(1, -0.4),
        },
        ..params()
    };
    assert!(matches!(
        solve_free_boundary(&f, &bernoulli(), &p, &disc()),
        Err(Error::IterateLeftDomain { iteration: 0, .. })
    ));
}

#[test]
fn parameter_validation() {
    let f = InnerProfile::zero();
    for p in [
        SolveParams { damping: 0.0, ..params() },
        SolveParams { damping: 1.5, ..params() },
        SolveParams { residual_tol: 0.0, ..params() },
        SolveParams { cutoff: 64, ..params() },
        SolveParams { initial: InitialGuess::Given { g: BoundaryFunction::constant(0.1) }, ..params() },
    ] {
        assert!(matches!(
            solve_free_boundary(&f, &bernoulli(), &p, &disc()),
            Err(Error::InvalidInput(_))
        ));
    }
}

#[test]
fn damping_still_converges() {
    let f: InnerProfile = BoundaryFunction::cos_mode(3, 0.05).into();
    let p = SolveParams {
        damping: 0.7,
        ..params()
    };
    let r = solve_free_boundary(&f, &ProblemSpec::two_phase(2, 0.5, 0.5).unwrap(), &p, &disc()).unwrap();
    assert!(r.converged);
    assert!(r.max_dn() < 0.0);
}
