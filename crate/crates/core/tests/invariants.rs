use proptest::prelude::*;

use overdet_core::analytic::{self, first_order_coefficient, sigma_singular};
use overdet_core::spectral::{analyze, project_zero_mean};
use overdet_core::{BoundaryFunction, ProblemSpec};

fn coeff_list(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

proptest! {
    #[test]
    fn analysis_inverts_synthesis(a in coeff_list(9), b in coeff_list(9)) {
        let f = BoundaryFunction::from_cos_sin(&a, &b);
        let g = analyze(&f.synthesize(64)).unwrap();
        for k in 0..=8 {
            prop_assert!((g.coeff(k, 0) - f.coeff(k, 0)).abs() < 1e-13);
            if k > 0 {
                prop_assert!((g.coeff(k, 1) - f.coeff(k, 1)).abs() < 1e-13);
            }
        }
        prop_assert!(g.tail_max(9) < 1e-13);
    }

    #[test]
    fn projection_only_clears_the_mean(a in coeff_list(6), b in coeff_list(6)) {
        let f = BoundaryFunction::from_cos_sin(&a, &b);
        let p = project_zero_mean(&f);
        prop_assert_eq!(p.mean(), 0.0);
        prop_assert_eq!(&p.coeffs()[1..], &f.coeffs()[1..]);
        prop_assert_eq!(project_zero_mean(&p), p);
    }

    #[test]
    fn parseval(a in coeff_list(7), b in coeff_list(7)) {
        let f = BoundaryFunction::from_cos_sin(&a, &b);
        let m = 64;
        let mean_square = f.synthesize(m).iter().map(|v| v * v).sum::<f64>() / m as f64;
        let l2 = f.l2_norm();
        prop_assert!((l2 * l2 / (2.0 * std::f64::consts::PI) - mean_square).abs() < 1e-12);
    }

    #[test]
    fn translation_mode_is_neutral(dim in 2u32..7, r in 0.05f64..0.95) {
        // shifting both spheres rigidly keeps the overdetermined condition
        let m = analytic::multipliers(1, &ProblemSpec::bernoulli(dim, r).unwrap()).unwrap();
        prop_assert!((m.m_f + m.m_g).abs() <= 1e-10 * m.m_g.abs());
        prop_assert!((first_order_coefficient(1, &ProblemSpec::bernoulli(dim, r).unwrap()).unwrap() - 1.0).abs() < 1e-10);
        prop_assert!((sigma_singular(1, dim, r) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn first_order_ratio_identity(dim in 2u32..6, r in 0.1f64..0.95, sigma in 0.05f64..20.0, k in 1u32..40) {
        let spec = ProblemSpec::two_phase(dim, r, sigma).unwrap();
        let m = analytic::multipliers(k, &spec).unwrap();
        prop_assume!(m.m_g.abs() > 1e-8);
        let ratio = -m.m_f / m.m_g;
        prop_assert!((first_order_coefficient(k, &spec).unwrap() - ratio).abs() <= 1e-9 * ratio.abs().max(1.0));
    }
}
