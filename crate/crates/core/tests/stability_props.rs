use eamchain::spectral::{min_eigenvector_alternates, oracle_min_eigenvalue};
use eamchain::{
    coefficients, compare_volume, fourier_modes, lambda_atomistic, make_toy_potentials, min_eigenvalue, CaseLabel,
    ModelKind, OrderingVerdict, SpectrumMode, ToyFamilyParams,
};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (1.0f64..6.0, 1.0f64..6.0, 0.0f64..20.0, 0.8f64..1.6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn volume_model_never_stabler((alpha, beta, c, f) in params()) {
        let co = coefficients(&make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap(), f).unwrap();
        prop_assert_ne!(compare_volume(&co), OrderingVerdict::AtomisticLarger);
        let a = min_eigenvalue(&co, ModelKind::Atomistic, SpectrumMode::Continuous).lambda_min;
        let v = min_eigenvalue(&co, ModelKind::VolumeLocal, SpectrumMode::Continuous).lambda_min;
        prop_assert!(a <= v + 1e-12 * (1.0 + v.abs()));
    }

    #[test]
    fn slope_lower_bound_under_condition1((alpha, beta, c, f) in params()) {
        let co = coefficients(&make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap(), f).unwrap();
        prop_assume!(co.condition1_holds());
        for i in 0..=1000 {
            let s = 4.0 * i as f64 / 1000.0;
            let slope = co.b + 2.0 * co.c * s + 3.0 * co.d * s * s;
            let bound = co.b + 0.5 * co.c * s;
            prop_assert!(slope >= bound - 1e-12 * (co.b.abs() + co.c.abs() + co.d.abs()));
        }
    }

    #[test]
    fn b_identity((alpha, beta, c, f) in params()) {
        let co = coefficients(&make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap(), f).unwrap();
        prop_assert!(co.b_identity_residual().abs() <= 1e-12 * (1.0 + co.b_scale()));
    }

    #[test]
    fn verdict_consistency((alpha, beta, c, f) in params(), n in 2usize..=64) {
        let co = coefficients(&make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap(), f).unwrap();
        for m in ModelKind::ALL {
            for mode in [SpectrumMode::Continuous, SpectrumMode::Discrete(n)] {
                let v = min_eigenvalue(&co, m, mode);
                prop_assert_eq!(v.stable, v.lambda_min > 0.0);
                prop_assert!((0.0..=4.0).contains(&v.argmin_s));
                if m == ModelKind::Atomistic && v.case_label == CaseLabel::Interior {
                    prop_assert!(co.b < 0.0 && co.c * co.c - 3.0 * co.b * co.d > 0.0);
                }
                if m == ModelKind::Atomistic {
                    let at = lambda_atomistic(&co, v.argmin_s).unwrap();
                    prop_assert!((at - v.lambda_min).abs() <= 1e-12 * (1.0 + at.abs()));
                }
            }
        }
    }
}

proptest! {
    // Nonnegative B covers roughly a tenth of the sampling box.
    #![proptest_config(ProptestConfig { cases: 100, max_global_rejects: 20_000, ..ProptestConfig::default() })]

    #[test]
    fn nonnegative_b_puts_discrete_minimum_at_first_mode((alpha, beta, c, f) in params(), n in 2usize..=128) {
        let co = coefficients(&make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap(), f).unwrap();
        prop_assume!(co.b >= 0.0 && co.condition1_holds());
        let v = min_eigenvalue(&co, ModelKind::Atomistic, SpectrumMode::Discrete(n));
        prop_assert_eq!(v.argmin_s, fourier_modes::<f64>(n).unwrap()[0]);
        prop_assert_eq!(v.case_label, CaseLabel::Boundary0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn oracle_matches_discrete_verdict((alpha, beta, c, f) in params(), n in 2usize..=16) {
        let p = make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap();
        let co = coefficients(&p, f).unwrap();
        for m in ModelKind::ALL {
            let numeric = oracle_min_eigenvalue(m, &p, f, n).unwrap();
            let verdict = min_eigenvalue(&co, m, SpectrumMode::Discrete(n)).lambda_min;
            prop_assert!((numeric - verdict).abs() <= 1e-9 * (1.0 + co.a.abs()), "{m}: {numeric} vs {verdict}");
        }
    }

    #[test]
    fn reconstruction_minimum_mode_alternates((alpha, beta, c, f) in (1.0f64..6.0, 1.0f64..6.0, 0.5f64..20.0, 0.8f64..1.6), n in 2usize..=12) {
        let p = make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap();
        prop_assert!(min_eigenvector_alternates(ModelKind::ReconstructionLocal, &p, f, n).unwrap());
        let v = min_eigenvalue(&coefficients(&p, f).unwrap(), ModelKind::ReconstructionLocal, SpectrumMode::Discrete(n));
        prop_assert_eq!(v.argmin_s, 4.0);
    }
}
