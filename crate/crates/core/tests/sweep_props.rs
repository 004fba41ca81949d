use eamchain::sweep::{
    bisect, bisection_budget, emit_critical, emit_sweep, linear_grid, parse_critical_csv, parse_critical_json,
    parse_sweep_csv, parse_sweep_json,
};
use eamchain::{
    coefficients, critical_strain, make_toy_potentials, sweep_strains, Format, ModelKind, SpectrumMode, ToyFamilyParams,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bisection_halves_the_bracket(root in -5.0f64..5.0, width in 0.5f64..20.0, offset in 0.01f64..0.99, tol_exp in 3i32..12) {
        let lo = root - offset * width;
        let hi = lo + width;
        let tol = 10f64.powi(-tol_exp);
        let b = bisect(|x: f64| Ok(x - root), lo, hi, tol).unwrap();
        let shrink = (b.hi - b.lo) * 2f64.powi(b.iterations as i32);
        // Exact halving up to the rounding of the bracket endpoints.
        let ulp = 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) * 2f64.powi(b.iterations as i32);
        prop_assert!((shrink - width).abs() <= ulp + 1e-14 * width);
        prop_assert!(b.hi - b.lo <= tol);
        prop_assert_eq!(b.iterations, bisection_budget(width, tol));
        prop_assert!(b.lo <= root && root <= b.hi);
    }

    #[test]
    fn sweep_reports_round_trip(alpha in 1.0f64..6.0, beta in 1.0f64..6.0, c in 0.0f64..20.0, steps in 1usize..20, n in 2usize..128) {
        let p = make_toy_potentials(ToyFamilyParams::new(alpha, beta, c)).unwrap();
        let rows = sweep_strains(&p, &linear_grid(0.8, 1.6, steps), SpectrumMode::Discrete(n)).unwrap();
        prop_assert_eq!(parse_sweep_csv::<f64>(&emit_sweep(&rows, Format::Csv)).unwrap(), rows.clone());
        prop_assert_eq!(parse_sweep_json::<f64>(&emit_sweep(&rows, Format::Json)).unwrap(), rows);
    }

    #[test]
    fn critical_reports_round_trip(f_lo in 0.8f64..0.9, tol_exp in 4i32..11) {
        let p = make_toy_potentials(ToyFamilyParams::new(4.0, 3.0, 1.0)).unwrap();
        let tol = 10f64.powi(-tol_exp);
        let reports: Vec<_> = ModelKind::ALL
            .iter()
            .map(|&m| critical_strain(&p, m, (f_lo, 1.5), tol, SpectrumMode::Discrete(64)).unwrap())
            .collect();
        prop_assert_eq!(parse_critical_json::<f64>(&emit_critical(&reports, Format::Json)).unwrap(), reports.clone());
        let csv = parse_critical_csv::<f64>(&emit_critical(&reports, Format::Csv)).unwrap();
        for (a, b) in csv.iter().zip(&reports) {
            let mut b = b.clone();
            b.cases.clear();
            prop_assert_eq!(a, &b);
        }
    }
}

/// Volume ordering at every point of swept grids, 200+ (params, F) samples in total.
/// Checked on the continuous symbol; the finite-chain excess is bounded by the first mode.
#[test]
fn volume_ordering_over_sweeps() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let mut samples = 0;
    for _ in 0..25 {
        let p = make_toy_potentials(ToyFamilyParams::new(
            rng.gen_range(1.0..6.0),
            rng.gen_range(1.0..6.0),
            rng.gen_range(0.0..20.0),
        ))
        .unwrap();
        let grid: Vec<f64> = linear_grid(0.8, 1.6, 9);
        let cont = sweep_strains(&p, &grid, SpectrumMode::Continuous).unwrap();
        let disc = sweep_strains(&p, &grid, SpectrumMode::Discrete(64)).unwrap();
        for (rc, rd) in cont.iter().zip(&disc) {
            samples += 1;
            assert!(rc.lam_a <= rc.lam_cv + 1e-12 * (1.0 + rc.lam_cv.abs()), "F={}", rc.strain);
            let co = coefficients(&p, rd.strain).unwrap();
            let s1 = eamchain::fourier_modes::<f64>(64).unwrap()[0];
            let excess = s1 * (co.b.abs() + 4.0 * co.c.abs() + 16.0 * co.d.abs());
            assert!(rd.lam_a <= rd.lam_cv + excess + 1e-12, "F={}", rd.strain);
        }
    }
    assert!(samples >= 200);
}
