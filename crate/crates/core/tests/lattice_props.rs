use eamchain::lattice::fourier_coefficients;
use eamchain::{diff, ChainConfig64, Displacement};
use proptest::prelude::*;

fn chain_and_values() -> impl Strategy<Value = (usize, f64, Vec<f64>, Vec<f64>)> {
    (2usize..=12, 0.8f64..1.6).prop_flat_map(|(n, f)| {
        let v = prop::collection::vec(-1.0f64..1.0, 2 * n);
        (Just(n), Just(f), v.clone(), v)
    })
}

proptest! {
    #[test]
    fn diff_is_linear((n, f, u, v) in chain_and_values(), a in -3.0f64..3.0, b in -3.0f64..3.0, order in 1usize..=4) {
        let cfg = ChainConfig64::new(n, f).unwrap();
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = diff(&combo, order, &cfg).unwrap();
        let du = diff(&u, order, &cfg).unwrap();
        let dv = diff(&v, order, &cfg).unwrap();
        let scale = (2.0 * n as f64).powi(order as i32);
        for i in 0..lhs.len() {
            prop_assert!((lhs[i] - (a * du[i] + b * dv[i])).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn second_difference_is_iterated_first((n, f, u, _) in chain_and_values()) {
        let cfg = ChainConfig64::new(n, f).unwrap();
        let twice = diff(&diff(&u, 1, &cfg).unwrap(), 1, &cfg).unwrap();
        prop_assert_eq!(diff(&u, 2, &cfg).unwrap(), twice);
    }

    #[test]
    fn parseval_holds_for_mean_zero_sequences((n, f, u, _) in chain_and_values()) {
        let cfg = ChainConfig64::new(n, f).unwrap();
        let v = Displacement::projected(u, &cfg).unwrap();
        let eps = cfg.epsilon();
        let energy: f64 = eps * v.values().iter().map(|x| x * x).sum::<f64>();
        let spectrum: f64 = fourier_coefficients(v.values(), &cfg).unwrap().iter().map(|(_, re, im)| re * re + im * im).sum();
        prop_assert!((energy - spectrum).abs() <= 1e-10);
    }

    #[test]
    fn differences_of_periodic_input_are_mean_zero((n, f, u, _) in chain_and_values(), order in 1usize..=4) {
        let cfg = ChainConfig64::new(n, f).unwrap();
        let d = diff(&u, order, &cfg).unwrap();
        let scale = (2.0 * n as f64).powi(order as i32) * d.len() as f64;
        prop_assert!(d.iter().sum::<f64>().abs() <= 1e-12 * scale);
    }
}
