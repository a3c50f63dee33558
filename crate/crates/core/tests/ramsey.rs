use dice_core::ramsey::{saddle_path, steady_state, RamseyParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = RamseyParams> {
    (0.5f64..3.0, 0.005f64..0.05, 0.02f64..0.1, 0.2f64..0.5, 0.5f64..2.0)
        .prop_map(|(alpha, rho, delta, gamma, a)| RamseyParams::stationary(alpha, rho, delta, gamma, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steady_state_is_a_saddle(p in params()) {
        let ss = steady_state(&p).unwrap();
        let (dc, dk) = p.rhs(ss.c_star, ss.k_star);
        prop_assert!(dc.abs() < 1e-12 && dk.abs() < 1e-12);
        prop_assert!(ss.eigenvalues[0].re < 0.0 && ss.eigenvalues[1].re > 0.0);
        prop_assert!(ss.eigenvalues[0].im == 0.0);
    }

    #[test]
    fn saddle_path_approaches_the_steady_state_monotonically(p in params(), ratio in 0.3f64..2.0) {
        let ss = steady_state(&p).unwrap();
        let k0 = ratio * ss.k_star;
        let sp = saddle_path(&p, k0, 400.0).unwrap();
        let path = &sp.path;
        let below = k0 < ss.k_star;
        // handing over to the linearised manifold may step by the capture tolerance
        let slack = 1e-6 * ss.c_star.max(ss.k_star);
        for w in path.k.windows(2) {
            let ok = if below { w[1] >= w[0] - slack } else { w[1] <= w[0] + slack };
            prop_assert!(ok);
        }
        for w in path.c.windows(2) {
            let ok = if below { w[1] >= w[0] - slack } else { w[1] <= w[0] + slack };
            prop_assert!(ok);
        }
        // below k* the path saves (k' > 0), above it dissaves
        let kdot = p.k_nullcline(k0) - sp.c0;
        prop_assert_eq!(kdot > 0.0, below);
        let (c_end, k_end) = (*path.c.last().unwrap(), *path.k.last().unwrap());
        prop_assert!((k_end / ss.k_star - 1.0).abs() < 1e-3);
        prop_assert!((c_end / ss.c_star - 1.0).abs() < 1e-3);
    }

    #[test]
    fn initial_consumption_rises_with_capital(p in params(), lo in 0.3f64..1.0, step in 0.05f64..1.0) {
        let ss = steady_state(&p).unwrap();
        let a = saddle_path(&p, lo * ss.k_star, 300.0).unwrap();
        let b = saddle_path(&p, (lo + step) * ss.k_star, 300.0).unwrap();
        prop_assert!(b.c0 > a.c0);
    }
}
