mod common;

use proptest::prelude::*;
use tipping::dynamics;
use tipping::model::{self, State};

fn close(a: [f64; 3], b: [f64; 3], tol: f64) -> bool {
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trajectories_stay_in_the_unit_cube(
        cfg in common::config_any_prices(),
        d in common::unit(), w in common::unit(), c in common::unit(),
    ) {
        let traj = dynamics::integrate(&cfg, State::new(d, w, c), 5.0, 0.01).unwrap();
        prop_assert!(traj.max_clamp <= dynamics::CLAMP_TOLERANCE);
        prop_assert!(traj.states.iter().all(|s| s.in_unit_cube()));
    }

    #[test]
    fn relabeling_negates_the_rates(
        cfg in common::config_any_prices(),
        d in common::interior(), w in common::interior(), c in common::interior(),
    ) {
        let s = State::new(d, w, c);
        let f = model::rhs(&cfg, &s).unwrap();
        let g = model::rhs(&cfg.swapped(), &s.mirrored()).unwrap();
        prop_assert!(close(f, g.map(|x| -x), 1e-12), "{f:?} vs {g:?}");
    }

    #[test]
    fn cook_rate_ignores_diners_and_waiters(
        cfg in common::config_any_prices(),
        d1 in common::unit(), w1 in common::unit(),
        d2 in common::unit(), w2 in common::unit(),
        c in common::unit(),
    ) {
        let a = model::rhs(&cfg, &State::new(d1, w1, c)).unwrap()[2];
        let b = model::rhs(&cfg, &State::new(d2, w2, c)).unwrap()[2];
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn rates_are_invariant_to_the_price_unit(
        cfg in common::config_any_prices(),
        scale in 0.1..10.0f64,
        d in common::interior(), w in common::interior(), c in common::interior(),
    ) {
        let s = State::new(d, w, c);
        let f = model::rhs(&cfg, &s).unwrap();
        let g = model::rhs(&cfg.price_scaled(scale), &s).unwrap();
        prop_assert!(close(f, g, 1e-12), "{f:?} vs {g:?}");
        let p = model::profit(&cfg, &s);
        let q = model::profit(&cfg.price_scaled(scale), &s);
        prop_assert!((q - scale * p).abs() <= 1e-10 * (1.0 + q.abs()));
    }

    #[test]
    fn more_tips_never_raise_own_value(
        cfg in common::config(),
        d in common::interior(), w in common::interior(), c in common::interior(),
        bump in 0.001..0.2f64,
    ) {
        let s = State::new(d, w, c);
        let mut tipped = cfg;
        tipped.ours.tip_rate += bump;
        let base = model::value(&cfg, &s, tipping::Restaurant::Ours);
        // Extra tips raise gratuity but not the count-based quality.
        prop_assert!(model::value(&tipped, &s, tipping::Restaurant::Ours) < base);
    }
}
