//! Finite differences as an independent oracle for the analytic derivatives.

use impatience::discount::{index_of_di, index_of_di_via_rate_slope, rate_profile};
use impatience::{DerivativeMode, Discount, DiscountSpec, TimeGrid};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn built_in() -> impl Strategy<Value = DiscountSpec> {
    prop_oneof![
        (0.005..0.5f64).prop_map(|r| DiscountSpec::exponential(r).unwrap()),
        (0.01..1.0f64, 0.01..1.0f64)
            .prop_map(|(a, h)| DiscountSpec::generalized_hyperbolic(a, h).unwrap()),
        (0.01..1.0f64).prop_map(|h| DiscountSpec::proportional_hyperbolic(h).unwrap()),
        (0.01..1.0f64).prop_map(|h| DiscountSpec::zero_speed_hyperbolic(h).unwrap()),
        (0.01..1.0f64).prop_map(|a| DiscountSpec::slow_weibull(a).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn finite_differences_agree_with_closed_forms(spec in built_in(), t in 1e-2..100.0f64) {
        let a = spec.derivatives(t, DerivativeMode::Analytic).unwrap();
        let n = spec.derivatives(t, DerivativeMode::FiniteDifference { step: 1e-5 }).unwrap();
        prop_assert!(rel(a.value, n.value) < 1e-6);
        prop_assert!(rel(a.first, n.first) < 1e-6, "D' {} vs {}", a.first, n.first);
        prop_assert!(rel(a.second, n.second) < 1e-6, "D'' {} vs {}", a.second, n.second);
    }

    #[test]
    fn index_routes_agree(spec in built_in(), t in 1e-3..100.0f64) {
        let a = index_of_di(&spec, t).unwrap();
        let b = index_of_di_via_rate_slope(&spec, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0));
    }

    #[test]
    fn generalized_hyperbolic_index_ignores_alpha(
        a1 in 0.01..2.0f64, a2 in 0.01..2.0f64, h in 0.01..1.0f64, t in 0.0..100.0f64,
    ) {
        let d1 = DiscountSpec::generalized_hyperbolic(a1, h).unwrap();
        let d2 = DiscountSpec::generalized_hyperbolic(a2, h).unwrap();
        prop_assert!((index_of_di(&d1, t).unwrap() - index_of_di(&d2, t).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn exponential_index_vanishes(rate in 1e-4..5.0f64, t in 0.0..100.0f64) {
        let e = DiscountSpec::exponential(rate).unwrap();
        prop_assert!(index_of_di(&e, t).unwrap().abs() <= 1e-12);
        let fd = e.rates(t, DerivativeMode::finite_difference()).unwrap();
        prop_assert!(fd.index.abs() <= 1e-6 * rate);
    }

    #[test]
    fn values_stay_in_unit_interval_and_decrease(spec in built_in()) {
        let grid = TimeGrid::log(1e-3, 1e3, 200).unwrap();
        prop_assert_eq!(spec.value(0.0).unwrap(), 1.0);
        let mut prev = 1.0;
        for &t in grid.points() {
            let v = spec.value(t).unwrap();
            prop_assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }
}

#[test]
fn halving_the_step_shrinks_the_error() {
    let specs = [
        DiscountSpec::generalized_hyperbolic(0.3, 0.2).unwrap(),
        DiscountSpec::proportional_hyperbolic(0.5).unwrap(),
        DiscountSpec::zero_speed_hyperbolic(0.1).unwrap(),
        DiscountSpec::slow_weibull(0.4).unwrap(),
    ];
    for spec in &specs {
        for t in [0.5, 2.0, 10.0, 60.0] {
            let a = spec.derivatives(t, DerivativeMode::Analytic).unwrap();
            let coarse = spec.derivatives(t, DerivativeMode::FiniteDifference { step: 4e-2 }).unwrap();
            let fine = spec.derivatives(t, DerivativeMode::FiniteDifference { step: 2e-2 }).unwrap();
            let e1 = (coarse.first - a.first).abs();
            let e2 = (fine.first - a.first).abs();
            assert!(e1 >= 3.0 * e2, "{} t={t}: D' errors {e1:e} -> {e2:e}", spec.label());
            // The second-derivative step scales with √step, so these stencils shrink by 2.
            let coarse = spec.derivatives(t, DerivativeMode::FiniteDifference { step: 1.6e-3 }).unwrap();
            let fine = spec.derivatives(t, DerivativeMode::FiniteDifference { step: 4e-4 }).unwrap();
            let e1 = (coarse.second - a.second).abs();
            let e2 = (fine.second - a.second).abs();
            assert!(e1 >= 3.0 * e2, "{} t={t}: D'' errors {e1:e} -> {e2:e}", spec.label());
        }
    }
}

#[test]
fn finite_difference_profile_tracks_analytic_profile() {
    let spec = DiscountSpec::generalized_hyperbolic(0.2, 0.1).unwrap();
    let grid = TimeGrid::linear(0.0, 100.0, 201).unwrap();
    let a = rate_profile(&spec, &grid, DerivativeMode::Analytic).unwrap();
    let n = rate_profile(&spec, &grid, DerivativeMode::finite_difference()).unwrap();
    for k in 0..grid.len() {
        assert!(rel(a.r[k], n.r[k]) < 1e-7);
        assert!((a.i_di[k] - n.i_di[k]).abs() < 1e-5 * a.ir[k]);
    }
}
