//! Mixture invariants: index decomposition, rate bounds, DI preservation and
//! associativity.

use impatience::comparison::{classify, Verdict, DEFAULT_TOL};
use impatience::discount::{time_preference_rate, Tabulated};
use impatience::mixture::{decompose_index, mix, mixture_rate, Curve, Interpretation, Mixture};
use impatience::{DerivativeMode, Discount, DiscountSpec, Family, TimeGrid};
use proptest::prelude::*;

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

/// Log-concave table `exp(-a t - b t²)` on `[0, 10]`: increasing impatience.
fn ii_table() -> impl Strategy<Value = DiscountSpec> {
    (0.01..0.3f64, 0.001..0.05f64).prop_map(|(a, b)| {
        let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
        let tab = Tabulated::from_fn(times, |t| (-a * t - b * t * t).exp()).unwrap();
        DiscountSpec::new(Family::Tabulated(tab), "ii").unwrap()
    })
}

fn any_spec() -> impl Strategy<Value = DiscountSpec> {
    prop_oneof![4 => built_in(), 1 => ii_table()]
}

fn weighted(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<(DiscountSpec, f64)>> {
    prop::collection::vec((any_spec(), 0.05..1.0f64), n)
}

fn grid_for(m: &Mixture) -> TimeGrid {
    let hi = m.domain().1.min(60.0);
    TimeGrid::log(1e-3, hi, 120).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn index_decomposes_into_weighted_average_plus_residual(components in weighted(2..=6)) {
        let m = mix(components).unwrap();
        let rep = decompose_index(&m, &grid_for(&m)).unwrap();
        prop_assert!(rep.max_identity_error() <= 1e-7, "{}", rep.max_identity_error());
        for k in 0..rep.times.len() {
            let a = &rep.alpha[k];
            prop_assert!(a.iter().all(|x| *x >= 0.0));
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
            prop_assert!(rep.n_values[k] >= 0.0 && rep.q[k] >= 0.0);
        }
        prop_assert!(rep.min_lower_bound_margin() >= -1e-9, "{}", rep.min_lower_bound_margin());
    }

    #[test]
    fn mixture_rate_is_a_weighted_average(components in weighted(2..=5), t in 1e-2..60.0f64) {
        let m = mix(components).unwrap();
        prop_assume!(t <= m.domain().1);
        let r = mixture_rate(&m, t).unwrap();
        let rates: Vec<f64> = m
            .components()
            .iter()
            .map(|c| time_preference_rate(&c.curve, t).unwrap())
            .collect();
        let lo = rates.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12));
        let d = m.derivatives(t, DerivativeMode::Analytic).unwrap();
        prop_assert!((r - (-d.first / d.value)).abs() <= 1e-10 * r.max(1.0));
    }

    #[test]
    fn mixtures_of_di_curves_are_di(components in prop::collection::vec((built_in(), 0.05..1.0f64), 2..=4)) {
        let m = mix(components).unwrap();
        let g = if m.singular_at_origin() {
            TimeGrid::log(1e-3, 20.0, 300).unwrap()
        } else {
            TimeGrid::linear(0.0, 20.0, 300).unwrap()
        };
        let v = classify(&m, &g, DEFAULT_TOL).unwrap().verdict;
        prop_assert!(matches!(v, Verdict::Di | Verdict::StrictlyDi), "{:?}", v);
    }

    #[test]
    fn nested_mixing_matches_flat_weights(
        specs in prop::array::uniform3(built_in()),
        w in prop::array::uniform3(0.05..1.0f64),
        t in 0.0..50.0f64,
    ) {
        let total: f64 = w.iter().sum();
        let flat = mix(vec![
            (specs[0].clone(), w[0] / total),
            (specs[1].clone(), w[1] / total),
            (specs[2].clone(), w[2] / total),
        ]).unwrap();
        let inner = mix(vec![(specs[0].clone(), w[0]), (specs[1].clone(), w[1])]).unwrap();
        let nested = Mixture::new(
            vec![(Curve::from(inner), w[0] + w[1]), (Curve::from(specs[2].clone()), w[2])],
            Interpretation::GroupAverage,
        ).unwrap();
        prop_assert!((flat.value(t).unwrap() - nested.value(t).unwrap()).abs() <= 1e-12);
    }
}

#[test]
fn coinciding_rates_leave_no_residual() {
    let e = DiscountSpec::exponential(0.07).unwrap();
    let m = mix(vec![(e.clone(), 0.3), (e.with_label("again"), 0.7)]).unwrap();
    assert_eq!(m.warnings().len(), 1);
    let rep = decompose_index(&m, &TimeGrid::linear(0.0, 50.0, 51).unwrap()).unwrap();
    assert!(rep.q.iter().all(|q| *q == 0.0));
    assert!(rep.i_decomposed.iter().all(|i| i.abs() <= 1e-15));
}

#[test]
fn rates_survive_component_underflow() {
    let m = Mixture::equal(
        vec![
            DiscountSpec::exponential(0.01).unwrap(),
            DiscountSpec::exponential(0.02).unwrap(),
            DiscountSpec::exponential(0.03).unwrap(),
        ],
        Interpretation::ProbabilityWeights,
    )
    .unwrap();
    assert_eq!(mixture_rate(&m, 1e6).unwrap(), 0.01);
    assert_eq!(mixture_rate(&m, 0.0).unwrap(), 0.02);
}
