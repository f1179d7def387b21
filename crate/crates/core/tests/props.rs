//! Property tests for the structural invariants.

use catbbm_core::special::normal_cdf;
use catbbm_core::{
    expected_count_front, first_passage_cdf, gumbel_mixture_cdf, ks_distance,
    sample_position_given_alive, Ecdf, ModelParams, RngStream,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gumbel_mixture_is_a_valid_cdf(
        samples in proptest::collection::vec(1e-3..50.0f64, 1..40),
        beta in 0.1..3.0f64,
    ) {
        let mut prev = 0.0;
        for i in -12..=12 {
            let y = i as f64;
            let v = gumbel_mixture_cdf(beta, y, &samples).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= prev);
            prev = v;
        }
        prop_assert!(gumbel_mixture_cdf(beta, -60.0 / beta, &samples).unwrap() < 1e-6);
        prop_assert!(gumbel_mixture_cdf(beta, 60.0 / beta, &samples).unwrap() > 1.0 - 1e-6);
    }

    #[test]
    fn expected_count_is_bounded_and_monotone_in_the_level(
        beta in 0.2..2.5f64,
        t in 0.5..40.0f64,
        y in 0.0..4.0f64,
    ) {
        let params = ModelParams::new(beta, 0.0, t).unwrap();
        let v = expected_count_front(&params, y).unwrap().value;
        prop_assert!(v >= 0.0);
        prop_assert!(v <= (-beta * y).exp() + 1e-12);
        let higher = expected_count_front(&params, y + 0.25).unwrap().value;
        prop_assert!(higher <= v + 1e-12);
    }

    #[test]
    fn ecdf_is_a_valid_cdf(samples in proptest::collection::vec(-1e3..1e3f64, 1..200)) {
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let e = Ecdf::new(samples).unwrap();
        prop_assert_eq!(e.eval(max), 1.0);
        prop_assert_eq!(e.eval(min - 1.0), 0.0);
        let mut prev = 0.0;
        for i in 0..20 {
            let y = min + (max - min) * i as f64 / 19.0;
            let v = e.eval(y);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn ks_statistic_stays_in_unit_interval(
        samples in proptest::collection::vec(-5.0..5.0f64, 1..100),
    ) {
        let e = Ecdf::new(samples).unwrap();
        let d = ks_distance(&e, normal_cdf).statistic;
        prop_assert!((0.0..=1.0).contains(&d));
    }

    #[test]
    fn first_passage_cdf_is_monotone(x0 in 0.1..5.0f64) {
        let mut prev = 0.0;
        for i in 1..=40 {
            let s = i as f64 * 0.5;
            let v = first_passage_cdf(x0, s);
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn alive_position_draws_respect_the_budget(
        delta in 0.01..10.0f64,
        budget in 0.01..10.0f64,
        seed in 0..u64::MAX,
    ) {
        let mut rng = RngStream::new(seed, 0).rng();
        let j = sample_position_given_alive(delta, budget, &mut rng).unwrap();
        prop_assert!(j.l >= 0.0 && j.l < budget);
        prop_assert!(j.x.is_finite());
    }
}
