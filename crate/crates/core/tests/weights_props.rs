use cameo_core::harness;
use cameo_core::rng::derive_seed;
use cameo_core::stats;
use cameo_core::weights::{self, WeightDistribution};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = WeightDistribution> {
    prop_oneof![
        (1.5f64..5.0).prop_map(|g| WeightDistribution::power_law(g).unwrap()),
        (0.2f64..4.0).prop_map(|r| WeightDistribution::exponential(r).unwrap()),
        (0.2f64..4.0).prop_map(|s| WeightDistribution::gaussian_tail(s).unwrap()),
    ]
}

proptest! {
    #[test]
    fn cdf_and_survival_are_complementary(d in family(), w in 1.0f64..50.0) {
        let (c, s) = (d.cdf(w), d.survival(w));
        prop_assert!((0.0..=1.0).contains(&c) && (0.0..=1.0).contains(&s));
        prop_assert!((c + s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantile_is_monotone(d in family(), u in 0.0f64..0.999, du in 1e-6f64..1e-3) {
        let a = d.quantile(u).unwrap();
        let b = d.quantile((u + du).min(0.9999)).unwrap();
        prop_assert!(a >= 1.0 && b >= a);
    }

    #[test]
    fn cdf_inverts_quantile(d in family(), u in 0.0f64..0.9999) {
        let w = d.quantile(u).unwrap();
        prop_assert!((d.cdf(w) - u).abs() < 1e-10);
    }

    #[test]
    fn spec_string_round_trips(d in family()) {
        let back: WeightDistribution = d.to_string().parse().unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn moment_is_positive_or_divergent(d in family(), alpha in -0.5f64..0.99) {
        match d.moment_a(alpha).finite() {
            Some(a) => prop_assert!(a > 0.0 && a.is_finite()),
            None => {
                let expected = matches!(d, WeightDistribution::PowerLaw { gamma } if gamma * (1.0 - alpha) <= 1.0);
                prop_assert!(expected);
            }
        }
    }
}

#[test]
fn ergodic_average_converges_to_moment() {
    let cases = [
        (WeightDistribution::power_law(3.0).unwrap(), 0.25),
        (WeightDistribution::exponential(1.0).unwrap(), 0.5),
        (WeightDistribution::gaussian_tail(1.0).unwrap(), 0.6),
    ];
    for (d, alpha) in cases {
        let a = d.moment_a(alpha).finite().unwrap();
        let errors: Vec<f64> = [1_000usize, 10_000, 100_000]
            .iter()
            .map(|&n| {
                let errs: Vec<f64> = (0..20u64)
                    .map(|t| {
                        let s = weights::sample_weights(&d, n, alpha, derive_seed(31, &[n as u64, t])).unwrap();
                        (s.normalizer / n as f64 - a).abs()
                    })
                    .collect();
                stats::median(&errs).unwrap()
            })
            .collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]), "{d}: {errors:?}");
    }
}

#[test]
fn max_weight_scaling() {
    let pl = WeightDistribution::power_law(3.0).unwrap();
    let rows = harness::validate_lemma1(&pl, &[1_000, 100_000, 1_000_000], 20, 5).unwrap();
    let last = rows.last().unwrap();
    assert!((0.4..=0.6).contains(&last.median_log_n_ratio), "{last:?}");
    for r in &rows {
        assert!((r.median_ratio - 1.0).abs() < 0.15, "{r:?}");
    }

    let e = WeightDistribution::exponential(1.0).unwrap();
    let rows = harness::validate_lemma1(&e, &[10_000], 20, 5).unwrap();
    let target = 1.0 + (10_000f64).ln();
    assert!((rows[0].expected_max_weight - target).abs() < 1e-9);
    assert!((0.8 * target..=1.2 * target).contains(&rows[0].median_max_weight), "{:?}", rows[0]);
}

#[test]
fn induced_tail_matches_hill_estimate() {
    let cases = [
        (WeightDistribution::exponential(1.0).unwrap(), 2.0),
        (WeightDistribution::exponential(1.0).unwrap(), 1.0),
        (WeightDistribution::power_law(3.0).unwrap(), 2.0),
    ];
    for (d, beta) in cases {
        let rows = harness::validate_lemma2(&d, beta, &[1_000_000], 3, 17).unwrap();
        let r = &rows[0];
        assert!((r.median_hill_exponent - r.predicted_exponent).abs() < 0.15, "{d} beta={beta}: {r:?}");
    }
}

#[test]
fn regularity_exponent_vanishes_only_for_fast_decay() {
    let e = WeightDistribution::exponential(1.0).unwrap();
    let g = WeightDistribution::gaussian_tail(1.0).unwrap();
    let p = WeightDistribution::power_law(3.0).unwrap();
    let tail = |d: &WeightDistribution| harness::validate_regularity(d, 30.0, 8).unwrap().last().unwrap().1;
    assert!(tail(&e).abs() < 0.05);
    assert!(tail(&g).abs() < 0.2);
    // -φ/φ' = ω/γ for a power law, so the ratio tends to -1/γ instead of 0.
    assert!((tail(&p) + 1.0 / 3.0).abs() < 0.1, "{}", tail(&p));
}
