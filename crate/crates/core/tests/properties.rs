use std::f64::consts::PI;

use ginikit::empirical::{gini_naive, gini_sorted};
use ginikit::gini::{excess_tail_transform, gini_monte_carlo_scaled, gini_nb_fourier};
use ginikit::quadrature::QuadratureSpec;
use ginikit::{ComplexValue, DistributionSpec, SupportStart};
use proptest::prelude::*;

fn discrete_spec() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        (0.05f64..20.0).prop_map(|l| DistributionSpec::poisson(l).unwrap()),
        (0.05f64..0.95, any::<bool>()).prop_map(|(p, one)| {
            let start = if one { SupportStart::One } else { SupportStart::Zero };
            DistributionSpec::geometric(p, start).unwrap()
        }),
        (0.05f64..15.0, 0.1f64..0.95).prop_map(|(k, p)| DistributionSpec::negative_binomial(k, p).unwrap()),
    ]
}

fn any_spec() -> impl Strategy<Value = DistributionSpec> {
    prop_oneof![
        discrete_spec(),
        (0.1f64..10.0).prop_map(|r| DistributionSpec::exponential(r).unwrap()),
        (1.2f64..6.0, 0.2f64..5.0).prop_map(|(a, x)| DistributionSpec::pareto(a, x).unwrap()),
        (0.0f64..3.0, 0.1f64..3.0).prop_map(|(a, w)| DistributionSpec::uniform(a, a + w).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pmf_and_tail_sum_to_one(spec in discrete_spec(), j in 0u64..60) {
        let head: f64 = (0..=j).map(|i| spec.pmf(i).unwrap()).sum();
        prop_assert!((head + spec.tail(j as f64) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn char_fn_conjugate_symmetry(spec in any_spec(), theta in -50.0f64..50.0) {
        let a = spec.char_fn(theta);
        let b = spec.char_fn(-theta);
        prop_assert!((a - b.conj()).norm() < 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn discrete_excess_differences(spec in discrete_spec(), j in 0u64..60) {
        let d = spec.excess_tail_discrete(j) - spec.excess_tail_discrete(j + 1);
        prop_assert!((d - spec.tail(j as f64) / spec.mean()).abs() < 1e-12);
    }

    #[test]
    fn nb_with_unit_shape_is_geometric(p in 0.02f64..0.98, j in 0u64..80, theta in -6.0f64..6.0) {
        let nb = DistributionSpec::negative_binomial(1.0, p).unwrap();
        let geo = DistributionSpec::geometric(p, SupportStart::Zero).unwrap();
        prop_assert!((nb.pmf(j).unwrap() - geo.pmf(j).unwrap()).abs() < 1e-12);
        prop_assert!((nb.tail(j as f64) - geo.tail(j as f64)).abs() < 1e-12);
        prop_assert!((nb.char_fn(theta) - geo.char_fn(theta)).norm() < 1e-12);
    }

    #[test]
    fn exponential_is_its_own_excess(rate in 0.05f64..20.0, x in 0.0f64..10.0) {
        let e = DistributionSpec::exponential(rate).unwrap();
        prop_assert!((e.excess_tail(x) - e.tail(x)).abs() < 1e-15);
    }

    #[test]
    fn excess_transform_matches_direct_sum(spec in discrete_spec(), theta in 0.05f64..(2.0 * PI - 0.05)) {
        let mut direct = ComplexValue::new(0.0, 0.0);
        let mut j = 0u64;
        loop {
            let s = spec.excess_tail_discrete(j);
            direct += ComplexValue::from_polar(s, theta * j as f64);
            if s < 1e-15 && j > 10 {
                break;
            }
            j += 1;
        }
        let got = excess_tail_transform(&spec, theta).unwrap();
        prop_assert!((got - direct).norm() < 1e-8, "{} vs {}", got, direct);
    }

    #[test]
    fn nb_fourier_in_unit_interval(k in 0.01f64..50.0, p in 0.01f64..0.99) {
        let r = gini_nb_fourier(k, p, &QuadratureSpec::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.value));
        prop_assert!(r.imag_residual.unwrap() < 1e-6);
    }

    #[test]
    fn empirical_scale_and_permutation_invariance(
        mut xs in prop::collection::vec(0.0f64..100.0, 2..300),
        c in 0.01f64..100.0,
        rot in 0usize..300,
    ) {
        prop_assume!(xs.iter().any(|&x| x > 0.0));
        let g = gini_sorted(&xs).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
        prop_assert!((gini_sorted(&scaled).unwrap() - g).abs() < 1e-13);
        let n = xs.len();
        xs.rotate_left(rot % n);
        xs.reverse();
        prop_assert_eq!(gini_sorted(&xs).unwrap(), g);
        prop_assert!(g <= 1.0 - 1.0 / n as f64 + 1e-12);
    }
}

#[test]
fn nb_fourier_unit_shape_closed_form() {
    for i in 1..=9 {
        let p = i as f64 / 10.0;
        let g = gini_nb_fourier(1.0, p, &QuadratureSpec::default()).unwrap().value;
        assert!((g - 1.0 / (2.0 - p)).abs() < 1e-8, "p={p}: {g}");
    }
}

#[test]
fn sorted_identity_matches_double_loop() {
    let spec = DistributionSpec::negative_binomial(0.5, 0.3).unwrap();
    for n in [2, 17, 500, 2000] {
        let xs = spec.sample(n as u64, n).unwrap();
        if xs.iter().all(|&x| x == 0.0) {
            continue;
        }
        let a = gini_sorted(&xs).unwrap();
        let b = gini_naive(&xs).unwrap();
        assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
    }
    let xs = DistributionSpec::exponential(1.0).unwrap().sample(3, 2000).unwrap();
    assert!((gini_sorted(&xs).unwrap() - gini_naive(&xs).unwrap()).abs() < 1e-12);
}

#[test]
fn monte_carlo_scale_invariance() {
    for spec in [
        DistributionSpec::exponential(1.0).unwrap(),
        DistributionSpec::negative_binomial(2.0, 0.5).unwrap(),
        DistributionSpec::poisson(3.0).unwrap(),
    ] {
        let base = gini_monte_carlo_scaled(&spec, 200_000, 11, 1.0).unwrap();
        for c in [2.0, 10.0] {
            // an independent seed, so the comparison is a genuine two-sample check
            let r = gini_monte_carlo_scaled(&spec, 200_000, 12, c).unwrap();
            let se = (base.mc_standard_error.unwrap().powi(2) + r.mc_standard_error.unwrap().powi(2)).sqrt();
            assert!((r.value - base.value).abs() < 3.0 * se, "{spec} c={c}");
        }
    }
}
