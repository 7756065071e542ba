use ginikit::asymptotics::{
    clt_normalization_check, gini_large_k, gini_small_k, small_k_pmf_check, small_k_slope, AsymptoticConstants,
};
use ginikit::gini::gini_nb_fourier;
use ginikit::quadrature::QuadratureSpec;

fn fourier(k: f64, p: f64) -> f64 {
    gini_nb_fourier(k, p, &QuadratureSpec::default()).unwrap().value
}

#[test]
fn small_k_remainder_shrinks() {
    for p in [0.1, 0.5, 0.9] {
        let c = small_k_slope(p).unwrap();
        let r = |k: f64| (fourier(k, p) - 1.0 - c * k).abs() / k;
        let (r3, r2, r1) = (r(1e-3), r(1e-2), r(1e-1));
        assert!(r3 < r2 && r2 < r1, "p={p}: {r3} {r2} {r1}");
        assert!(r3 < 0.05 * c.abs(), "p={p}: {r3} vs c={c}");
        // the asymptotic evaluator gives the same straight line
        let g = gini_small_k(1e-3, p).unwrap().value;
        assert!((g - 1.0 - c * 1e-3).abs() < 1e-15);
    }
}

#[test]
fn large_k_remainder_shrinks() {
    for p in [0.1, 0.5, 0.9] {
        let consts = AsymptoticConstants::from_p(p).unwrap();
        let s = |k: f64| (k.sqrt() * fourier(k, p) - consts.large_k_limit).abs();
        let (s2, s3, s4) = (s(1e2), s(1e3), s(1e4));
        assert!(s2 > s3 && s3 > s4, "p={p}: {s2} {s3} {s4}");
        assert!(s4 / consts.large_k_limit <= 0.05);
        let g = gini_large_k(1e4, consts.lambda).unwrap().value;
        assert!((g * 100.0 - consts.large_k_limit).abs() < 1e-14);
    }
    let g = fourier(1e4, 0.5);
    let limit = (2.0 / std::f64::consts::PI).sqrt();
    assert!((1e2 * g - limit).abs() / limit <= 0.05);
}

#[test]
fn pmf_linearisation() {
    for lambda in [0.1, 1.0, 10.0] {
        for j in 0..=2 {
            let r = small_k_pmf_check(j, 1e-3, lambda).unwrap();
            assert!(r.remainder < 0.01, "j={j} lambda={lambda}: {r:?}");
        }
    }
}

#[test]
fn normal_limit() {
    let s = clt_normalization_check(1e4, 1.0, 100_000, 5).unwrap();
    assert_eq!(s.n, 100_000);
    assert!(s.mean.abs() < 0.02, "{s:?}");
    assert!((s.variance - 1.0).abs() < 0.03, "{s:?}");
    assert!(s.ks < 0.01, "{s:?}");
}
