//! The ratio probability `Q_α(r) = P(ζ_2/ζ_1 > r)` by its two routes.

use besselgap::painleve::ratio::{ratio_q, ratio_q_genfn, RatioConfig};

#[test]
fn routes_agree_away_from_the_continuation_regime() {
    let cfg = RatioConfig::default();
    for &(alpha, r) in &[(0.5, 2.0), (1.0, 3.0), (5.0, 8.0)] {
        let q = ratio_q(alpha, r, &cfg).unwrap();
        assert!(!q.continued);
        assert!(q.discrepancy < 1e-8, "{q:?}");
        assert!(q.route_a > 0.0 && q.route_a < 1.0);
    }
}

#[test]
fn ratio_probability_starts_at_one_and_decreases() {
    let cfg = RatioConfig::default();
    // ζ_2 > ζ_1 almost surely, so Q(r) → 1 as r ↓ 1.
    assert!(ratio_q_genfn(0.5, 1.0 + 1e-2, &cfg).unwrap() > 0.999);
    let vals: Vec<f64> = [1.2, 2.0, 4.0, 8.0].iter().map(|&r| ratio_q_genfn(0.5, r, &cfg).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]), "{vals:?}");
}

#[test]
fn larger_order_shrinks_the_ratio() {
    // Larger α pushes the smallest particle away from the hard edge, which
    // makes ζ_2/ζ_1 smaller.
    let cfg = RatioConfig::default();
    let q0 = ratio_q_genfn(0.0, 3.0, &cfg).unwrap();
    let q2 = ratio_q_genfn(2.0, 3.0, &cfg).unwrap();
    assert!(q2 < q0, "{q0} vs {q2}");
}

#[test]
fn continuation_to_order_zero_is_flagged_and_accurate() {
    let q = ratio_q(0.0, 4.0, &RatioConfig::default()).unwrap();
    assert!(q.continued);
    assert!(q.discrepancy < 1e-6, "{q:?}");
}
