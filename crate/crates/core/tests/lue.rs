//! Finite-n Laguerre ensemble: Fredholm against Hankel, the hard-edge limit,
//! and the sampler against exact gap probabilities.

use besselgap::fredholm::{generating_fn, ParameterSet};
use besselgap::lue::{hankel_ratio, lue_genfn, sample_smallest, sample_spectrum};
use besselgap::LueModel;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

fn lue_value(n: usize, alpha: f64, lambdas: &[f64], s: &[f64]) -> f64 {
    let model = LueModel::new(n, alpha).unwrap();
    let sc: Vec<Complex64> = s.iter().map(|&v| v.into()).collect();
    lue_genfn(&model, lambdas, &sc, 16, 1e-13).unwrap().value()
}

#[test]
fn fredholm_equals_hankel_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let n = rng.random_range(1..=8);
        let alpha = rng.random_range(-0.5..2.0);
        let k = rng.random_range(1..=3);
        let mut lambdas: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..3.0 * n as f64)).collect();
        lambdas.sort_by(f64::total_cmp);
        let s: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let fred = lue_value(n, alpha, &lambdas, &s);
        let hank = hankel_ratio(n, alpha, &lambdas, &s).unwrap();
        assert!(
            (fred - hank).abs() <= 1e-8 * hank.abs(),
            "n {n} alpha {alpha} lambdas {lambdas:?} s {s:?}: {fred} vs {hank}"
        );
    }
}

#[test]
fn hard_edge_scaling_converges() {
    let (x, s) = ([1.0, 2.0], [0.5, 0.2]);
    let limit = generating_fn(&ParameterSet::new(0.0, x.to_vec(), s.to_vec(), 1.0).unwrap(), 16, 1e-13)
        .unwrap()
        .value();
    let dev: Vec<f64> = [25usize, 50, 100]
        .iter()
        .map(|&n| {
            let lam: Vec<f64> = x.iter().map(|v| v / (4.0 * n as f64)).collect();
            (lue_value(n, 0.0, &lam, &s) - limit).abs()
        })
        .collect();
    assert!(dev.windows(2).all(|w| w[1] < w[0]), "{dev:?}");
    // The correction is O(1/n²).
    assert!(dev[0] / dev[2] > 10.0, "{dev:?}");
}

#[test]
fn sampler_reproduces_the_finite_n_gap_probability() {
    let (n, alpha, lam) = (10, 0.5, 0.3);
    let exact = lue_value(n, alpha, &[lam], &[0.0]);
    let draws = 4000u64;
    let empty = (0..draws)
        .into_par_iter()
        .filter(|&seed| sample_spectrum(n, alpha, seed).unwrap()[0] > lam)
        .count();
    let p = empty as f64 / draws as f64;
    let se = (exact * (1.0 - exact) / draws as f64).sqrt();
    assert!((p - exact).abs() < 3.0 * se, "{p} vs {exact} (se {se})");
}

#[test]
fn sampler_reproduces_a_two_interval_generating_function() {
    // E s_1^{n(0,λ1)} s_2^{n(λ1,λ2)} by Monte Carlo at n = 6.
    let (n, alpha, lam, s) = (6, 0.0, [0.5, 2.0], [0.3, 0.6]);
    let exact = lue_value(n, alpha, &lam, &s);
    let draws = 4000u64;
    let vals: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|seed| {
            let ev = sample_smallest(n, alpha, seed, n).unwrap();
            let n1 = ev.iter().filter(|&&v| v < lam[0]).count() as i32;
            let n2 = ev.iter().filter(|&&v| v >= lam[0] && v < lam[1]).count() as i32;
            s[0].powi(n1) * s[1].powi(n2)
        })
        .collect();
    let mean = vals.iter().sum::<f64>() / draws as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let se = (var / draws as f64).sqrt();
    assert!((mean - exact).abs() < 3.5 * se, "{mean} vs {exact} (se {se})");
}

#[test]
fn hankel_ratio_with_unit_multipliers_is_one() {
    assert!((hankel_ratio(8, 1.5, &[1.0, 4.0, 9.0], &[1.0, 1.0, 1.0]).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn scaled_smallest_eigenvalue_has_the_limiting_mean() {
    // E ζ_1 = ∫_0^∞ P(ζ_1 > x) dx = ∫_0^∞ e^{−x/4} dx = 4 at α = 0.
    let n = 100;
    let draws = 2000u64;
    let v: Vec<f64> = (0..draws)
        .into_par_iter()
        .map(|seed| 4.0 * n as f64 * sample_smallest(n, 0.0, seed, 1).unwrap()[0])
        .collect();
    let mean = v.iter().sum::<f64>() / draws as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
    let se = (var / draws as f64).sqrt();
    assert!((mean - 4.0).abs() < 3.0 * se, "{mean} (se {se})");
}
