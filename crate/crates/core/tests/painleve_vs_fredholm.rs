//! The Painlevé product formula against the Fredholm determinant.

use besselgap::fredholm::{generating_fn, ParameterSet};
use besselgap::painleve::{genfn_painleve, integrate_with, PainleveConfig};

fn check(alpha: f64, r: &[f64], s: &[f64], xs: &[f64], tol: f64) {
    let p = ParameterSet::new(alpha, r.to_vec(), s.to_vec(), 1.0).unwrap();
    let xmax = xs.iter().cloned().fold(0.0, f64::max);
    let cfg = PainleveConfig { eps: None, tol: 1e-12 };
    let traj = integrate_with(&p, xmax, &cfg).unwrap();
    for &x in xs {
        let fp = genfn_painleve(&traj, x).unwrap().f;
        let ff = generating_fn(&p.with_x(x).unwrap(), 16, 1e-13).unwrap().value();
        eprintln!("alpha={alpha} r={r:?} s={s:?} x={x}: painleve {fp:.15} fredholm {ff:.15} diff {:.2e}", (fp - ff).abs());
        assert!((fp - ff).abs() < tol, "alpha={alpha} r={r:?} s={s:?} x={x}: {fp} vs {ff}");
    }
}

#[test]
fn single_interval_gap() {
    for &a in &[0.0, 0.5, 2.0] {
        check(a, &[1.0], &[0.0], &[0.5, 2.0, 8.0, 20.0], 1e-6);
    }
}

#[test]
fn single_interval_thinned() {
    for &a in &[0.0, 0.5, 2.0] {
        check(a, &[1.0], &[0.4], &[1.0, 10.0, 30.0], 1e-6);
    }
}

#[test]
fn two_intervals_increasing_s() {
    for &a in &[0.0, 0.5, 2.0] {
        check(a, &[1.0, 2.0], &[0.0, 0.5], &[1.0, 5.0, 12.0], 1e-6);
    }
}

#[test]
fn two_intervals_decreasing_s() {
    for &a in &[0.0, 0.5, 2.0] {
        check(a, &[1.0, 2.5], &[0.7, 0.2], &[1.0, 5.0, 12.0], 1e-6);
    }
}

#[test]
fn three_intervals_mixed_signs() {
    for &a in &[0.0, 0.5, 2.0] {
        check(a, &[0.5, 1.0, 2.0], &[0.3, 0.0, 0.6], &[1.0, 4.0, 10.0], 1e-6);
    }
}
