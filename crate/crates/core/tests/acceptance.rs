//! Acceptance suite: one PASS/FAIL line per criterion, with the measured
//! quantities. Exits non-zero when any criterion fails.

use besselgap::apps::{count_distribution, degenerate_probe, loglog_slope, mean_count, Probe};
use besselgap::fredholm::{generating_fn, ParameterSet};
use besselgap::lue::{hankel_ratio, lue_genfn, sample_smallest};
use besselgap::painleve::ratio::{ratio_q, RatioConfig};
use besselgap::painleve::scalar::tracy_widom_integrate;
use besselgap::specfun::bessel_j;
use besselgap::{bform, genfn_painleve, integrate_with, LueModel, PainleveConfig, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

const FREDHOLM_TOL: f64 = 1e-13;

fn fredholm(p: &ParameterSet) -> Result<f64> {
    Ok(generating_fn(p, 16, FREDHOLM_TOL)?.value())
}

/// Random admissible configurations: increasing `r` and multipliers in
/// `[0, 1)`; adjacent multipliers (including `s_{k+1} = 1`) differ.
fn random_configs(seed: u64, alpha: f64, k: usize, count: usize) -> Vec<ParameterSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut r = Vec::with_capacity(k);
        let mut acc = 0.0;
        for j in 0..k {
            acc += if j == 0 { rng.random_range(0.3..1.5) } else { rng.random_range(0.2..1.5) };
            r.push(acc);
        }
        let s: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        if let Ok(p) = ParameterSet::new(alpha, r, s, 1.0) {
            out.push(p);
        }
    }
    out
}

fn criterion_1_configs() -> Vec<ParameterSet> {
    let mut all = Vec::new();
    for (ia, &alpha) in [0.0, 0.5, 2.0].iter().enumerate() {
        for k in 1..=3 {
            all.extend(random_configs(100 * ia as u64 + k as u64, alpha, k, 5));
        }
    }
    all
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", ")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn route_equivalence() -> Result<Outcome> {
    let xs = [0.5, 1.0, 4.0];
    let cfg = PainleveConfig { eps: None, tol: 1e-12 };
    let worst = criterion_1_configs()
        .par_iter()
        .map(|p| -> Result<(f64, String)> {
            let traj = integrate_with(p, 4.0, &cfg)?;
            let mut w = (0.0f64, String::new());
            for &x in &xs {
                let d = (genfn_painleve(&traj, x)?.f - fredholm(&p.with_x(x)?)?).abs();
                if d >= w.0 {
                    w = (d, format!("alpha={} r={:?} s={:?} x={x}", p.alpha, p.r, p.s));
                }
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0, String::new()), |a, b| if b.0 >= a.0 { b } else { a });
    Ok(outcome(worst.0 <= 1e-6, format!("45 configs x 3 abscissae, max |dF| = {:.2e} at {}", worst.0, worst.1)))
}

fn tracy_widom() -> Result<Outcome> {
    let p = ParameterSet::new(0.0, vec![1.0], vec![0.0], 1.0)?;
    let coupled = integrate_with(&p, 4.0, &PainleveConfig { eps: None, tol: 1e-12 })?;
    let scalar = tracy_widom_integrate(0.0, 0.0, coupled.eps, 4.0, 1e-12)?;
    let mut worst = 0.0f64;
    for i in 0..=2000 {
        let xi = coupled.eps + (4.0 - coupled.eps) * i as f64 / 2000.0;
        worst = worst.max((coupled.q_squared(xi)?[0] - scalar.q_squared(xi)?).abs());
    }
    Ok(outcome(worst <= 1e-8, format!("max |q2 coupled - q2 scalar| on (0, 4] = {worst:.2e}")))
}

fn corollary_slope(alpha: f64) -> Result<f64> {
    let (r, s) = ([1.0, 2.0], [0.3, 0.7]);
    let xs: Vec<f64> = (0..=8).map(|i| 1e-4 * 10f64.powf(i as f64 / 4.0)).collect();
    let res = xs
        .iter()
        .map(|&x| -> Result<f64> {
            let p = ParameterSet::new(alpha, r.to_vec(), s.to_vec(), x)?;
            let f = fredholm(&p)?;
            let mut corr = 0.0;
            for (rj, dj) in r.iter().zip(p.jumps()) {
                corr += dj * bessel_j(alpha + 1.0, (rj * x).sqrt())?.powi(2);
            }
            Ok((f - 1.0 + corr).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(loglog_slope(&xs, &res).unwrap_or(f64::NAN))
}

fn corollary() -> Result<Outcome> {
    let a0 = corollary_slope(0.0)?;
    let a5 = corollary_slope(0.5)?;
    let pass = (a0 - 2.0).abs() <= 0.15 && (a5 - 2.5).abs() <= 0.2;
    Ok(outcome(pass, format!("slope {a0:.4} (alpha 0, want 2 +- 0.15), {a5:.4} (alpha 0.5, want 2.5 +- 0.2)")))
}

fn degenerate_limits() -> Result<Outcome> {
    let (r, s) = ([1.0, 2.0], [0.3, 0.7]);
    let decade = [3e-4, 1e-3, 3e-3];
    let p1 = degenerate_probe(0.0, &r, &s, Probe::SMerge(1), &decade, 1.0)?;
    let p2 = degenerate_probe(0.0, &r, &s, Probe::RMerge(2), &[1e-4, 1e-3, 1e-2], 1.0)?;
    let p3 = degenerate_probe(0.5, &r, &s, Probe::R1ToZero, &[1e-4, 1e-3, 1e-2], 1.0)?;
    let s1 = p1.slope.unwrap_or(f64::NAN);
    let s2 = p2.slope.unwrap_or(f64::NAN);
    let s3 = p3.slope.unwrap_or(f64::NAN);
    let split = p2.rows.iter().find(|row| row.delta == 1e-3).and_then(|row| row.relative).unwrap_or(f64::NAN);
    let pass = (s1 - 1.0).abs() <= 0.1 && split <= 0.01 && (s2 - 1.0).abs() <= 0.1 && (s3 - 0.5).abs() <= 0.1;
    Ok(outcome(
        pass,
        format!("part 1 slope {s1:.4}; part 2 split {split:.2e} at dr = 1e-3, slope {s2:.4}; part 3 slope {s3:.4}"),
    ))
}

fn lax_pair() -> Result<Outcome> {
    let xis: Vec<f64> = (0..40).map(|i| 0.1 + 3.9 * i as f64 / 39.0).collect();
    let cfg = PainleveConfig::default();
    let stats = criterion_1_configs()
        .par_iter()
        .map(|p| -> Result<(f64, f64, usize)> {
            let view = bform(&integrate_with(p, 4.0, &cfg)?, &xis)?;
            Ok((view.max_j_residual(), view.max_sum_residual(), view.unavailable()))
        })
        .collect::<Result<Vec<_>>>()?;
    let j = stats.iter().map(|s| s.0).fold(0.0, f64::max);
    let sum = stats.iter().map(|s| s.1).fold(0.0, f64::max);
    let skipped: usize = stats.iter().map(|s| s.2).sum();
    Ok(outcome(
        j <= 1e-6 && sum <= 1e-14,
        format!("max relation residual {j:.2e}, max |sum b - y/2| {sum:.2e} ({skipped} points with b_0 ~ 0)"),
    ))
}

fn count_sanity() -> Result<Outcome> {
    // Values in (−1e-10, 0) are clamped to zero and counted; anything more
    // negative is an error and fails the criterion.
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    let mut clamped = 0;
    for &x in &[1.0, 5.0, 10.0] {
        let cd = count_distribution(0.0, x, 32, 1e-12)?;
        clamped += cd.clamped;
        let raw_min = cd.probs.iter().cloned().fold(f64::INFINITY, f64::min);
        worst.0 = worst.0.max((cd.total() + cd.tail - 1.0).abs().max((cd.total() - 1.0).abs()));
        worst.1 = worst.1.min(raw_min);
        worst.2 = worst.2.max((cd.mean() - mean_count(0.0, x)?).abs());
    }
    let pass = worst.0 <= 1e-8 && worst.1 >= -1e-10 && worst.2 <= 1e-6;
    Ok(outcome(
        pass,
        format!(
            "max |sum P - 1| {:.2e}, min P {:.2e} ({clamped} clamped), max |mean - int K| {:.2e}",
            worst.0, worst.1, worst.2
        ),
    ))
}

fn lue_identities() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_rel = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(1..=8);
        let alpha = rng.random_range(-0.5..2.0);
        let k = rng.random_range(1..=3);
        let mut lam: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..3.0 * n as f64)).collect();
        lam.sort_by(f64::total_cmp);
        let s: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..1.0)).collect();
        let sc: Vec<Complex64> = s.iter().map(|&v| v.into()).collect();
        let fred = lue_genfn(&LueModel::new(n, alpha)?, &lam, &sc, 16, FREDHOLM_TOL)?.value();
        let hank = hankel_ratio(n, alpha, &lam, &s)?;
        worst_rel = worst_rel.max((fred - hank).abs() / hank.abs());
    }
    let (x, s) = ([1.0, 2.0], [0.5, 0.2]);
    let limit = fredholm(&ParameterSet::new(0.0, x.to_vec(), s.to_vec(), 1.0)?)?;
    let sc: Vec<Complex64> = s.iter().map(|&v| v.into()).collect();
    let mut dev = Vec::new();
    for n in [25usize, 50, 100] {
        let lam: Vec<f64> = x.iter().map(|v| v / (4.0 * n as f64)).collect();
        dev.push((lue_genfn(&LueModel::new(n, 0.0)?, &lam, &sc, 16, FREDHOLM_TOL)?.value() - limit).abs());
    }
    let decreasing = dev.windows(2).all(|w| w[1] < w[0]);
    Ok(outcome(
        worst_rel <= 1e-8 && decreasing,
        format!("max relative |Fredholm - Hankel| {worst_rel:.2e}; hard-edge deviations [{}] at n = 25, 50, 100", sci(&dev)),
    ))
}

fn ratio_probability() -> Result<Outcome> {
    let cfg = RatioConfig::default();
    let rs = [1.2, 2.0, 4.0, 8.0];
    let qs = rs.par_iter().map(|&r| ratio_q(0.0, r, &cfg)).collect::<Result<Vec<_>>>()?;
    let disc: Vec<f64> = qs.iter().filter(|q| q.r == 2.0 || q.r == 4.0).map(|q| q.discrepancy).collect();
    let agree = disc.iter().all(|&d| d <= 1e-4);
    let monotone = qs.windows(2).all(|w| w[1].route_a <= w[0].route_a && w[1].route_b <= w[0].route_b);
    let vals: Vec<String> = qs.iter().map(|q| format!("{:.8}", q.route_b)).collect();
    Ok(outcome(
        agree && monotone,
        format!("route discrepancy [{}] at r = 2, 4; Q(1.2, 2, 4, 8) = [{}]", sci(&disc), vals.join(", ")),
    ))
}

fn monte_carlo() -> Result<Outcome> {
    let n = 100;
    let mut samples = (0..2000u64)
        .into_par_iter()
        .map(|seed| Ok(4.0 * n as f64 * sample_smallest(n, 0.0, seed, 1)?[0]))
        .collect::<Result<Vec<f64>>>()?;
    samples.sort_by(f64::total_cmp);
    let cdf = samples
        .par_iter()
        .map(|&x| Ok(1.0 - fredholm(&ParameterSet::new(0.0, vec![1.0], vec![0.0], x)?)?))
        .collect::<Result<Vec<f64>>>()?;
    let m = samples.len() as f64;
    let ks = cdf
        .iter()
        .enumerate()
        .map(|(i, &g)| ((i + 1) as f64 / m - g).abs().max((g - i as f64 / m).abs()))
        .fold(0.0, f64::max);
    Ok(outcome(ks <= 0.05, format!("KS distance {ks:.4} over 2000 draws at n = 100")))
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("route equivalence", route_equivalence),
        ("Tracy-Widom reduction", tracy_widom),
        ("small-x rate", corollary),
        ("degenerate limits", degenerate_limits),
        ("Lax-pair consistency", lax_pair),
        ("count distribution", count_sanity),
        ("LUE identities", lue_identities),
        ("ratio probability", ratio_probability),
        ("Monte Carlo", monte_carlo),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {}: {name} -- {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
