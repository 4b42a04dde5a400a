//! A quick invariant suite: closed forms, route agreement, b-form identities
//! and the finite-n cross-checks, each against a fixed threshold.

use crate::output::{Cell, Table};
use besselgap::apps::{self, both_routes};
use besselgap::painleve::default_eps;
use besselgap::{
    bform, generating_fn, genfn_painleve, hankel_ratio, integrate_with, lue_genfn, tracy_widom_integrate, LueModel,
    PainleveConfig, ParameterSet, RatioConfig,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// A named check: computes a non-negative error to compare with `threshold`.
struct Check {
    name: &'static str,
    threshold: f64,
    eval: fn() -> besselgap::Result<f64>,
}

fn gap_closed_form() -> besselgap::Result<f64> {
    // α = 0: P(no particle in (0, x)) = e^{−x/4}.
    let f = generating_fn(&ParameterSet::new(0.0, vec![1.0], vec![0.0], 1.0)?, 16, 1e-13)?.value();
    Ok((f - (-0.25f64).exp()).abs())
}

fn routes_agree() -> besselgap::Result<f64> {
    let v = both_routes(&ParameterSet::new(0.5, vec![1.0, 2.0], vec![0.3, 0.7], 1.5)?)?;
    Ok(v.discrepancy.unwrap_or(f64::INFINITY))
}

fn bform_sum_rule() -> besselgap::Result<f64> {
    let p = ParameterSet::new(1.0, vec![1.0, 2.0, 3.0], vec![0.2, 0.5, 0.8], 1.0)?;
    let traj = integrate_with(&p, 4.0, &PainleveConfig::default())?;
    Ok(bform(&traj, &[0.5, 1.0, 2.0, 4.0])?.max_sum_residual())
}

fn scalar_reduction() -> besselgap::Result<f64> {
    let (alpha, s, x) = (0.5, 0.4, 3.0);
    let p = ParameterSet::new(alpha, vec![1.0], vec![s], 1.0)?;
    let cfg = PainleveConfig {
        eps: None,
        tol: 1e-11,
    };
    let coupled = genfn_painleve(&integrate_with(&p, x, &cfg)?, x)?.f;
    let scalar = tracy_widom_integrate(alpha, s, default_eps(&[1.0]), x, 1e-11)?.genfn(x)?;
    Ok((coupled - scalar).abs())
}

fn count_total() -> besselgap::Result<f64> {
    Ok((apps::count_distribution(0.5, 4.0, 32, 1e-12)?.total() - 1.0).abs())
}

fn count_mean() -> besselgap::Result<f64> {
    let d = apps::count_distribution(0.5, 4.0, 32, 1e-12)?;
    Ok((d.mean() - apps::mean_count(0.5, 4.0)?).abs())
}

fn smallest_particle() -> besselgap::Result<f64> {
    Ok((apps::kth_smallest_cdf(0.0, 1, 2.0)? - (-0.5f64).exp()).abs())
}

fn hankel_agreement() -> besselgap::Result<f64> {
    let (n, alpha, lam, s) = (6, 0.5, [1.0, 5.0], [0.3, 0.6]);
    let sc: Vec<Complex64> = s.iter().map(|&v| v.into()).collect();
    let fred = lue_genfn(&LueModel::new(n, alpha)?, &lam, &sc, 16, 1e-13)?.value();
    let hank = hankel_ratio(n, alpha, &lam, &s)?;
    Ok((fred - hank).abs() / hank.abs())
}

fn ratio_routes() -> besselgap::Result<f64> {
    Ok(besselgap::ratio_q(1.0, 3.0, &RatioConfig::default())?.discrepancy)
}

const CHECKS: [Check; 9] = [
    Check {
        name: "gap_probability_closed_form",
        threshold: 1e-12,
        eval: gap_closed_form,
    },
    Check {
        name: "fredholm_vs_painleve_k2",
        threshold: 1e-7,
        eval: routes_agree,
    },
    Check {
        name: "bform_sum_rule_k3",
        threshold: 1e-8,
        eval: bform_sum_rule,
    },
    Check {
        name: "coupled_vs_scalar_k1",
        threshold: 1e-8,
        eval: scalar_reduction,
    },
    Check {
        name: "count_distribution_total",
        threshold: 1e-10,
        eval: count_total,
    },
    Check {
        name: "count_distribution_mean",
        threshold: 1e-9,
        eval: count_mean,
    },
    Check {
        name: "smallest_particle_closed_form",
        threshold: 1e-10,
        eval: smallest_particle,
    },
    Check {
        name: "lue_fredholm_vs_hankel",
        threshold: 1e-9,
        eval: hankel_agreement,
    },
    Check {
        name: "ratio_probability_routes",
        threshold: 1e-8,
        eval: ratio_routes,
    },
];

/// Runs every check; a check that errors counts as failed and reports the
/// error text.
pub fn run() -> Table {
    let results: Vec<besselgap::Result<f64>> = CHECKS.par_iter().map(|c| (c.eval)()).collect();
    let mut table = Table::new(["check", "error", "threshold", "pass", "note"]);
    let mut failed = 0usize;
    for (c, r) in CHECKS.iter().zip(results) {
        let (err, note) = match r {
            Ok(v) => (Some(v), String::new()),
            Err(e) => (None, e.to_string()),
        };
        let pass = err.is_some_and(|v| v <= c.threshold);
        failed += usize::from(!pass);
        table.push(vec![c.name.into(), err.into(), c.threshold.into(), pass.into(), Cell::Text(note)]);
    }
    table.diag("checks", CHECKS.len());
    table.diag("failed", failed);
    table
}

/// `true` when every check in `table` passed.
pub fn all_passed(table: &Table) -> bool {
    table.diagnostics.get("failed").and_then(|v| v.as_u64()) == Some(0)
}
