//! One function per subcommand: read the options, call the engine, fill a
//! [`Table`].
//!
//! Grid sweeps run in parallel on the global rayon pool. Rows are collected
//! in grid order, so the output does not depend on the number of workers.

use crate::args::{need, Command, Options};
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};
use crate::selfcheck;
use besselgap::apps::{self, Probe, TwoRoute};
use besselgap::painleve::ratio::RatioConfig;
use besselgap::{
    generating_fn, genfn_painleve, hankel_ratio, integrate_with, lue_genfn, sample_spectrum, LueModel,
    PainleveConfig, ParameterSet,
};
use num_complex::Complex64;
use rayon::prelude::*;

/// Default Fredholm convergence tolerance.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default local tolerance of the `q`-system integration.
pub const DEFAULT_ODE_TOL: f64 = 1e-11;
/// Initial Nyström nodes per interval.
const M0: usize = 16;

/// Runs `command` with the merged options.
pub fn run(command: Command, o: &Options) -> CliResult<Table> {
    match command {
        Command::Genfn => genfn(o),
        Command::Gap => gap(o),
        Command::CountDist => count_dist(o),
        Command::KthCdf => kth_cdf(o),
        Command::Joint => joint(o),
        Command::Thinned => thinned(o),
        Command::Conditional => conditional(o),
        Command::RatioQ => ratio_q(o),
        Command::LueConverge => lue_converge(o),
        Command::HankelCheck => hankel_check(o),
        Command::SampleLue => sample_lue(o),
        Command::DegenerateProbe => degenerate_probe(o),
        Command::TraceQ => trace_q(o),
        Command::Selfcheck => Ok(selfcheck::run()),
    }
}

fn alpha(o: &Options, c: Command) -> CliResult<f64> {
    need(&o.alpha, "alpha", c)
}

fn grid(o: &Options, c: Command) -> CliResult<Vec<f64>> {
    let xs = need(&o.x, "x", c)?.values()?;
    if xs.is_empty() {
        return Err(CliError::Input(format!("{} needs at least one --x value", c.name())));
    }
    Ok(xs)
}

/// The base parameter set `(α, r⃗, s⃗)` at scale 1, validated.
fn parameters(o: &Options, c: Command) -> CliResult<ParameterSet> {
    Ok(ParameterSet::new(
        alpha(o, c)?,
        need(&o.r, "r", c)?,
        need(&o.s, "s", c)?,
        1.0,
    )?)
}

fn painleve_config(o: &Options) -> PainleveConfig {
    PainleveConfig {
        eps: o.eps,
        tol: o.ode_tol.unwrap_or(DEFAULT_ODE_TOL),
    }
}

fn complex(s: &[f64]) -> Vec<Complex64> {
    s.iter().map(|&v| v.into()).collect()
}

fn max_of(it: impl IntoIterator<Item = f64>) -> Option<f64> {
    it.into_iter().fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
}

fn genfn(o: &Options) -> CliResult<Table> {
    let c = Command::Genfn;
    let base = parameters(o, c)?;
    let xs = o.x.as_ref().map_or(Ok(vec![1.0]), |g| g.values())?;
    let tol = o.tol.unwrap_or(DEFAULT_TOL);
    let fredholm = xs
        .par_iter()
        .map(|&x| Ok(generating_fn(&base.with_x(x)?, M0, tol)?))
        .collect::<CliResult<Vec<_>>>()?;
    let x_max = xs.iter().copied().fold(0.0, f64::max);
    let mut table = Table::new(["x", "F_fredholm", "F_painleve", "abs_diff", "log_F_fredholm", "m_final"]);
    // One trajectory serves the whole grid; the route does not apply for α < 0.
    let trajectory = (base.alpha >= 0.0).then(|| integrate_with(&base, x_max, &painleve_config(o)));
    let trajectory = match trajectory {
        Some(Ok(t)) => {
            table.diag_f64("eps", t.eps);
            Some(t)
        }
        Some(Err(e)) if e.is_input_error() => return Err(e.into()),
        Some(Err(e)) => {
            table.diag("painleve_failure", e.to_string());
            None
        }
        None => None,
    };
    let mut worst: Option<f64> = None;
    for (&x, fv) in xs.iter().zip(&fredholm) {
        let pain = trajectory.as_ref().map(|t| genfn_painleve(t, x)).transpose()?.map(|g| g.f);
        let diff = pain.map(|p| (p - fv.det.re).abs());
        worst = max_of(worst.into_iter().chain(diff));
        table.push(vec![
            x.into(),
            fv.det.re.into(),
            pain.into(),
            diff.into(),
            fv.det.log_abs.into(),
            fv.m_final.into(),
        ]);
    }
    table.diag("m_final", fredholm.iter().map(|v| v.m_final).max().unwrap_or(0));
    if let Some(w) = worst {
        table.diag_f64("route_discrepancy", w);
    }
    Ok(table)
}

const TWO_ROUTE_COLUMNS: [&str; 5] = ["value", "F_fredholm", "F_painleve", "abs_diff", "clamped"];

fn two_route_cells(v: &TwoRoute) -> Vec<Cell> {
    vec![
        v.value.into(),
        v.fredholm.into(),
        v.painleve.into(),
        v.discrepancy.into(),
        v.clamped.into(),
    ]
}

/// Diagnostics shared by the commands built on [`TwoRoute`].
fn two_route_diagnostics(table: &mut Table, vals: &[TwoRoute]) {
    table.diag("m_final", vals.iter().map(|v| v.m_final).max().unwrap_or(0));
    if let Some(w) = max_of(vals.iter().filter_map(|v| v.discrepancy)) {
        table.diag_f64("route_discrepancy", w);
    }
    let failures: Vec<&str> = vals.iter().filter_map(|v| v.painleve_failure.as_deref()).collect();
    if let Some(first) = failures.first() {
        table.diag("painleve_failure", *first);
        table.diag("painleve_failures", failures.len());
    }
}

/// A sweep over `x` of a [`TwoRoute`] quantity.
fn two_route_sweep(
    xs: &[f64],
    x_name: &str,
    f: impl Fn(f64) -> besselgap::Result<TwoRoute> + Sync,
) -> CliResult<Table> {
    let vals = xs.par_iter().map(|&x| Ok(f(x)?)).collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(std::iter::once(x_name).chain(TWO_ROUTE_COLUMNS));
    for (&x, v) in xs.iter().zip(&vals) {
        let mut row = vec![x.into()];
        row.extend(two_route_cells(v));
        table.push(row);
    }
    two_route_diagnostics(&mut table, &vals);
    Ok(table)
}

fn gap(o: &Options) -> CliResult<Table> {
    let c = Command::Gap;
    let alpha = alpha(o, c)?;
    let intervals: Vec<(f64, f64)> = need(&o.intervals, "intervals", c)?.iter().map(|i| (i.0, i.1)).collect();
    let v = apps::gap_probability(alpha, &intervals)?;
    let mut table = Table::new(TWO_ROUTE_COLUMNS);
    table.push(two_route_cells(&v));
    two_route_diagnostics(&mut table, std::slice::from_ref(&v));
    Ok(table)
}

fn count_dist(o: &Options) -> CliResult<Table> {
    let c = Command::CountDist;
    let alpha = alpha(o, c)?;
    let xs = grid(o, c)?;
    let terms = o.terms.unwrap_or(32);
    let tol = o.tol.unwrap_or(1e-12);
    let dists = xs
        .par_iter()
        .map(|&x| Ok(apps::count_distribution(alpha, x, terms, tol)?))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(["x", "n", "probability"]);
    for d in &dists {
        for (n, &p) in d.probs.iter().enumerate() {
            table.push(vec![d.x.into(), n.into(), p.into()]);
        }
    }
    table.diag("m_final", dists.iter().map(|d| d.m_final).max().unwrap_or(0));
    table.diag("clamped", dists.iter().map(|d| d.clamped).sum::<usize>());
    table.diag_f64("tail", max_of(dists.iter().map(|d| d.tail)).unwrap_or(0.0));
    table.diag_f64(
        "max_total_error",
        max_of(dists.iter().map(|d| (d.total() - 1.0).abs())).unwrap_or(0.0),
    );
    Ok(table)
}

fn kth_cdf(o: &Options) -> CliResult<Table> {
    let c = Command::KthCdf;
    let alpha = alpha(o, c)?;
    let ell = need(&o.ell, "ell", c)?;
    let xs = grid(o, c)?;
    let vals = xs
        .par_iter()
        .map(|&x| Ok(apps::kth_smallest_cdf(alpha, ell, x)?))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(["x", "ell", "survival"]);
    for (&x, &v) in xs.iter().zip(&vals) {
        table.push(vec![x.into(), ell.into(), v.into()]);
    }
    Ok(table)
}

fn joint(o: &Options) -> CliResult<Table> {
    let c = Command::Joint;
    let alpha = alpha(o, c)?;
    let m = need(&o.m, "m", c)?;
    let x = grid(o, c)?;
    let v = apps::joint_tail(alpha, &m, &x)?;
    let mut table = Table::new(["probability"]);
    table.push(vec![v.value.into()]);
    table.diag("roots", v.roots);
    table.diag_f64("tail", v.tail);
    Ok(table)
}

fn thinned(o: &Options) -> CliResult<Table> {
    let c = Command::Thinned;
    let alpha = alpha(o, c)?;
    let s_thin = need(&o.s_thin, "s-thin", c)?;
    two_route_sweep(&grid(o, c)?, "x", |x| apps::thinned_smallest_cdf(alpha, s_thin, x))
}

fn conditional(o: &Options) -> CliResult<Table> {
    let c = Command::Conditional;
    let alpha = alpha(o, c)?;
    let s_thin = need(&o.s_thin, "s-thin", c)?;
    let x1 = need(&o.x1, "x1", c)?;
    two_route_sweep(&grid(o, c)?, "x2", |x2| apps::conditional_smallest(alpha, s_thin, x1, x2))
}

fn ratio_q(o: &Options) -> CliResult<Table> {
    let c = Command::RatioQ;
    let alpha = alpha(o, c)?;
    let rs = need(&o.r, "r", c)?;
    let mut cfg = RatioConfig::default();
    if let Some(t) = o.tol {
        cfg.tol = t;
    }
    if let Some(t) = o.ode_tol {
        cfg.ode_tol = t;
    }
    if let Some(e) = o.eps {
        cfg.eps = e;
    }
    let vals = rs
        .par_iter()
        .map(|&r| Ok(besselgap::ratio_q(alpha, r, &cfg)?))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(["r", "Q_tilde", "Q_genfn", "abs_diff", "x_max", "continued"]);
    for v in &vals {
        table.push(vec![
            v.r.into(),
            v.route_a.into(),
            v.route_b.into(),
            v.discrepancy.into(),
            v.x_max.into(),
            v.continued.into(),
        ]);
    }
    table.diag_f64("eps", cfg.eps);
    if let Some(w) = max_of(vals.iter().map(|v| v.discrepancy)) {
        table.diag_f64("route_discrepancy", w);
    }
    Ok(table)
}

fn lue_value(n: usize, alpha: f64, lambdas: &[f64], s: &[f64], tol: f64) -> CliResult<(f64, usize)> {
    let model = LueModel::new(n, alpha)?;
    let v = lue_genfn(&model, lambdas, &complex(s), M0, tol)?;
    Ok((v.value(), v.m_final))
}

fn sizes(o: &Options, default: Vec<usize>) -> Vec<usize> {
    o.n.clone().unwrap_or(default)
}

fn lue_converge(o: &Options) -> CliResult<Table> {
    let c = Command::LueConverge;
    let base = parameters(o, c)?;
    let tol = o.tol.unwrap_or(DEFAULT_TOL);
    let limit = generating_fn(&base, M0, tol)?;
    let ns = sizes(o, vec![25, 50, 100]);
    let vals = ns
        .par_iter()
        .map(|&n| {
            let lambdas: Vec<f64> = base.r.iter().map(|x| x / (4.0 * n as f64)).collect();
            lue_value(n, base.alpha, &lambdas, &base.s, tol)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(["n", "F_n", "F_limit", "abs_diff"]);
    for (&n, &(v, _)) in ns.iter().zip(&vals) {
        table.push(vec![n.into(), v.into(), limit.value().into(), (v - limit.value()).abs().into()]);
    }
    table.diag("m_final", vals.iter().map(|v| v.1).chain([limit.m_final]).max().unwrap_or(0));
    Ok(table)
}

fn hankel_check(o: &Options) -> CliResult<Table> {
    let c = Command::HankelCheck;
    let base = parameters(o, c)?;
    let tol = o.tol.unwrap_or(1e-13);
    let ns = sizes(o, (1..=8).collect());
    let vals = ns
        .par_iter()
        .map(|&n| {
            let (fred, m) = lue_value(n, base.alpha, &base.r, &base.s, tol)?;
            Ok((fred, hankel_ratio(n, base.alpha, &base.r, &base.s)?, m))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(["n", "F_fredholm", "F_hankel", "rel_diff"]);
    for (&n, &(f, h, _)) in ns.iter().zip(&vals) {
        table.push(vec![n.into(), f.into(), h.into(), ((f - h).abs() / h.abs()).into()]);
    }
    table.diag("m_final", vals.iter().map(|v| v.2).max().unwrap_or(0));
    Ok(table)
}

fn sample_lue(o: &Options) -> CliResult<Table> {
    let c = Command::SampleLue;
    let alpha = alpha(o, c)?;
    let n = match need(&o.n, "n", c)?.as_slice() {
        [n] => *n,
        other => return Err(CliError::Input(format!("sample-lue needs one --n, got {other:?}"))),
    };
    let seed = o.seed.unwrap_or(0);
    let draws = o.draws.unwrap_or(1) as u64;
    let spectra = (0..draws)
        .into_par_iter()
        .map(|d| Ok(sample_spectrum(n, alpha, seed + d)?))
        .collect::<CliResult<Vec<_>>>()?;
    let mut table = Table::new(["seed", "index", "eigenvalue", "scaled"]);
    for (d, ev) in spectra.iter().enumerate() {
        for (i, &v) in ev.iter().enumerate() {
            table.push(vec![(seed + d as u64).into(), (i + 1).into(), v.into(), (4.0 * n as f64 * v).into()]);
        }
    }
    Ok(table)
}

fn parse_probe(text: &str) -> CliResult<Probe> {
    let bad = || CliError::Input(format!("--which {text:?} is not s-merge:j, r-merge:j or r1-to-0"));
    if text == "r1-to-0" {
        return Ok(Probe::R1ToZero);
    }
    let (kind, j) = text.split_once(':').ok_or_else(bad)?;
    let j: usize = j.parse().map_err(|_| bad())?;
    match kind {
        "s-merge" => Ok(Probe::SMerge(j)),
        "r-merge" => Ok(Probe::RMerge(j)),
        _ => Err(bad()),
    }
}

fn degenerate_probe(o: &Options) -> CliResult<Table> {
    let c = Command::DegenerateProbe;
    let base = parameters(o, c)?;
    let which = parse_probe(&need(&o.which, "which", c)?)?;
    let deltas = need(&o.deltas, "deltas", c)?.values()?;
    let x = match o.x.as_ref().map(|g| g.values()).transpose()?.as_deref() {
        None => 1.0,
        Some([x]) => *x,
        Some(other) => return Err(CliError::Input(format!("degenerate-probe needs one --x, got {other:?}"))),
    };
    let t = apps::degenerate_probe(base.alpha, &base.r, &base.s, which, &deltas, x)?;
    let k = base.k();
    let columns = ["delta", "deviation", "relative"]
        .into_iter()
        .map(String::from)
        .chain((1..=k).map(|j| format!("q2_{j}")))
        .chain((1..=k).map(|j| format!("reference_{j}")));
    let mut table = Table::new(columns);
    for row in &t.rows {
        let mut cells = vec![row.delta.into(), row.deviation.into(), row.relative.into()];
        cells.extend(row.q2.iter().chain(&row.reference).map(|&v| Cell::from(v)));
        table.push(cells);
    }
    if let Some(s) = t.slope {
        table.diag_f64("slope", s);
    }
    table.diag_f64("x", t.x);
    Ok(table)
}

fn trace_q(o: &Options) -> CliResult<Table> {
    let c = Command::TraceQ;
    let base = parameters(o, c)?;
    let xis = grid(o, c)?;
    let x_max = xis.iter().copied().fold(0.0, f64::max);
    let traj = integrate_with(&base, x_max, &painleve_config(o))?;
    let k = base.k();
    let columns = std::iter::once("xi".to_string())
        .chain((1..=k).map(|j| format!("q2_{j}")))
        .chain(["one_minus_s".to_string()]);
    let mut table = Table::new(columns);
    for &xi in &xis {
        let mut cells = vec![Cell::from(xi)];
        cells.extend(traj.q_squared(xi)?.into_iter().map(Cell::from));
        cells.push(traj.one_minus_s(xi)?.into());
        table.push(cells);
    }
    table.diag_f64("eps", traj.eps);
    table.diag("near_singular_steps", traj.near_singular_steps);
    Ok(table)
}
