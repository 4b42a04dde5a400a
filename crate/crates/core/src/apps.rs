//! Probabilistic quantities of the Bessel point process
//!
//! Everything here is derived from the generating function
//! `F(x⃗, s⃗) = E Π_j s_j^{n_j}`, where `n_j` counts particles in
//! `(x_{j−1}, x_j)`:
//!
//! * **Occupancy distributions.** `F` is entire in `s⃗`, so the probabilities
//!   `P(n = m)` are its Taylor coefficients. They are extracted exactly (up
//!   to aliasing) by evaluating `F` at roots of unity and applying an inverse
//!   discrete Fourier transform. The aliasing error equals the probability
//!   mass at counts `≥ N`.
//! * **Order statistics.** `P(ζ_ℓ > x) = Σ_{j<ℓ} P(n_{(0,x)} = j)`. The
//!   joint law of several order statistics uses the multivariate version.
//! * **Gaps.** `P(no particle in ∪(a_j, b_j))` is `F` with alternating
//!   multipliers `(1, 0, 1, 0, …)`.
//! * **Thinning.** If each particle is removed independently with
//!   probability `s`, the smallest retained particle `ξ_1` satisfies
//!   `P(ξ_1 > x) = F(x, s)`. Conditioning on the thinned process gives
//!   `F((x_1, x_2), (0, s)) / F(x_2, s)`.
//! * **Degenerate limits.** Probes of the behaviour of the `q`-system as
//!   parameters merge.
//!
//! Wherever two routes are available (Fredholm determinant and Painlevé
//! system), both are returned together with their discrepancy.

use crate::error::{Error, Result};
use crate::fredholm::{converged_operator, generating_fn, ParameterSet};
use crate::kernels::BesselKernelSpec;
use crate::painleve::{genfn, integrate_with, PainleveConfig};
use crate::quad::{gauss_jacobi_unit, gauss_legendre};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Probabilities may stray this far outside `[0, 1]` before being refused.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Most negative occupancy probability that is clamped rather than refused.
pub const NEGATIVE_SLACK: f64 = 1e-10;

/// Convergence tolerance of the Fredholm determinants used here.
pub const FREDHOLM_TOL: f64 = 1e-12;

/// Initial nodes per interval of the Fredholm determinants used here.
pub const FREDHOLM_M0: usize = 16;

/// Largest number of determinant evaluations in [`joint_tail`].
pub const JOINT_MAX_EVALUATIONS: usize = 1 << 15;

/// Clamps `v` into `[0, 1]`. Values further than [`PROBABILITY_SLACK`]
/// outside are refused. The flag reports whether clamping changed `v`.
pub fn clamp_probability(v: f64) -> Result<(f64, bool)> {
    if !(v >= -PROBABILITY_SLACK && v <= 1.0 + PROBABILITY_SLACK) {
        return Err(Error::Conditioning(format!("probability {v:e} outside [0, 1] beyond rounding slack")));
    }
    let c = v.clamp(0.0, 1.0);
    Ok((c, c != v))
}

/// A probability computed by the Fredholm route and, when available, the
/// Painlevé route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoRoute {
    /// Fredholm value clamped into `[0, 1]`.
    pub value: f64,
    /// Unclamped Fredholm value.
    pub fredholm: f64,
    /// `ln` of the Fredholm value (finite under underflow).
    pub log_fredholm: f64,
    /// Painlevé value, `None` when the route does not apply (`α < 0`).
    pub painleve: Option<f64>,
    /// `ln` of the Painlevé value.
    pub log_painleve: Option<f64>,
    /// `|fredholm − painleve|`.
    pub discrepancy: Option<f64>,
    /// Why the Painlevé route produced no value, when it failed numerically.
    pub painleve_failure: Option<String>,
    /// Nodes per interval of the converged Fredholm determinant.
    pub m_final: usize,
    /// Whether clamping changed the value.
    pub clamped: bool,
}

struct RouteValue {
    f: f64,
    log_f: f64,
}

fn fredholm_route(params: &ParameterSet) -> Result<(RouteValue, usize)> {
    let v = generating_fn(params, FREDHOLM_M0, FREDHOLM_TOL)?;
    Ok((
        RouteValue {
            f: v.det.re,
            log_f: v.det.log_abs,
        },
        v.m_final,
    ))
}

/// The Painlevé route, or the reason it is unavailable. It does not apply
/// for `α < 0`. Numerical failures are reported rather than propagated,
/// because the Fredholm value remains valid. One known case is the stiff
/// regime `α = 0`, `s_1 = 0`, `r_1 ≪ r_2`, where `1 − S` stays near zero.
fn painleve_route(params: &ParameterSet) -> Result<(Option<RouteValue>, Option<String>)> {
    if params.alpha < 0.0 {
        return Ok((None, None));
    }
    let cfg = PainleveConfig {
        eps: None,
        tol: 1e-11,
    };
    match genfn(params, &cfg) {
        Ok(g) => Ok((Some(RouteValue { f: g.f, log_f: g.log_f }), None)),
        Err(e) if e.is_input_error() => Err(e),
        Err(e) => Ok((None, Some(e.to_string()))),
    }
}

/// `F(r⃗x, s⃗)` by both routes, packaged as a probability.
pub fn both_routes(params: &ParameterSet) -> Result<TwoRoute> {
    params.validate()?;
    let (fr, m_final) = fredholm_route(params)?;
    let (pv, painleve_failure) = painleve_route(params)?;
    let (value, clamped) = clamp_probability(fr.f)?;
    Ok(TwoRoute {
        value,
        fredholm: fr.f,
        log_fredholm: fr.log_f,
        painleve: pv.as_ref().map(|p| p.f),
        log_painleve: pv.as_ref().map(|p| p.log_f),
        discrepancy: pv.as_ref().map(|p| (p.f - fr.f).abs()),
        painleve_failure,
        m_final,
        clamped,
    })
}

/// `E n_{(0,x)} = ∫_0^x K(u, u) du`. The first panel uses the Gauss–Jacobi
/// rule for the endpoint factor `u^α`; the rest use Gauss–Legendre.
pub fn mean_count(alpha: f64, x: f64) -> Result<f64> {
    let k = BesselKernelSpec::new(alpha)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Validation(format!("x = {x} must be positive")));
    }
    let panels = 4 + (x / 4.0).ceil() as usize;
    let h = x / panels as f64;
    let first = gauss_jacobi_unit(32, alpha)?;
    let mut total = first.integrate(|t| h * t.powf(-alpha) * k.eval_unchecked(h * t, h * t));
    let rule = gauss_legendre(32)?;
    for p in 1..panels {
        let sub = rule.mapped(p as f64 * h, (p + 1) as f64 * h);
        total += sub.integrate(|u| k.eval_unchecked(u, u));
    }
    Ok(total)
}

/// Distribution of the number of particles in `(0, x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountDistribution {
    /// Bessel order.
    pub alpha: f64,
    /// The interval is `(0, x)`.
    pub x: f64,
    /// `P(n = m)` for `m = 0..N−1`, clamped at zero.
    pub probs: Vec<f64>,
    /// Estimated mass at counts `≥ N` (the aliasing error).
    pub tail: f64,
    /// Number of slightly negative probabilities clamped to zero.
    pub clamped: usize,
    /// Nodes of the Fredholm discretisation.
    pub m_final: usize,
}

impl CountDistribution {
    /// `Σ_m P(m)`.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ_m m P(m)`.
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    /// `P(n < ℓ)`.
    pub fn below(&self, ell: usize) -> f64 {
        self.probs.iter().take(ell).sum()
    }
}

fn check_roots(n: usize) -> Result<()> {
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::Validation(format!("N = {n} must be a power of two >= 8")));
    }
    Ok(())
}

fn root_of_unity(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

/// `P(n_{(0,x)} = m)` for `m < N` by coefficient extraction on the `N`-th
/// roots of unity (`N` a power of two `≥ 8`). Fails when the estimated mass
/// beyond `N` exceeds `tol`.
pub fn count_distribution(alpha: f64, x: f64, n_terms: usize, tol: f64) -> Result<CountDistribution> {
    check_roots(n_terms)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Validation(format!("x = {x} must be positive")));
    }
    let kernel = BesselKernelSpec::new(alpha)?;
    // |1 − s| is largest at s = −1, which makes it the hardest point on the circle.
    let probe = [Complex64::new(-1.0, 0.0)];
    let op = converged_operator(&kernel, alpha, &[x], &probe, FREDHOLM_M0, FREDHOLM_TOL)?;
    let values: Vec<Complex64> = (0..n_terms)
        .into_par_iter()
        .map(|k| op.det_at(&[root_of_unity(k, n_terms)]).map(|d| d.value()))
        .collect::<Result<_>>()?;
    let coeffs = inverse_dft(&values);
    let tail = coeffs[n_terms - 1].abs() + coeffs[n_terms - 2].abs();
    if tail > tol {
        return Err(Error::Truncation {
            tail,
            tol,
            advice: "increase the number of roots N",
        });
    }
    let mut clamped = 0;
    let probs = coeffs
        .iter()
        .map(|&p| {
            if p < -NEGATIVE_SLACK {
                Err(Error::Conditioning(format!("occupancy probability {p:e} is negative beyond rounding")))
            } else if p < 0.0 {
                clamped += 1;
                Ok(0.0)
            } else {
                Ok(p)
            }
        })
        .collect::<Result<_>>()?;
    Ok(CountDistribution {
        alpha,
        x,
        probs,
        tail,
        clamped,
        m_final: op.m,
    })
}

/// Real parts of `c_m = N⁻¹ Σ_k v_k ω^{−km}`.
fn inverse_dft(values: &[Complex64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|m| {
            let s: Complex64 = values
                .iter()
                .enumerate()
                .map(|(k, v)| v * root_of_unity((k * m) % n, n).conj())
                .sum();
            s.re / n as f64
        })
        .collect()
}

/// Smallest power of two `≥ 8` above `need`.
fn roots_for(need: usize) -> usize {
    need.max(8).next_power_of_two()
}

/// `P(ζ_ℓ > x)` for the `ℓ`-th smallest particle (`ℓ ≥ 1`).
pub fn kth_smallest_cdf(alpha: f64, ell: usize, x: f64) -> Result<f64> {
    if ell == 0 {
        return Err(Error::Validation("ell must be at least 1".into()));
    }
    let mut n = roots_for(2 * ell + 8);
    loop {
        match count_distribution(alpha, x, n, 1e-12) {
            Ok(d) => return Ok(clamp_probability(d.below(ell))?.0),
            Err(Error::Truncation { .. }) if n < 1024 => n *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Joint tail `P(ζ_{m_1} > x_1, …, ζ_{m_k} > x_k)` with `k ≤ 3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointTail {
    /// The probability, clamped into `[0, 1]`.
    pub value: f64,
    /// Roots of unity per axis.
    pub roots: usize,
    /// Estimated aliased mass (sum over the outermost shell of coefficients).
    pub tail: f64,
}

/// Joint tail of order statistics. `m` and `x` must be strictly increasing
/// and of equal length `k ≤ 3`.
pub fn joint_tail(alpha: f64, m: &[usize], x: &[f64]) -> Result<JointTail> {
    let k = m.len();
    if k == 0 || k > 3 || x.len() != k {
        return Err(Error::Validation("joint_tail needs 1 to 3 (index, point) pairs".into()));
    }
    if m[0] == 0 || m.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("indices m must be strictly increasing and at least 1".into()));
    }
    crate::fredholm::validate_r(x)?;
    let kernel = BesselKernelSpec::new(alpha)?;
    let probe = vec![Complex64::new(-1.0, 0.0); k];
    let op = converged_operator(&kernel, alpha, x, &probe, FREDHOLM_M0, FREDHOLM_TOL)?;
    let mut n = roots_for(m[k - 1] + 8);
    loop {
        let total = n.pow(k as u32);
        if total > JOINT_MAX_EVALUATIONS {
            return Err(Error::Truncation {
                tail: f64::NAN,
                tol: 1e-10,
                advice: "too many particles expected for a joint extraction; lower x or k",
            });
        }
        let values: Vec<Complex64> = (0..total)
            .into_par_iter()
            .map(|flat| {
                let s: Vec<Complex64> = (0..k).map(|a| root_of_unity((flat / n.pow(a as u32)) % n, n)).collect();
                op.det_at(&s).map(|d| d.value())
            })
            .collect::<Result<_>>()?;
        let coeffs = inverse_dft_nd(values, n, k);
        let mut tail = 0.0;
        let mut value = 0.0;
        for (flat, c) in coeffs.iter().enumerate() {
            let idx: Vec<usize> = (0..k).map(|a| (flat / n.pow(a as u32)) % n).collect();
            if idx.iter().any(|&i| i == n - 1) {
                tail += c.abs();
            }
            let mut partial = 0;
            if idx.iter().zip(m).all(|(&i, &mi)| {
                partial += i;
                partial < mi
            }) {
                value += c;
            }
        }
        if tail <= 1e-10 {
            return Ok(JointTail {
                value: clamp_probability(value)?.0,
                roots: n,
                tail,
            });
        }
        n *= 2;
    }
}

/// Separable inverse DFT on a `k`-dimensional `n × … × n` grid (axis `a`
/// has stride `n^a`). Returns real parts.
fn inverse_dft_nd(mut data: Vec<Complex64>, n: usize, k: usize) -> Vec<f64> {
    let total = data.len();
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for a in 0..k {
        let stride = n.pow(a as u32);
        for start in 0..total {
            if (start / stride) % n != 0 {
                continue;
            }
            for (i, l) in line.iter_mut().enumerate() {
                *l = data[start + i * stride];
            }
            for mm in 0..n {
                let s: Complex64 = line
                    .iter()
                    .enumerate()
                    .map(|(kk, v)| v * root_of_unity((kk * mm) % n, n).conj())
                    .sum();
                data[start + mm * stride] = s / n as f64;
            }
        }
    }
    data.iter().map(|c| c.re).collect()
}

/// Probability of no particle in the union of disjoint intervals
/// `(a_1, b_1), (a_2, b_2), …` with `0 ≤ a_1 < b_1 < a_2 < …`.
pub fn gap_probability(alpha: f64, intervals: &[(f64, f64)]) -> Result<TwoRoute> {
    if intervals.is_empty() {
        return Err(Error::Validation("need at least one interval".into()));
    }
    let mut r = Vec::with_capacity(2 * intervals.len());
    let mut s = Vec::with_capacity(2 * intervals.len());
    for &(a, b) in intervals {
        if !(b > a) || !(a >= 0.0) || !b.is_finite() {
            return Err(Error::Validation(format!("interval ({a}, {b}) is degenerate or negative")));
        }
        if a > 0.0 {
            r.push(a);
            s.push(1.0);
        }
        r.push(b);
        s.push(0.0);
    }
    if r.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Validation("intervals must be disjoint, separated and increasing".into()));
    }
    both_routes(&ParameterSet::new(alpha, r, s, 1.0)?)
}

fn check_thinning(s_thin: f64) -> Result<()> {
    if !(s_thin > 0.0 && s_thin < 1.0) {
        return Err(Error::Validation(format!("thinning probability {s_thin} must lie in (0, 1)")));
    }
    Ok(())
}

/// `P(ξ_1 > x) = F(x, s)` for the process thinned with removal probability `s`.
pub fn thinned_smallest_cdf(alpha: f64, s_thin: f64, x: f64) -> Result<TwoRoute> {
    check_thinning(s_thin)?;
    both_routes(&ParameterSet::new(alpha, vec![1.0], vec![s_thin], x)?)
}

/// Smallest particle of the conditional process: the probability that the
/// original process has no particle in `(0, x_1)` given that the thinned
/// process has none in `(0, x_2)`, i.e. `F((x_1, x_2), (0, s)) / F(x_2, s)`.
///
/// Both numerator and denominator are computed by each route. The ratio is
/// formed from logarithms, so it survives underflow of the two factors.
pub fn conditional_smallest(alpha: f64, s_thin: f64, x1: f64, x2: f64) -> Result<TwoRoute> {
    check_thinning(s_thin)?;
    if !(x1 > 0.0 && x2 > x1) || !x2.is_finite() {
        return Err(Error::Validation(format!("need 0 < x1 < x2, got ({x1}, {x2})")));
    }
    let num = ParameterSet::new(alpha, vec![x1, x2], vec![0.0, s_thin], 1.0)?;
    let den = ParameterSet::new(alpha, vec![x2], vec![s_thin], 1.0)?;
    let (fn_, m1) = fredholm_route(&num)?;
    let (fd, m2) = fredholm_route(&den)?;
    if fd.f <= 0.0 || !fd.log_f.is_finite() {
        return Err(Error::Conditioning("F(x2, s) vanished; no conditional law".into()));
    }
    let log_fredholm = fn_.log_f - fd.log_f;
    let fredholm = fn_.f.signum() * log_fredholm.exp();
    let ((pn, fail_n), (pd, fail_d)) = (painleve_route(&num)?, painleve_route(&den)?);
    let pv = match (pn, pd) {
        (Some(a), Some(b)) => Some(a.log_f - b.log_f),
        _ => None,
    };
    let (value, clamped) = clamp_probability(fredholm)?;
    Ok(TwoRoute {
        value,
        fredholm,
        log_fredholm,
        painleve: pv.map(f64::exp),
        log_painleve: pv,
        discrepancy: pv.map(|l| (l.exp() - fredholm).abs()),
        painleve_failure: fail_n.or(fail_d),
        m_final: m1.max(m2),
        clamped,
    })
}

/// Which degenerate limit [`degenerate_probe`] approaches (indices are 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Probe {
    /// `s_j → s_{j+1}` (with `s_{k+1} = 1`): `q_j² = O(|s_j − s_{j+1}|)`.
    SMerge(usize),
    /// `r_j → r_{j−1}` (`j ≥ 2`, `s_{j+1} ≠ s_{j−1}`): `q_{j−1}²` and `q_j²`
    /// split the reduced `q_{j−1}²` in the ratios
    /// `(s_j − s_{j−1}) : (s_{j+1} − s_j)`.
    RMerge(usize),
    /// `r_1 → 0`: `q_1² = O(r_1^α)`.
    R1ToZero,
}

/// One row of a [`ProbeTable`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    /// Distance to the degenerate configuration.
    pub delta: f64,
    /// `q_1²(x), …, q_k²(x)` of the perturbed system.
    pub q2: Vec<f64>,
    /// Limiting values predicted from the reduced system.
    pub reference: Vec<f64>,
    /// Deviation in the components that the limit statement concerns.
    pub deviation: f64,
    /// Relative deviation of those components (`RMerge` only).
    pub relative: Option<f64>,
}

/// Output of [`degenerate_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeTable {
    /// Bessel order.
    pub alpha: f64,
    /// The limit probed.
    pub which: Probe,
    /// Fixed abscissa.
    pub x: f64,
    /// `q²(x)` of the reduced `(k−1)`-system (empty when `k = 1`).
    pub reduced_q2: Vec<f64>,
    /// One row per `δ`.
    pub rows: Vec<ProbeRow>,
    /// Least-squares slope of `ln deviation` against `ln δ`.
    pub slope: Option<f64>,
}

fn remove(v: &[f64], j: usize) -> Vec<f64> {
    v.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &x)| x).collect()
}

/// Least-squares slope of `ln y` against `ln x` over the points with `y > 0`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Integrates the `k`-system at each `δ` and the reduced system once, and
/// tabulates the deviations from the predicted limits at the fixed
/// abscissa `x`.
///
/// `r` and `s` give the base configuration. The component being varied is
/// replaced by its value at distance `δ` from the degenerate configuration:
///
/// * `SMerge(j)`: `s_j = s_{j+1} ± δ`, on the side of the base `s_j`.
/// * `RMerge(j)`: `r_j = r_{j−1} + δ`.
/// * `R1ToZero`: `r_1 = δ`.
pub fn degenerate_probe(
    alpha: f64,
    r: &[f64],
    s: &[f64],
    which: Probe,
    deltas: &[f64],
    x: f64,
) -> Result<ProbeTable> {
    let base = ParameterSet::new(alpha, r.to_vec(), s.to_vec(), x)?;
    let k = base.k();
    let ext = base.s_extended();
    let drop = match which {
        Probe::SMerge(j) if (1..=k).contains(&j) => j - 1,
        Probe::RMerge(j) if (2..=k).contains(&j) => {
            if ext[j] == ext[j - 2] {
                return Err(Error::Validation(format!("r-merge needs s_{} != s_{}", j + 1, j - 1)));
            }
            j - 1
        }
        Probe::R1ToZero => 0,
        _ => return Err(Error::Validation(format!("probe {which:?} does not fit k = {k}"))),
    };
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Validation("deltas must be positive".into()));
    }
    let cfg = PainleveConfig {
        eps: None,
        tol: 1e-12,
    };
    let reduced_q2 = if k > 1 {
        let red = ParameterSet::new(alpha, remove(r, drop), remove(s, drop), x)?;
        integrate_with(&red, x, &cfg)?.q_squared(x)?
    } else {
        Vec::new()
    };
    // Predicted limit of every component, in the indexing of the full system.
    let reference: Vec<f64> = (0..k)
        .map(|i| match which {
            Probe::RMerge(j) => {
                let (lo, mid, hi) = (ext[j - 2], ext[j - 1], ext[j]);
                if i == j - 2 {
                    (mid - lo) / (hi - lo) * reduced_q2[j - 2]
                } else if i == j - 1 {
                    (hi - mid) / (hi - lo) * reduced_q2[j - 2]
                } else {
                    reduced_q2[if i < drop { i } else { i - 1 }]
                }
            }
            _ if i == drop => 0.0,
            _ => reduced_q2[if i < drop { i } else { i - 1 }],
        })
        .collect();
    let watched: Vec<usize> = match which {
        Probe::RMerge(j) => vec![j - 2, j - 1],
        _ => vec![drop],
    };
    let rows = deltas
        .par_iter()
        .map(|&delta| -> Result<ProbeRow> {
            let (mut rr, mut ss) = (r.to_vec(), s.to_vec());
            match which {
                Probe::SMerge(j) => {
                    let side = if s[j - 1] >= ext[j] { 1.0 } else { -1.0 };
                    ss[j - 1] = ext[j] + side * delta;
                }
                Probe::RMerge(j) => rr[j - 1] = r[j - 2] + delta,
                Probe::R1ToZero => rr[0] = delta,
            }
            let p = ParameterSet::new(alpha, rr, ss, x)?;
            let q2 = integrate_with(&p, x, &cfg)?.q_squared(x)?;
            let deviation = watched.iter().map(|&i| (q2[i] - reference[i]).abs()).fold(0.0, f64::max);
            let relative = matches!(which, Probe::RMerge(_)).then(|| {
                watched
                    .iter()
                    .map(|&i| ((q2[i] - reference[i]) / reference[i]).abs())
                    .fold(0.0, f64::max)
            });
            Ok(ProbeRow {
                delta,
                q2,
                reference: reference.clone(),
                deviation,
                relative,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(
        &rows.iter().map(|r| r.delta).collect::<Vec<_>>(),
        &rows.iter().map(|r| r.deviation).collect::<Vec<_>>(),
    );
    Ok(ProbeTable {
        alpha,
        which,
        x,
        reduced_q2,
        rows,
        slope,
    })
}
