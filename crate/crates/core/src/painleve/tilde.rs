//! The two coupled equations for the ratio probability between the two
//! smallest particles
//!
//! `q̃_1, q̃_2` solve the `q`-system with points `(1, r)`, except for an extra
//! `(1 − S)²/q̃_1³` term in the first equation. Their boundary behaviour is
//! `q̃_1 → √(2/(α+2))` and `q̃_2 ~ (1 − r⁻¹) J_{α+2}(√(rξ))`. The ratio
//! probability follows from
//!
//! ```text
//! I(x; r) = −¼ ∫_0^x (q̃_1² + r q̃_2²) log(x/ξ) dξ.
//! ```
//!
//! # Method
//!
//! The system is integrated in its Lax form (see [`super::lax`]) with
//! `r = (0, 1, r)` and `κ = (α²/4, 1, 0)`. In that form the `1/q̃_1³` term and
//! the `1 − S` denominators become polynomial.
//!
//! **Seed.** Near `ξ = 0`, write `c = √(2/(α+2))`. For `α > 0` the regular
//! solutions are
//!
//! ```text
//! q̃_1 = c + A ξ + a ξ^{α+2} + …,   A = α c / (4 (α+1)(α+2)(α+3)),
//! q̃_2 = (1 − r⁻¹) (r/r′)^{(α+2)/2} J_{α+2}(√(r′ξ)) (1 + O(ξ²)),
//! r′ = r − 2/(α+2).
//! ```
//!
//! * The shift from `r` to `r′` comes from linearising the `q̃_2` equation
//!   about `q̃_1 = c + Aξ`.
//! * The coefficient `a` is free; the boundary conditions leave it
//!   unspecified.
//! * Only one value of `a` gives a solution that stays regular on
//!   `(0, ∞)`. Every other value leaves the physical region: `q̃_1²` either
//!   turns negative or grows without bound.
//!
//! **Shooting.** The value of `a` is found by bisection on that dichotomy.
//! Bisection in `a` stalls once `a ε^{α+2}` reaches the rounding level, and
//! the two bracketing trajectories then separate at some finite `ξ`. The
//! search restarts there. It bisects along the segment joining the two
//! bracketing states, which keeps the separatrix bracketed while extending
//! it to any `x_max`.
//!
//! **The case `α = 0`.** Here `c = 1`, and the expansion degenerates:
//! `1 − S = O(ξ⁴)`, and several higher coefficients are free. The boundary
//! conditions then do not single out a solution, and the integration is
//! refused. [`super::ratio`] handles `α = 0` by analytic continuation in `α`.

use super::lax::LaxSystem;
use crate::error::{Error, Result};
use crate::ode::DenseSolution;
use crate::specfun::{bessel_j_and_prime, ln_gamma_unchecked, SpecFunConfig};
use serde::Serialize;

/// Smallest `α` accepted by [`tilde_integrate`].
pub const MIN_ALPHA: f64 = 0.05;

/// `q̃_1²` above this value classifies a trial trajectory as "above".
const ABOVE: f64 = 3.0;

/// Separation in `q̃_1²` at which two bracketing trajectories count as split.
const SPLIT: f64 = 1e-7;

/// One point of a tilde trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TildeState {
    /// Abscissa `ξ`.
    pub xi: f64,
    /// `q̃_1 > 0`.
    pub q1: f64,
    /// `dq̃_1/dξ`.
    pub dq1: f64,
    /// `q̃_2`.
    pub q2: f64,
    /// `dq̃_2/dξ`.
    pub dq2: f64,
    /// Ratio parameter `r > 1`.
    pub r: f64,
}

/// Shooting diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingReport {
    /// Value of the free seed coefficient `a` after the first bisection.
    pub a_free: f64,
    /// Number of restart stages (including the first bisection).
    pub stages: usize,
    /// `ξ` at which each stage stopped being trusted.
    pub stage_ends: Vec<f64>,
}

/// A separatrix trajectory of the tilde system on `[ε, x_max]`.
#[derive(Debug, Clone)]
pub struct TildeTrajectory {
    /// Bessel order.
    pub alpha: f64,
    /// Ratio parameter.
    pub r: f64,
    /// Starting abscissa `ε`.
    pub eps: f64,
    /// Right end.
    pub x_max: f64,
    /// Shooting diagnostics.
    pub report: ShootingReport,
    sys: LaxSystem,
    /// `(τ_from, τ_to, solution)` pieces in `τ = log √ξ`.
    pieces: Vec<(f64, f64, DenseSolution)>,
    head: Head,
}

/// Closed-form pieces of the seed.
#[derive(Debug, Clone, Copy)]
struct Head {
    c: f64,
    a_lin: f64,
    gamma2: f64,
    p: f64,
}

impl Head {
    fn new(alpha: f64, r: f64) -> Self {
        let c = (2.0 / (alpha + 2.0)).sqrt();
        let p = alpha + 2.0;
        let a_lin = alpha * c / (4.0 * (alpha + 1.0) * (alpha + 2.0) * (alpha + 3.0));
        // q̃_2² ≈ γ² ξ^p
        let lg = (1.0 - 1.0 / r).ln() + 0.5 * p * r.ln() - p * 2f64.ln() - ln_gamma_unchecked(p + 1.0);
        Self {
            c,
            a_lin,
            gamma2: (2.0 * lg).exp(),
            p,
        }
    }

    /// `(J0, J1)` over `(0, η)` with `b_1 ≈ (y/2)(c² + 2cA y²)`, `b_2 ≈ (γ²/2) y^{2p+1}`.
    fn accumulators(&self, r: f64, eta: f64) -> (f64, f64) {
        let l = eta.ln();
        let mono = |coef: f64, m: f64| {
            let e = eta.powf(m + 1.0);
            (coef * e / (m + 1.0), coef * e * (l / (m + 1.0) - 1.0 / ((m + 1.0) * (m + 1.0))))
        };
        let terms = [
            mono(0.5 * self.c * self.c, 1.0),
            mono(self.c * self.a_lin, 3.0),
            mono(0.5 * r * self.gamma2, 2.0 * self.p + 1.0),
        ];
        terms.iter().fold((0.0, 0.0), |(a, b), (u, v)| (a + u, b + v))
    }

    /// `I(x)` for `x ≤ ε` from the seed asymptotics.
    fn log_weight(&self, r: f64, x: f64) -> f64 {
        let (j0, j1) = self.accumulators(r, x.sqrt());
        -2.0 * (0.5 * x.ln() * j0 - j1)
    }
}

fn system(alpha: f64, r: f64) -> LaxSystem {
    LaxSystem {
        r: vec![0.0, 1.0, r],
        kappa: vec![0.25 * alpha * alpha, 1.0, 0.0],
    }
}

/// Lax state at `ξ = ε` for the free coefficient `a`.
fn seed_state(sys: &LaxSystem, alpha: f64, r: f64, head: &Head, eps: f64, a: f64) -> Vec<f64> {
    let cfg = SpecFunConfig::default();
    let p = head.p;
    let ep = eps.powf(p);
    let dev = head.a_lin * eps + a * ep;
    let q1 = head.c + dev;
    let dq1 = head.a_lin * eps + p * a * ep;
    let rp = r - 2.0 / (alpha + 2.0);
    let z = (rp * eps).sqrt();
    let (jp, djp) = bessel_j_and_prime(&cfg, p, z);
    let amp = (1.0 - 1.0 / r) * (r / rp).powf(0.5 * p);
    let q2 = amp * jp;
    let dq2 = amp * djp * z * 0.5;
    // 1 − q̃_1² − q̃_2² with 1 − c² = α/(α+2) kept exact.
    let w = alpha / (alpha + 2.0) - dev * (2.0 * head.c + dev) - q2 * q2;
    let eta = eps.sqrt();
    let (j0, j1) = head.accumulators(r, eta);
    sys.state_from_q(eta, &[q1 * q1, q2 * q2], &[2.0 * q1 * dq1, 2.0 * q2 * dq2], w, j0, j1)
}

/// Fate of a trial trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fate {
    Above,
    Below,
}

struct Trial {
    sol: DenseSolution,
    fate: Fate,
}

fn run(sys: &LaxSystem, tau0: f64, y0: &[f64], tau1: f64, tol: f64) -> Result<Trial> {
    let n = sys.len();
    let mut fate = None;
    let sol = sys.integrate(tau0, y0, tau1, tol, |tau, st| {
        let q1sq = 2.0 * st[n + 1] / tau.exp();
        if q1sq > ABOVE {
            fate = Some(Fate::Above);
            Some("above".into())
        } else if q1sq < 0.0 {
            fate = Some(Fate::Below);
            Some("below".into())
        } else {
            None
        }
    })?;
    // Divergence without crossing either threshold counts as "below",
    // as does reaching the end.
    Ok(Trial {
        sol,
        fate: fate.unwrap_or(Fate::Below),
    })
}

fn q1sq_at(sys: &LaxSystem, sol: &DenseSolution, tau: f64) -> Result<f64> {
    let st = sol.eval(tau)?;
    Ok(2.0 * st[sys.len() + 1] / tau.exp())
}

/// Integrates the tilde system on `[ε, x_max]` along the separatrix.
///
/// `eps` is the starting abscissa in `ξ` and `tol` the local relative error
/// target of each integration.
///
/// Errors:
/// * validation, when `r ≤ 1`, `α < MIN_ALPHA` or `0 < ε < x_max` fails;
/// * non-convergence, when the shooting cannot bracket or extend the
///   separatrix.
pub fn tilde_integrate(alpha: f64, r: f64, eps: f64, x_max: f64, tol: f64) -> Result<TildeTrajectory> {
    tilde_integrate_shooting(alpha, r, eps, x_max, x_max, tol)
}

/// As [`tilde_integrate`], but trial trajectories are shot to
/// `x_shoot ≥ x_max`.
///
/// The separatrix is only well determined where trial trajectories still
/// have room to leave the physical region. Shooting beyond the range that
/// is needed therefore sharpens the trajectory on `[ε, x_max]`. The result
/// covers as much of `[ε, x_shoot]` as the shooting could extend, and at
/// least `[ε, x_max]`.
pub fn tilde_integrate_shooting(
    alpha: f64,
    r: f64,
    eps: f64,
    x_max: f64,
    x_shoot: f64,
    tol: f64,
) -> Result<TildeTrajectory> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(Error::Validation(format!("r = {r} must exceed 1")));
    }
    if !(alpha >= MIN_ALPHA) || !alpha.is_finite() {
        return Err(Error::Validation(format!(
            "alpha = {alpha}: the tilde boundary conditions are degenerate for alpha < {MIN_ALPHA}"
        )));
    }
    if !(eps > 0.0 && eps < x_max && x_max.is_finite()) {
        return Err(Error::Validation(format!("need 0 < eps < x_max, got eps = {eps}, x_max = {x_max}")));
    }
    let sys = system(alpha, r);
    let head = Head::new(alpha, r);
    if !(x_shoot >= x_max && x_shoot.is_finite()) {
        return Err(Error::Validation(format!("need x_shoot >= x_max, got {x_shoot} < {x_max}")));
    }
    let tau0 = 0.5 * eps.ln();
    let tau_need = 0.5 * x_max.ln();
    let tau_end = 0.5 * x_shoot.ln();

    // Stage 0: bisection on the free coefficient.
    let trial = |a: f64| -> Result<Trial> { run(&sys, tau0, &seed_state(&sys, alpha, r, &head, eps, a), tau_end, tol) };
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut widen = 0;
    while !(trial(lo)?.fate == Fate::Below && trial(hi)?.fate == Fate::Above) {
        widen += 1;
        // The free term a·ε^{α+2} is tiny for large α; widen until it is a
        // sizeable fraction of the leading seed value c.
        if hi * eps.powf(alpha + 2.0) > 0.1 * head.c {
            return Err(Error::NonConvergence {
                what: "tilde shooting: no bracket for the free seed coefficient".into(),
                last: (lo, hi),
                iterations: widen,
            });
        }
        lo *= 16.0;
        hi *= 16.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if trial(mid)?.fate == Fate::Above {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let a_free = lo;
    let mut t_lo = trial(lo)?;
    let mut t_hi = trial(hi)?;
    let mut pieces = Vec::new();
    let mut stage_ends = Vec::new();
    let mut tau_start = tau0;
    const GRID: usize = 4000;
    for stage in 0..200 {
        let end = t_lo.sol.t_end().min(t_hi.sol.t_end());
        let mut tr = end;
        for i in 1..=GRID {
            let t = tau_start + (end - tau_start) * i as f64 / GRID as f64;
            let d = (q1sq_at(&sys, &t_lo.sol, t)? - q1sq_at(&sys, &t_hi.sol, t)?).abs();
            if d > SPLIT {
                tr = tau_start + (end - tau_start) * (i.saturating_sub(1)).max(1) as f64 / GRID as f64;
                break;
            }
        }
        stage_ends.push((2.0 * tr).exp());
        pieces.push((tau_start, tr, t_lo.sol.clone()));
        // Past the required range, a stalling extension ends the search.
        let stalled = tr - tau_start < 1e-3 * (tau_end - tau0);
        if tr >= tau_end - 1e-12 || (stalled && tr >= tau_need - 1e-12) {
            let covered = (2.0 * tr.min(tau_end)).exp();
            return Ok(TildeTrajectory {
                alpha,
                r,
                eps,
                x_max: covered.min(x_shoot),
                report: ShootingReport {
                    a_free,
                    stages: stage + 1,
                    stage_ends,
                },
                sys,
                pieces,
                head,
            });
        }
        if tr <= tau_start {
            break;
        }
        // Restart: bisect along the segment joining the bracketing states.
        let y_lo = t_lo.sol.eval(tr)?;
        let y_hi = t_hi.sol.eval(tr)?;
        let along = |beta: f64| -> Vec<f64> { y_lo.iter().zip(&y_hi).map(|(l, h)| l + beta * (h - l)).collect() };
        let (mut blo, mut bhi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (blo + bhi);
            if run(&sys, tr, &along(mid), tau_end, tol)?.fate == Fate::Above {
                bhi = mid;
            } else {
                blo = mid;
            }
        }
        t_lo = run(&sys, tr, &along(blo), tau_end, tol)?;
        t_hi = run(&sys, tr, &along(bhi), tau_end, tol)?;
        tau_start = tr;
    }
    Err(Error::NonConvergence {
        what: "tilde shooting: separatrix could not be extended".into(),
        last: (eps, (2.0 * tau_start).exp()),
        iterations: pieces.len(),
    })
}

impl TildeTrajectory {
    fn lax_state(&self, x: f64) -> Result<Vec<f64>> {
        if !(x >= self.eps * (1.0 - 1e-12) && x <= self.x_max * (1.0 + 1e-12)) {
            return Err(Error::domain("TildeTrajectory", format!("x = {x} outside [{}, {}]", self.eps, self.x_max)));
        }
        let tau = 0.5 * x.ln();
        let piece = self
            .pieces
            .iter()
            .find(|(_, b, _)| tau <= *b + 1e-15)
            .unwrap_or_else(|| self.pieces.last().expect("at least one piece"));
        piece.2.eval(tau.clamp(piece.2.t_start(), piece.2.t_end()))
    }

    /// `(q̃_1², q̃_2²)` at `ξ`.
    pub fn q_squared(&self, xi: f64) -> Result<(f64, f64)> {
        let st = self.lax_state(xi)?;
        let q = self.sys.q_squared(xi.sqrt(), &st);
        Ok((q[0], q[1]))
    }

    /// `(q̃_1, q̃_1′, q̃_2, q̃_2′)` at `ξ` (primes are `d/dξ`).
    pub fn state_at(&self, xi: f64) -> Result<TildeState> {
        let st = self.lax_state(xi)?;
        let n = self.sys.len();
        let y = xi.sqrt();
        // d(q²)/dξ = −2a/y² − b/y³
        let comp = |j: usize| {
            let (a, b) = (st[j], st[n + j]);
            let q = (2.0 * b / y).max(0.0).sqrt();
            let dq2 = -2.0 * a / (y * y) - b / (y * y * y);
            (q, if q > 0.0 { dq2 / (2.0 * q) } else { 0.0 })
        };
        let (q1, dq1) = comp(1);
        let (q2, dq2) = comp(2);
        Ok(TildeState {
            xi,
            q1,
            dq1,
            q2,
            dq2,
            r: self.r,
        })
    }

    /// Conserved quantities `κ_j` at `ξ` (should equal `(α²/4, 1, 0)`).
    pub fn invariants(&self, xi: f64) -> Result<Vec<f64>> {
        Ok(self.sys.invariants(&self.lax_state(xi)?))
    }
}

/// `I(x; r) = −¼ ∫_0^x (q̃_1² + r q̃_2²) log(x/ξ) dξ`.
pub fn tilde_i(traj: &TildeTrajectory, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain("tilde_i", format!("x = {x} must be positive")));
    }
    if x <= traj.eps {
        return Ok(traj.head.log_weight(traj.r, x));
    }
    let st = traj.lax_state(x)?;
    Ok(traj.sys.log_weight(x.sqrt(), &st))
}
