//! The coupled Painlevé V system for `q_1, …, q_k` and the product formula
//!
//! ```text
//! F(r⃗x, s⃗) = Π_j exp( −(r_j/4) ∫_0^x log(x/ξ) q_j²(ξ) dξ ).
//! ```
//!
//! # The real form of the system
//!
//! Only `q_j²` is guaranteed real; when `s_{j+1} < s_j` the function `q_j`
//! itself is imaginary. Write `q_j = σ_j^{1/2} ρ_j` with
//! `σ_j = sign(s_{j+1} − s_j)` and `ρ_j` real, so `q_j² = σ_j ρ_j²`. In the
//! `j`-th equation every term is linear in exactly one of `q_j, q_j′, q_j″`,
//! and the remaining factors are built from `q_ℓ² = σ_ℓ ρ_ℓ²` and
//! `q_ℓ q_ℓ′ = σ_ℓ ρ_ℓ ρ_ℓ′`. Dividing equation `j` by `σ_j^{1/2}` therefore
//! gives a closed real system in `ρ`.
//!
//! With `D = ξ d/dξ`, `S = Σ σ_ℓ ρ_ℓ²`, `w = 1 − S`, `P = Σ σ_ℓ ρ_ℓ Dρ_ℓ`
//! and `T = Σ σ_ℓ (Dρ_ℓ)²`, multiplying the system by `ξ` gives
//!
//! ```text
//! w² D²ρ_j + ρ_j w Σ_ℓ σ_ℓ ρ_ℓ D²ρ_ℓ = R_j,
//! R_j = α²ρ_j/4 − w² r_j ξ ρ_j/4 − ρ_j P² − ρ_j w T.
//! ```
//!
//! The matrix `w²I + w ρ (σρ)ᵀ` is a rank-one update of a multiple of the
//! identity. Since `(σρ)ᵀρ = S = 1 − w`, the Sherman–Morrison formula
//! collapses to
//!
//! ```text
//! D²ρ = (R − ρ (σρ)ᵀR) / w².
//! ```
//!
//! The only singularity is `w = 0`, and it is explicit.
//!
//! # Numerical formulation
//!
//! The system is integrated in `t = log ξ` from `ξ = ε` to `x_max`.
//!
//! * **State.** The state holds `ρ`, `Dρ` and `w` itself, with `Dw = −2P`.
//!   For `α = 0` and `s_1 = 0` the difference `1 − S` vanishes at the
//!   origin; computing it as `1 − Σσρ²` would cancel catastrophically.
//! * **Seed.** The seed is the boundary behaviour
//!   `q_j ≈ √(s_{j+1}−s_j) J_α(√(r_j ξ))` together with its first
//!   correction, a common factor `1 + c ξ^{α+1}` (see [`seed_correction`]).
//! * **Initial `w`.** For `α = 0` it is evaluated as
//!   `s_1 + Σ_j Δ_j (1 − J_0²(1+cε)²)`, which avoids cancellation.
//! * **Step control.** It is relative, pair by pair. The scale of `ρ_j` and
//!   `Dρ_j` is `max(|ρ_j|, |Dρ_j|)`, so amplitudes of order `ε^{α/2}` stay
//!   significant.
//! * **Log-weights.** These integrals are accumulated as ODE states:
//!   `I1_j = ∫ r_j q_j² dξ` and `I2_j = ∫ r_j q_j² log ξ dξ`. Then
//!   `log F = −¼ Σ_j (log x · I1_j − I2_j)`. On `(0, ε)` the integrals are
//!   initialised from the seed asymptotics `q_j² ≈ Δ_j (r_j ξ/4)^α / Γ(α+1)²`.

pub mod bform;
pub mod lax;
pub mod ratio;
pub mod scalar;
pub mod tilde;

use crate::error::{Error, Result};
use crate::fredholm::ParameterSet;
use crate::ode::{self, DenseSolution, OdeOptions, RhsRefusal};
use crate::specfun::{bessel_j_and_prime, ln_gamma_unchecked, one_minus_j0_squared, SpecFunConfig};
use serde::Serialize;

/// Amplitude beyond which a trajectory is declared to have blown up.
pub const BLOWUP_LIMIT: f64 = 1e6;

/// Threshold on `|1 − S|` below which the coupling matrix counts as singular.
///
/// The comparison is relative to `min(1, ξ)`: for `α = 0` and `s_1 = 0` the
/// regular solution has `1 − S ∝ ξ` near the origin, so an absolute
/// threshold would reject every valid start.
pub const SINGULAR_W: f64 = 1e-10;

/// Default starting abscissa `ε = 10⁻⁴ · min(1, 1/r_k)`.
pub fn default_eps(r: &[f64]) -> f64 {
    let rk = r.last().copied().unwrap_or(1.0);
    1e-4 * (1.0f64).min(1.0 / rk)
}

/// One point of a trajectory in the original variable `ξ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PainleveState {
    /// Abscissa `ξ > 0`.
    pub xi: f64,
    /// Real amplitudes `ρ_j` with `q_j² = σ_j ρ_j²`.
    pub rho: Vec<f64>,
    /// Derivatives `dρ_j/dξ`.
    pub drho: Vec<f64>,
    /// Signs `σ_j = sign(s_{j+1} − s_j)`.
    pub sigma: Vec<f64>,
}

impl PainleveState {
    /// `q_j² = σ_j ρ_j²`.
    pub fn q_squared(&self) -> Vec<f64> {
        self.rho.iter().zip(&self.sigma).map(|(r, s)| s * r * r).collect()
    }

    /// `1 − S = 1 − Σ σ_j ρ_j²` (direct evaluation).
    pub fn one_minus_s(&self) -> f64 {
        1.0 - self.q_squared().iter().sum::<f64>()
    }
}

/// Signs of the jumps.
pub fn sign_vector(params: &ParameterSet) -> Vec<f64> {
    params.jumps().iter().map(|d| d.signum()).collect()
}

/// Solves the rank-one system for `D²ρ` in the `D = ξ d/dξ` variable.
///
/// `w` must be `1 − Σσρ²` (passed separately so callers can supply an
/// accurately propagated value).
pub(crate) fn d2_rho(
    alpha: f64,
    r: &[f64],
    sigma: &[f64],
    xi: f64,
    rho: &[f64],
    drho_d: &[f64],
    w: f64,
    out: &mut [f64],
) {
    let k = rho.len();
    let mut p = 0.0;
    let mut t = 0.0;
    for j in 0..k {
        p += sigma[j] * rho[j] * drho_d[j];
        t += sigma[j] * drho_d[j] * drho_d[j];
    }
    let a2 = 0.25 * alpha * alpha;
    let w2 = w * w;
    let mut proj = 0.0;
    for j in 0..k {
        let rj = rho[j] * (a2 - 0.25 * w2 * r[j] * xi - p * p - w * t);
        out[j] = rj;
        proj += sigma[j] * rho[j] * rj;
    }
    for j in 0..k {
        out[j] = (out[j] - rho[j] * proj) / w2;
    }
}

/// Second derivatives `ρ_j″ = d²ρ_j/dξ²` of the real form of the system.
///
/// Fails with [`Error::Conditioning`] when `|1 − S| < 10⁻¹⁰` (the coupling
/// matrix is numerically singular) or `ξ ≤ 0`.
pub fn accelerations(state: &PainleveState, params: &ParameterSet) -> Result<Vec<f64>> {
    let k = params.k();
    if state.rho.len() != k || state.drho.len() != k || state.sigma.len() != k {
        return Err(Error::Validation(format!("state dimension does not match k = {k}")));
    }
    if !(state.xi > 0.0) {
        return Err(Error::Conditioning(format!("xi = {} must be positive", state.xi)));
    }
    let w = state.one_minus_s();
    if w.abs() < SINGULAR_W {
        return Err(Error::Conditioning(format!(
            "|1 - S| = {:e} below {SINGULAR_W:e} at xi = {}",
            w.abs(),
            state.xi
        )));
    }
    let xi = state.xi;
    let d: Vec<f64> = state.drho.iter().map(|v| v * xi).collect();
    let mut d2 = vec![0.0; k];
    d2_rho(params.alpha, &params.r, &state.sigma, xi, &state.rho, &d, w, &mut d2);
    Ok(d2.iter().zip(&d).map(|(a, b)| (a - b) / (xi * xi)).collect())
}

/// Residuals of the `k` displayed equations (divided by `σ_j^{1/2}`), in the
/// original `ξ` form, for given `ρ, ρ′, ρ″`.
///
/// This evaluates the system term by term exactly as displayed and is used
/// to verify [`accelerations`].
pub fn system_residuals(
    params: &ParameterSet,
    sigma: &[f64],
    xi: f64,
    rho: &[f64],
    drho: &[f64],
    d2rho: &[f64],
) -> Vec<f64> {
    let k = rho.len();
    let s: f64 = (0..k).map(|l| sigma[l] * rho[l] * rho[l]).sum();
    let one_s = 1.0 - s;
    // Σ (ξ q q′)′ = Σ σ (ρρ′ + ξρ′² + ξρρ″)
    let sum_deriv: f64 = (0..k)
        .map(|l| sigma[l] * (rho[l] * drho[l] + xi * drho[l] * drho[l] + xi * rho[l] * d2rho[l]))
        .sum();
    let sum_qqp: f64 = (0..k).map(|l| sigma[l] * rho[l] * drho[l]).sum();
    (0..k)
        .map(|j| {
            let lhs = xi * rho[j] * one_s * sum_deriv
                + xi * one_s * one_s * ((drho[j] + xi * d2rho[j]) + params.r[j] * rho[j] / 4.0)
                + xi * xi * rho[j] * sum_qqp * sum_qqp;
            let rhs = params.alpha * params.alpha * rho[j] / 4.0;
            lhs - rhs
        })
        .collect()
}

/// Relative correction coefficient `c` of the seed.
///
/// The functions are `q_j(ξ) = Δ_j^{1/2} Q(r_j ξ)`, where `Q` solves
/// `(I − K M) Q = φ` with `φ(y) = J_α(√y)` and `M` multiplying by `1 − s_i`
/// on `(r_{i−1}ξ, r_i ξ)`. One Neumann step with the leading small-argument
/// forms of `K` and `φ` gives `Q(y) ≈ φ(y)(1 + c ξ^{α+1})` with
///
/// ```text
/// c = Σ_i (1 − s_i)(r_i^{α+1} − r_{i−1}^{α+1}) / (4^{α+1} Γ(α+1) Γ(α+2) (α+1)).
/// ```
///
/// This term is irrelevant for `α > 0`. For `α = 0` and `s_1 = 0`, however,
/// `1 − S` is itself `O(ξ)`, and omitting the correction leaves an `O(1)`
/// relative error in `1 − S` that the flow amplifies.
fn seed_correction(params: &ParameterSet) -> f64 {
    let a1 = params.alpha + 1.0;
    let mut prev = 0.0;
    let mut sum = 0.0;
    for (ri, si) in params.r.iter().zip(&params.s) {
        let p = ri.powf(a1);
        sum += (1.0 - si) * (p - prev);
        prev = p;
    }
    let denom = (a1 * 4f64.ln() + ln_gamma_unchecked(a1) + ln_gamma_unchecked(a1 + 1.0)).exp() * a1;
    sum / denom
}

/// Seed `(ρ, Dρ, 1 − S)` at `ξ = ε` with `D = ξ d/dξ`.
fn seed_parts(params: &ParameterSet, eps: f64, refined: bool) -> (Vec<f64>, Vec<f64>, f64) {
    let cfg = SpecFunConfig::default();
    let a1 = params.alpha + 1.0;
    let c = if refined { seed_correction(params) } else { 0.0 };
    let g = c * eps.powf(a1);
    let mut rho = Vec::with_capacity(params.k());
    let mut d = Vec::with_capacity(params.k());
    let mut w = if params.alpha == 0.0 { params.s[0] } else { 1.0 };
    for (j, &dj) in params.jumps().iter().enumerate() {
        let z = (params.r[j] * eps).sqrt();
        let (jv, djv) = bessel_j_and_prime(&cfg, params.alpha, z);
        let amp = dj.abs().sqrt();
        rho.push(amp * jv * (1.0 + g));
        d.push(amp * (0.5 * djv * z * (1.0 + g) + jv * a1 * g));
        if params.alpha == 0.0 {
            // 1 − J²(1+g)² = (1 − J²) − J²(2g + g²)
            w += dj * (one_minus_j0_squared(z) - jv * jv * g * (2.0 + g));
        } else {
            w -= dj * jv * jv * (1.0 + g) * (1.0 + g);
        }
    }
    (rho, d, w)
}

/// Leading-order seed at `ξ = ε`: `ρ_j = |Δ_j|^{1/2} J_α(√(r_j ε))` and its
/// chain-rule derivative.
pub fn seed(params: &ParameterSet, eps: f64) -> Result<PainleveState> {
    seed_state(params, eps, false)
}

/// Refined seed `ρ_j = |Δ_j|^{1/2} J_α(√(r_j ε)) (1 + c ε^{α+1})`, the one
/// used by [`integrate`] (see [`seed_correction`]).
pub fn seed_refined(params: &ParameterSet, eps: f64) -> Result<PainleveState> {
    seed_state(params, eps, true)
}

fn seed_state(params: &ParameterSet, eps: f64, refined: bool) -> Result<PainleveState> {
    params.validate()?;
    if !(eps > 0.0) {
        return Err(Error::Validation(format!("eps = {eps} must be positive")));
    }
    let (rho, d, _) = seed_parts(params, eps, refined);
    Ok(PainleveState {
        xi: eps,
        rho,
        drho: d.iter().map(|v| v / eps).collect(),
        sigma: sign_vector(params),
    })
}

/// Coefficient `c_j` of the small-`ξ` behaviour `r_j q_j² ≈ c_j ξ^α`.
fn head_coefficients(params: &ParameterSet) -> Vec<f64> {
    let a = params.alpha;
    let lg = ln_gamma_unchecked(a + 1.0);
    params
        .jumps()
        .iter()
        .zip(&params.r)
        .map(|(d, r)| r * d * ((a * (r / 4.0).ln()) - 2.0 * lg).exp())
        .collect()
}

/// Integration settings for the `q`-system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PainleveConfig {
    /// Starting abscissa; [`default_eps`] when `None`.
    pub eps: Option<f64>,
    /// Local relative error target.
    pub tol: f64,
}

impl Default for PainleveConfig {
    fn default() -> Self {
        Self { eps: None, tol: 1e-10 }
    }
}

/// Layout of the integration state.
#[derive(Debug, Clone, Copy)]
struct Layout {
    k: usize,
}

impl Layout {
    fn rho(&self) -> std::ops::Range<usize> {
        0..self.k
    }
    fn d(&self) -> std::ops::Range<usize> {
        self.k..2 * self.k
    }
    fn w(&self) -> usize {
        2 * self.k
    }
    fn i1(&self) -> std::ops::Range<usize> {
        2 * self.k + 1..3 * self.k + 1
    }
    fn i2(&self) -> std::ops::Range<usize> {
        3 * self.k + 1..4 * self.k + 1
    }
    fn abs_int(&self) -> usize {
        4 * self.k + 1
    }
    fn dim(&self) -> usize {
        4 * self.k + 2
    }
}

/// A solved trajectory of the `q`-system with dense output.
#[derive(Debug, Clone)]
pub struct PainleveTrajectory {
    /// Bessel order.
    pub alpha: f64,
    /// `r_1 < … < r_k`.
    pub r: Vec<f64>,
    /// `s_1, …, s_k`.
    pub s: Vec<f64>,
    /// Signs `σ_j`.
    pub sigma: Vec<f64>,
    /// Starting abscissa.
    pub eps: f64,
    /// Right end of the trajectory.
    pub x_max: f64,
    /// Number of accepted steps on which `|1 − S| < 10⁻¹⁰` (flag only).
    pub near_singular_steps: usize,
    head: Vec<f64>,
    layout: Layout,
    sol: DenseSolution,
}

/// `F` and its logarithm from the product formula, with the per-interval
/// log-weights `−(r_j/4) ∫_0^x log(x/ξ) q_j² dξ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenFnEvaluation {
    /// Scale `x`.
    pub x: f64,
    /// `F(r⃗x, s⃗)`.
    pub f: f64,
    /// `log F`.
    pub log_f: f64,
    /// Per-interval log-weights; they sum to `log F`.
    pub log_weights: Vec<f64>,
}

impl PainleveTrajectory {
    /// Number of coupled functions.
    pub fn k(&self) -> usize {
        self.layout.k
    }

    /// The underlying dense solution in `t = log ξ`.
    pub fn dense(&self) -> &DenseSolution {
        &self.sol
    }

    /// Accepted abscissae `ξ` (strictly increasing).
    pub fn mesh_xi(&self) -> Vec<f64> {
        self.sol.mesh().iter().map(|t| t.exp()).collect()
    }

    fn raw(&self, xi: f64) -> Result<Vec<f64>> {
        if !(xi >= self.eps * (1.0 - 1e-12) && xi <= self.x_max * (1.0 + 1e-12)) {
            return Err(Error::domain(
                "PainleveTrajectory",
                format!("xi = {xi} outside [{}, {}]", self.eps, self.x_max),
            ));
        }
        self.sol.eval(xi.ln().clamp(self.sol.t_start(), self.sol.t_end()))
    }

    /// State (in `ξ`-derivatives) at `ξ`.
    pub fn state_at(&self, xi: f64) -> Result<PainleveState> {
        let y = self.raw(xi)?;
        let l = self.layout;
        Ok(PainleveState {
            xi,
            rho: y[l.rho()].to_vec(),
            drho: y[l.d()].iter().map(|v| v / xi).collect(),
            sigma: self.sigma.clone(),
        })
    }

    /// `(ρ, Dρ, w)` with `D = ξ d/dξ` and the propagated `w = 1 − S`.
    pub fn d_state_at(&self, xi: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let y = self.raw(xi)?;
        let l = self.layout;
        Ok((y[l.rho()].to_vec(), y[l.d()].to_vec(), y[l.w()]))
    }

    /// `D²ρ` at `ξ` from the equations of motion.
    pub fn d2_at(&self, xi: f64) -> Result<Vec<f64>> {
        let (rho, d, w) = self.d_state_at(xi)?;
        let mut out = vec![0.0; self.k()];
        d2_rho(self.alpha, &self.r, &self.sigma, xi, &rho, &d, w, &mut out);
        Ok(out)
    }

    /// `q_j²(ξ)`.
    pub fn q_squared(&self, xi: f64) -> Result<Vec<f64>> {
        Ok(self.state_at(xi)?.q_squared())
    }

    /// Propagated `1 − S(ξ)`.
    pub fn one_minus_s(&self, xi: f64) -> Result<f64> {
        Ok(self.d_state_at(xi)?.2)
    }

    /// `∫_0^x r_j q_j² dξ` for every `j`.
    pub fn weighted_integrals(&self, x: f64) -> Result<Vec<f64>> {
        if x <= self.eps {
            let a1 = self.alpha + 1.0;
            return Ok(self.head.iter().map(|c| c * x.powf(a1) / a1).collect());
        }
        let y = self.raw(x)?;
        Ok(y[self.layout.i1()].to_vec())
    }

    /// `d/dx log F = −(1/4x) Σ_j ∫_0^x r_j q_j² dξ`.
    pub fn dlogf_dx(&self, x: f64) -> Result<f64> {
        Ok(-self.weighted_integrals(x)?.iter().sum::<f64>() / (4.0 * x))
    }
}

/// `∫_0^x (c ξ^α) log(x/ξ) dξ = c x^{α+1}/(α+1)²`, used below `ε`.
fn head_log_weight(c: f64, alpha: f64, x: f64) -> f64 {
    let a1 = alpha + 1.0;
    c * x.powf(a1) / (a1 * a1)
}

/// Integrates the real form of the system from `ε` to `x_max`.
///
/// Errors: invalid parameters, `α < 0` (the trajectory starts with
/// `1 − S < 0` and must cross the apparent singularity `S = 1`), step-size
/// floor, blow-up (`|ρ| > 10⁶`, reported with the last good `ξ`).
pub fn integrate(params: &ParameterSet, eps: f64, x_max: f64, tol: f64) -> Result<PainleveTrajectory> {
    params.validate()?;
    if params.alpha < 0.0 {
        return Err(Error::Validation(format!(
            "alpha = {} < 0: the q-system starts beyond its singular set 1 - S = 0; use the Fredholm route",
            params.alpha
        )));
    }
    if !(eps > 0.0 && eps < x_max) || !x_max.is_finite() {
        return Err(Error::Validation(format!("need 0 < eps < x_max, got eps = {eps}, x_max = {x_max}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Validation("tol must be positive".into()));
    }
    let k = params.k();
    let l = Layout { k };
    let sigma = sign_vector(params);
    let (rho0, d0, w0) = seed_parts(params, eps, true);
    let head = head_coefficients(params);
    let mut y0 = vec![0.0; l.dim()];
    y0[l.rho()].copy_from_slice(&rho0);
    y0[l.d()].copy_from_slice(&d0);
    y0[l.w()] = w0;
    // Head integrals over (0, ε) from r q² ≈ c ξ^α.
    let a1 = params.alpha + 1.0;
    let le = eps.ln();
    let mut abs_head = 0.0;
    for j in 0..k {
        let c = head[j];
        y0[l.i1().start + j] = c * eps.powf(a1) / a1;
        y0[l.i2().start + j] = c * eps.powf(a1) * (le / a1 - 1.0 / (a1 * a1));
        abs_head += c.abs() * eps.powf(a1) / a1;
    }
    y0[l.abs_int()] = abs_head;

    let alpha = params.alpha;
    let r = params.r.clone();
    let sig = sigma.clone();
    let mut acc = vec![0.0; k];
    let rhs = move |t: f64, y: &[f64], dy: &mut [f64]| -> std::result::Result<(), RhsRefusal> {
        let xi = t.exp();
        let w = y[l.w()];
        if !(w.abs() > 1e-300) || w.abs() < 1e-3 * SINGULAR_W * xi.min(1.0) {
            return Err(RhsRefusal(format!("1 - S = {w:e} is numerically singular")));
        }
        let (rho, d) = (&y[l.rho()], &y[l.d()]);
        d2_rho(alpha, &r, &sig, xi, rho, d, w, &mut acc);
        let mut p = 0.0;
        let mut absint = 0.0;
        for j in 0..k {
            dy[j] = d[j];
            dy[k + j] = acc[j];
            p += sig[j] * rho[j] * d[j];
            let rq = r[j] * sig[j] * rho[j] * rho[j] * xi;
            dy[l.i1().start + j] = rq;
            dy[l.i2().start + j] = rq * t;
            absint += rq.abs();
        }
        dy[l.w()] = -2.0 * p;
        dy[l.abs_int()] = absint;
        if dy.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(RhsRefusal("non-finite derivative".into()))
        }
    };
    // The `log ξ` factor in `I2` is bounded by this over the whole range.
    let log_span = 1.0f64.max(eps.ln().abs()).max(x_max.ln().abs());
    let scale = move |a: &[f64], b: &[f64], sc: &mut [f64]| {
        for j in 0..k {
            let m = a[j].abs().max(b[j].abs()).max(a[k + j].abs()).max(b[k + j].abs()).max(1e-300);
            sc[j] = m;
            sc[k + j] = m;
        }
        sc[l.w()] = a[l.w()].abs().max(b[l.w()].abs()).max(1e-300);
        let ia = a[l.abs_int()].abs().max(b[l.abs_int()].abs()).max(1e-300);
        for j in 0..k {
            sc[l.i1().start + j] = ia;
            sc[l.i2().start + j] = ia * log_span;
        }
        sc[l.abs_int()] = ia;
    };
    let mut near = 0usize;
    let monitor = |t: f64, y: &[f64]| -> Option<String> {
        if y[l.w()].abs() < SINGULAR_W * t.exp().min(1.0) {
            near += 1;
        }
        if y[l.rho()].iter().any(|v| v.abs() > BLOWUP_LIMIT || !v.is_finite()) {
            return Some(format!("blow-up: |rho| exceeded {BLOWUP_LIMIT:e}"));
        }
        None
    };
    let opts = OdeOptions {
        rtol: tol,
        h_init: None,
        h_min: 1e-10,
        max_steps: 2_000_000,
    };
    let sol = ode::integrate(rhs, scale, monitor, eps.ln(), &y0, x_max.ln(), &opts)?;
    if let Some(reason) = &sol.stopped {
        return Err(Error::Integration {
            t: sol.t_end().exp(),
            reason: format!("{reason} (last good xi = {:e})", sol.t_end().exp()),
        });
    }
    Ok(PainleveTrajectory {
        alpha,
        r: params.r.clone(),
        s: params.s.clone(),
        sigma,
        eps,
        x_max,
        near_singular_steps: near,
        head,
        layout: l,
        sol,
    })
}

/// Integrates with a [`PainleveConfig`].
pub fn integrate_with(params: &ParameterSet, x_max: f64, cfg: &PainleveConfig) -> Result<PainleveTrajectory> {
    let eps = cfg.eps.unwrap_or_else(|| default_eps(&params.r));
    integrate(params, eps, x_max, cfg.tol)
}

/// `F(r⃗x, s⃗)` from a trajectory covering `(ε, x]`.
pub fn genfn_painleve(traj: &PainleveTrajectory, x: f64) -> Result<GenFnEvaluation> {
    if !(x > 0.0) || x > traj.x_max * (1.0 + 1e-12) {
        return Err(Error::domain(
            "genfn_painleve",
            format!("x = {x} outside (0, {}] covered by the trajectory", traj.x_max),
        ));
    }
    let log_weights: Vec<f64> = if x <= traj.eps {
        traj.head.iter().map(|&c| -0.25 * head_log_weight(c, traj.alpha, x)).collect()
    } else {
        let y = traj.raw(x)?;
        let lx = x.ln();
        (0..traj.k())
            .map(|j| -0.25 * (lx * y[traj.layout.i1().start + j] - y[traj.layout.i2().start + j]))
            .collect()
    };
    let log_f: f64 = log_weights.iter().sum();
    Ok(GenFnEvaluation {
        x,
        f: log_f.exp(),
        log_f,
        log_weights,
    })
}

/// `F(r⃗x, s⃗)` by the Painlevé route at the scale stored in `params`.
pub fn genfn(params: &ParameterSet, cfg: &PainleveConfig) -> Result<GenFnEvaluation> {
    let traj = integrate_with(params, params.x, cfg)?;
    genfn_painleve(&traj, params.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(alpha: f64, r: &[f64], s: &[f64]) -> ParameterSet {
        ParameterSet::new(alpha, r.to_vec(), s.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn accelerations_satisfy_displayed_system() {
        let p = ps(0.5, &[1.0, 1.7, 3.0], &[0.2, 0.9, 0.1]);
        let st = PainleveState {
            xi: 0.8,
            rho: vec![0.3, -0.2, 0.25],
            drho: vec![0.1, 0.4, -0.3],
            sigma: sign_vector(&p),
        };
        let acc = accelerations(&st, &p).unwrap();
        let res = system_residuals(&p, &st.sigma, st.xi, &st.rho, &st.drho, &acc);
        assert!(res.iter().all(|r| r.abs() < 1e-12), "{res:?}");
    }

    #[test]
    fn zero_state_is_stationary() {
        let p = ps(0.5, &[1.0, 2.0], &[0.3, 0.7]);
        let st = PainleveState {
            xi: 0.5,
            rho: vec![0.0, 0.0],
            drho: vec![0.0, 0.0],
            sigma: sign_vector(&p),
        };
        assert_eq!(accelerations(&st, &p).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn seed_values() {
        let p = ps(0.0, &[1.0], &[0.0]);
        let eps = 1e-4;
        let s = seed(&p, eps).unwrap();
        assert!((s.rho[0] - (1.0 - eps / 4.0)).abs() < 1e-8);
        let p2 = ps(0.0, &[1.0, 2.0], &[1.0, 0.0]);
        let s2 = seed(&p2, eps).unwrap();
        assert_eq!(s2.sigma, vec![-1.0, 1.0]);
        assert!(s2.q_squared()[0] <= 0.0);
    }

    #[test]
    fn alpha_zero_gap_matches_closed_form() {
        // F(x, 0) = e^{−x/4} for α = 0.
        let p = ps(0.0, &[1.0], &[0.0]);
        let traj = integrate_with(&p, 4.0, &PainleveConfig::default()).unwrap();
        for &x in &[0.5, 1.0, 4.0] {
            let f = genfn_painleve(&traj, x).unwrap().f;
            assert!((f - (-x / 4.0f64).exp()).abs() < 1e-6, "x={x}: {f}");
        }
    }

    #[test]
    fn trivial_configuration_near_unit_jumps() {
        // s close to 1 gives tiny amplitudes and F close to 1.
        let p = ps(0.0, &[1.0], &[1.0 - 1e-12]);
        let traj = integrate_with(&p, 1.0, &PainleveConfig::default()).unwrap();
        assert!((genfn_painleve(&traj, 1.0).unwrap().f - 1.0).abs() < 1e-11);
    }

    #[test]
    fn negative_alpha_is_refused() {
        let p = ps(-0.5, &[1.0], &[0.0]);
        assert!(integrate_with(&p, 1.0, &PainleveConfig::default()).is_err());
    }
}
