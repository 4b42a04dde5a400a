//! Nyström discretisation of the generating-function operator
//! `1 − χ_(0,x_k) Σ_j (1 − s_j) 𝒦 χ_(x_{j−1}, x_j)` and evaluation of its
//! Fredholm determinant.
//!
//! Each subinterval `(x_{j−1}, x_j)` carries an `m`-point Gauss–Legendre
//! rule, except the first one. Both kernels have the form
//! `K(u, v) = (uv)^{α/2} G(u, v)` with `G` smooth up to the origin. The first
//! interval therefore uses the Gauss–Jacobi rule `W_b` for the weight `u^α`,
//! with effective weights `w_b = W_b u_b^{−α}`. The symmetrised entries
//! `√w_a K(u_a, u_b) √w_b = √W_a G(u_a, u_b) √W_b` are then smooth, and the
//! determinant converges spectrally for every `α > −1`. Eigenfunctions
//! behave like `u^{α/2}` times a smooth function, so the Nyström integrand is
//! smooth too.
//!
//! A later interval `(a, b)` with `b ≫ a` still sees the branch point of
//! `u^{α/2}` at the origin just beyond its left end, and Gauss–Legendre in
//! `u` then converges slowly. Such intervals use the rule in `t = log u`,
//! where the kernel is entire. The switch happens when `b/a > GEOMETRIC_RATIO`.
//!
//! The symmetrised matrix `√w_a K(u_a, u_b) √w_b` is built once and kept;
//! multipliers `c_b = 1 − s_{j(b)}`, possibly complex, are applied column-wise
//! at determinant time so that sweeps over `s` (coefficient extraction) share
//! one kernel evaluation.

use crate::error::{Error, Result};
use crate::kernels::{BesselKernelSpec, Kernel};
use crate::quad::{gauss_jacobi_unit, gauss_legendre};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// The admissible parameter tuple `(α, r⃗, s⃗, x)`.
///
/// Conventions: `r_0 = 0`, `s_{k+1} = 1`, interval endpoints `x_j = r_j x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParameterSet {
    /// Bessel order `α > −1`.
    pub alpha: f64,
    /// Strictly increasing positive `r_1 < … < r_k`.
    pub r: Vec<f64>,
    /// Multipliers `s_1, …, s_k` with `s_j ≠ s_{j+1}`.
    pub s: Vec<f64>,
    /// Scale `x > 0`.
    pub x: f64,
}

impl ParameterSet {
    /// Validated constructor.
    pub fn new(alpha: f64, r: Vec<f64>, s: Vec<f64>, x: f64) -> Result<Self> {
        let p = Self { alpha, r, s, x };
        p.validate()?;
        Ok(p)
    }

    /// Number of intervals `k`.
    pub fn k(&self) -> usize {
        self.r.len()
    }

    /// Checks the admissibility conditions.
    ///
    /// Degenerate configurations (`s_j = s_{j+1}` or `r_j = r_{j−1}`) are
    /// refused: for them `F(r⃗x, s⃗) = F(r⃗^{[j]}x, s⃗^{[j]})` with the `j`-th
    /// components removed, and callers should reduce `k` themselves.
    pub fn validate(&self) -> Result<()> {
        validate_alpha(self.alpha)?;
        validate_r(&self.r)?;
        if self.s.len() != self.r.len() {
            return Err(Error::Validation(format!(
                "r has {} entries but s has {}",
                self.r.len(),
                self.s.len()
            )));
        }
        if self.s.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("s entries must be finite".into()));
        }
        let ext = self.s_extended();
        for j in 0..self.k() {
            if ext[j] == ext[j + 1] {
                return Err(Error::Validation(format!(
                    "s_{} = s_{} = {} (with s_{} = 1): the configuration is degenerate; \
                     drop r_{} and s_{} since F(r x, s) = F(r^[j] x, s^[j])",
                    j + 1,
                    j + 2,
                    ext[j],
                    self.k() + 1,
                    j + 1,
                    j + 1
                )));
            }
        }
        if !(self.x > 0.0) || !self.x.is_finite() {
            return Err(Error::Validation(format!("x = {} must be positive", self.x)));
        }
        Ok(())
    }

    /// `(s_1, …, s_k, 1)`.
    pub fn s_extended(&self) -> Vec<f64> {
        let mut v = self.s.clone();
        v.push(1.0);
        v
    }

    /// Jumps `Δ_j = s_{j+1} − s_j`.
    pub fn jumps(&self) -> Vec<f64> {
        let e = self.s_extended();
        (0..self.k()).map(|j| e[j + 1] - e[j]).collect()
    }

    /// Interval endpoints `x_j = r_j x`.
    pub fn endpoints(&self) -> Vec<f64> {
        self.r.iter().map(|r| r * self.x).collect()
    }

    /// Same `(α, r⃗, s⃗)` at another scale.
    pub fn with_x(&self, x: f64) -> Result<Self> {
        Self::new(self.alpha, self.r.clone(), self.s.clone(), x)
    }
}

pub(crate) fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Validation(format!("alpha = {alpha} must exceed -1")));
    }
    Ok(())
}

pub(crate) fn validate_r(r: &[f64]) -> Result<()> {
    if r.is_empty() {
        return Err(Error::Validation("need at least one interval (k >= 1)".into()));
    }
    let mut prev = 0.0;
    for (j, &v) in r.iter().enumerate() {
        if !(v > prev) || !v.is_finite() {
            return Err(Error::Validation(format!(
                "r must be strictly increasing and positive: r_{} = {v} does not exceed {prev}",
                j + 1
            )));
        }
        prev = v;
    }
    Ok(())
}

/// Quadrature data and symmetrised kernel matrix of the discretised operator.
#[derive(Debug, Clone)]
pub struct DiscretizedOperator {
    /// Nodes `u_a`, increasing.
    pub nodes: Vec<f64>,
    /// Weights `w_a`.
    pub weights: Vec<f64>,
    /// Subinterval index `j(a)` (0-based) of every node.
    pub interval: Vec<usize>,
    /// Multipliers `c_a = 1 − s_{j(a)}`.
    pub multipliers: Vec<Complex64>,
    /// Number of subintervals `k`.
    pub k: usize,
    /// Nodes per subinterval.
    pub m: usize,
    /// Row-major `√w_a K(u_a, u_b) √w_b`.
    base: Vec<f64>,
}

impl DiscretizedOperator {
    /// Number of quadrature nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// `true` when there are no nodes (never produced by [`discretize`]).
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Entry `M_ab = √w_a K(u_a,u_b) c_b √w_b`.
    pub fn entry(&self, a: usize, b: usize) -> Complex64 {
        self.multipliers[b] * self.base[a * self.len() + b]
    }

    /// Replaces the multipliers by `1 − s_j` for the given `s⃗`.
    pub fn set_s(&mut self, s: &[Complex64]) -> Result<()> {
        if s.len() != self.k {
            return Err(Error::Validation(format!("expected {} multipliers, got {}", self.k, s.len())));
        }
        for (c, &j) in self.multipliers.iter_mut().zip(&self.interval) {
            *c = Complex64::new(1.0, 0.0) - s[j];
        }
        Ok(())
    }

    /// Copy with different `s⃗`, sharing nothing mutable with `self`.
    pub fn with_s(&self, s: &[Complex64]) -> Result<Self> {
        let mut op = self.clone();
        op.set_s(s)?;
        Ok(op)
    }

    /// `∂/∂s_j log det(I − M)` at the current (real) multipliers.
    ///
    /// With `M = B diag(c)` and `∂c/∂s_j = −χ_j`, this equals
    /// `tr((I − M)⁻¹ B χ_j) = Σ_{a ∈ j} [(I − M)⁻¹ B]_{aa}`, computed from one
    /// LU factorisation.
    pub fn dlog_det_ds(&self, j: usize) -> Result<f64> {
        if j >= self.k {
            return Err(Error::Validation(format!("interval index {j} out of range 0..{}", self.k)));
        }
        if self.multipliers.iter().any(|c| c.im != 0.0) {
            return Err(Error::Validation("dlog_det_ds requires real multipliers".into()));
        }
        let n = self.len();
        let mat = DMatrix::<f64>::from_fn(n, n, |a, b| (a == b) as u8 as f64 - self.base[a * n + b] * self.multipliers[b].re);
        let cols: Vec<usize> = (0..n).filter(|&a| self.interval[a] == j).collect();
        let rhs = DMatrix::<f64>::from_fn(n, cols.len(), |a, c| self.base[a * n + cols[c]]);
        let sol = mat
            .lu()
            .solve(&rhs)
            .ok_or(Error::Singular("I - M in dlog_det_ds"))?;
        Ok(cols.iter().enumerate().map(|(c, &a)| sol[(a, c)]).sum())
    }

    /// Determinant for a given `s⃗` without cloning the kernel matrix.
    pub fn det_at(&self, s: &[Complex64]) -> Result<DetValue> {
        if s.len() != self.k {
            return Err(Error::Validation(format!("expected {} multipliers, got {}", self.k, s.len())));
        }
        let c: Vec<Complex64> = self.interval.iter().map(|&j| Complex64::new(1.0, 0.0) - s[j]).collect();
        det_i_minus(&self.base, &c)
    }
}

/// Intervals `(a, b)` with `b > GEOMETRIC_RATIO · a` are discretised in
/// `log u` rather than `u`.
pub const GEOMETRIC_RATIO: f64 = 8.0;

/// Builds the operator for interval endpoints `x_1 < … < x_k` with kernel
/// `kernel`, `m` nodes per interval and multipliers `1 − s_j`.
///
/// `alpha` is the endpoint exponent of the kernel at the origin; it selects
/// the Gauss–Jacobi rule of the first interval.
pub fn discretize_intervals<K: Kernel + ?Sized>(
    kernel: &K,
    alpha: f64,
    endpoints: &[f64],
    s: &[Complex64],
    m: usize,
) -> Result<DiscretizedOperator> {
    if m < 2 {
        return Err(Error::Validation(format!("need m >= 2 nodes per interval, got {m}")));
    }
    validate_r(endpoints)?;
    if s.len() != endpoints.len() {
        return Err(Error::Validation("one multiplier per interval required".into()));
    }
    let k = endpoints.len();
    validate_alpha(alpha)?;
    let rule_first = gauss_jacobi_unit(m, alpha)?;
    let rule = gauss_legendre(m)?;
    let mut nodes = Vec::with_capacity(k * m);
    let mut weights = Vec::with_capacity(nodes.capacity());
    let mut interval = Vec::with_capacity(nodes.capacity());
    let x1 = endpoints[0];
    for (&t, &w) in rule_first.nodes.iter().zip(&rule_first.weights) {
        // ∫_0^{x_1} f(u) du = x_1 ∫_0^1 t^α [t^{−α} f(x_1 t)] dt.
        nodes.push(x1 * t);
        weights.push(x1 * w * t.powf(-alpha));
        interval.push(0);
    }
    for j in 1..k {
        let (a, b) = (endpoints[j - 1], endpoints[j]);
        if b > GEOMETRIC_RATIO * a {
            // u = a (b/a)^t: the branch point at the origin moves to t = −∞.
            let span = (b / a).ln();
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let u = a * (span * 0.5 * (t + 1.0)).exp();
                nodes.push(u);
                weights.push(0.5 * w * span * u);
            }
        } else {
            let r = rule.mapped(a, b);
            nodes.extend_from_slice(&r.nodes);
            weights.extend_from_slice(&r.weights);
        }
        interval.extend(std::iter::repeat(j).take(m));
    }
    let n = nodes.len();
    let mut base = kernel.matrix(&nodes);
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    for a in 0..n {
        for b in 0..n {
            base[a * n + b] *= sw[a] * sw[b];
        }
    }
    let multipliers = interval.iter().map(|&j| Complex64::new(1.0, 0.0) - s[j]).collect();
    Ok(DiscretizedOperator {
        nodes,
        weights,
        interval,
        multipliers,
        k,
        m,
        base,
    })
}

/// Operator for a [`ParameterSet`] with the Bessel kernel of order `α`.
pub fn discretize(params: &ParameterSet, kernel: &BesselKernelSpec, m: usize) -> Result<DiscretizedOperator> {
    params.validate()?;
    let s: Vec<Complex64> = params.s.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    discretize_intervals(kernel, params.alpha, &params.endpoints(), &s, m)
}

/// A determinant together with its logarithmic magnitude and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetValue {
    /// Real part of the determinant.
    pub re: f64,
    /// Imaginary part of the determinant.
    pub im: f64,
    /// `ln |det|` (finite even when `det` underflows).
    pub log_abs: f64,
    /// `arg det` in `(−π, π]`.
    pub arg: f64,
}

impl DetValue {
    /// The determinant as a complex number.
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `det(I − M)` by partial-pivoting LU.
pub fn fredholm_det(op: &DiscretizedOperator) -> Result<DetValue> {
    det_i_minus(&op.base, &op.multipliers)
}

fn det_i_minus(base: &[f64], c: &[Complex64]) -> Result<DetValue> {
    let n = c.len();
    if c.iter().all(|v| v.im == 0.0) {
        let mat = DMatrix::<f64>::from_fn(n, n, |a, b| (a == b) as u8 as f64 - base[a * n + b] * c[b].re);
        let lu = mat.lu();
        let sign = lu.p().determinant::<f64>();
        let u = lu.u();
        let (mut log_abs, mut neg) = (0.0, sign < 0.0);
        for i in 0..n {
            let d = u[(i, i)];
            if d == 0.0 {
                return Err(Error::Singular("Fredholm determinant (exactly singular pivot)"));
            }
            log_abs += d.abs().ln();
            neg ^= d < 0.0;
        }
        let mag = log_abs.exp();
        let re = if neg { -mag } else { mag };
        Ok(DetValue {
            re,
            im: 0.0,
            log_abs,
            arg: if neg { std::f64::consts::PI } else { 0.0 },
        })
    } else {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mat = DMatrix::<Complex64>::from_fn(n, n, |a, b| {
            (if a == b { one } else { zero }) - c[b] * base[a * n + b]
        });
        let lu = mat.lu();
        let sign = lu.p().determinant::<f64>();
        let u = lu.u();
        let mut log_abs = 0.0;
        let mut arg = if sign < 0.0 { std::f64::consts::PI } else { 0.0 };
        for i in 0..n {
            let d = u[(i, i)];
            if d == zero {
                return Err(Error::Singular("Fredholm determinant (exactly singular pivot)"));
            }
            log_abs += d.norm().ln();
            arg += d.arg();
        }
        let arg = (arg.sin()).atan2(arg.cos());
        let v = Complex64::from_polar(log_abs.exp(), arg);
        Ok(DetValue {
            re: v.re,
            im: v.im,
            log_abs,
            arg,
        })
    }
}

/// A converged Fredholm evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FredholmValue {
    /// Determinant at the final resolution.
    pub det: DetValue,
    /// Nodes per interval of the final resolution.
    pub m_final: usize,
    /// `|det_{m_final} − det_{m_final/2}|`.
    pub change: f64,
}

impl FredholmValue {
    /// Real part of `F`.
    pub fn value(&self) -> f64 {
        self.det.re
    }
}

/// Maximum number of doublings of `m` in [`generating_fn`].
pub const MAX_DOUBLINGS: usize = 5;

/// `F(x⃗, s⃗)` for arbitrary kernel, endpoints and (complex) multipliers, with
/// `m` doubled until consecutive determinants differ by less than `tol`.
pub fn generating_fn_general<K: Kernel + ?Sized>(
    kernel: &K,
    alpha: f64,
    endpoints: &[f64],
    s: &[Complex64],
    m0: usize,
    tol: f64,
) -> Result<FredholmValue> {
    let mut m = m0.max(2);
    let mut prev = fredholm_det(&discretize_intervals(kernel, alpha, endpoints, s, m)?)?;
    for _ in 0..MAX_DOUBLINGS {
        m *= 2;
        let cur = fredholm_det(&discretize_intervals(kernel, alpha, endpoints, s, m)?)?;
        let change = (cur.value() - prev.value()).norm();
        if change < tol {
            return Ok(FredholmValue {
                det: cur,
                m_final: m,
                change,
            });
        }
        prev = cur;
    }
    let d = discretize_intervals(kernel, alpha, endpoints, s, m / 2)?;
    let last = fredholm_det(&d)?;
    Err(Error::NonConvergence {
        what: "Fredholm determinant under node doubling",
        last: (last.re, prev.re),
        iterations: MAX_DOUBLINGS,
    })
}

/// `F(r⃗x, s⃗)` by the Fredholm determinant of the Bessel kernel.
pub fn generating_fn(params: &ParameterSet, m0: usize, tol: f64) -> Result<FredholmValue> {
    params.validate()?;
    let kernel = BesselKernelSpec::new(params.alpha)?;
    let s: Vec<Complex64> = params.s.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    generating_fn_general(&kernel, params.alpha, &params.endpoints(), &s, m0, tol)
}

/// `F(x⃗, s⃗)` for the Bessel kernel at explicit endpoints and complex `s⃗`,
/// without the admissibility gate (any `s_j` allowed).
pub fn bessel_genfn(alpha: f64, endpoints: &[f64], s: &[Complex64], m0: usize, tol: f64) -> Result<FredholmValue> {
    validate_alpha(alpha)?;
    let kernel = BesselKernelSpec::new(alpha)?;
    generating_fn_general(&kernel, alpha, endpoints, s, m0, tol)
}

/// Smallest `m` (by doubling from `m0`) at which the determinant at the probe
/// multipliers `s_probe` is converged to `tol`; returns the operator at that
/// resolution (with the probe multipliers) for reuse across other `s⃗`.
pub fn converged_operator<K: Kernel + ?Sized>(
    kernel: &K,
    alpha: f64,
    endpoints: &[f64],
    s_probe: &[Complex64],
    m0: usize,
    tol: f64,
) -> Result<DiscretizedOperator> {
    let v = generating_fn_general(kernel, alpha, endpoints, s_probe, m0, tol)?;
    discretize_intervals(kernel, alpha, endpoints, s_probe, v.m_final)
}
