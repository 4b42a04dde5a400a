//! Correlation kernels: the hard-edge Bessel kernel and the finite-`n`
//! Laguerre Unitary Ensemble kernel.
//!
//! # Bessel kernel
//!
//! With `A(x) = J_α(√x)` and `B(x) = √x J_α′(√x) = 2x A′(x)` the kernel is
//!
//! ```text
//! K(x, y) = [A(x) B(y) − B(x) A(y)] / (2 (x − y)).
//! ```
//!
//! `A` solves `x A″ + A′ + f A = 0` with `f(x) = (1 − α²/x)/4`, hence
//! `B′ = −2 f A`. Writing `x = m + d`, `y = m − d`, the numerator is odd in
//! `d`; its Taylor expansion gives
//!
//! ```text
//! K = ½(A′B − AB′) + d²/4 · [⅓(A‴B − AB‴) − A″B′ + A′B″] + O(d⁴)
//! ```
//!
//! with every derivative evaluated at the midpoint `m` and eliminated through
//! the ODE. On the diagonal this reduces to
//! `K(x,x) = ¼ (J_α′(√x)² + (1 − α²/x) J_α(√x)²)`.
//! The expansion is used when `|x − y| < 10⁻⁴ · max(x, y)`, where the direct
//! formula would lose roughly half its digits to cancellation. The band is
//! relative (not floored at 1) because near the origin the expansion
//! parameter is `d/m`, not `d`.
//!
//! # LUE kernel
//!
//! `K_n(λ, ν) = √(w(λ) w(ν)) Σ_{j<n} p_j(λ) p_j(ν)` with `w(x) = x^α e^{−x}`,
//! evaluated by the Christoffel–Darboux formula off the diagonal, by its
//! derivative form on the diagonal and by the plain sum in the narrow band
//! where the difference quotient is ill-conditioned.

use crate::error::{Error, Result};
use crate::specfun::{bessel_j_and_prime, laguerre_orthonormal_scaled, ln_gamma_unchecked, SpecFunConfig};

/// A symmetric integral kernel on `(0, ∞)`.
pub trait Kernel: Sync {
    /// `K(x, y)`; arguments are assumed positive.
    fn eval(&self, x: f64, y: f64) -> f64;

    /// Dense matrix `K(u_a, u_b)` over the given nodes.
    fn matrix(&self, nodes: &[f64]) -> Vec<f64> {
        let n = nodes.len();
        let mut out = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let v = self.eval(nodes[a], nodes[b]);
                out[a * n + b] = v;
                out[b * n + a] = v;
            }
        }
        out
    }
}

/// Parameters of the Bessel kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselKernelSpec {
    /// Order `α > −1`.
    pub alpha: f64,
    /// Relative width of the near-diagonal band: the expansion about the
    /// midpoint is used when `|x − y| < diag_threshold · max(x, y)`.
    pub diag_threshold: f64,
}

impl BesselKernelSpec {
    /// Kernel of order `alpha` with the default diagonal band `10⁻⁴`.
    pub fn new(alpha: f64) -> Result<Self> {
        let spec = Self {
            alpha,
            diag_threshold: 1e-4,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks `α > −1` and `diag_threshold > 0`.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > -1.0) || !self.alpha.is_finite() {
            return Err(Error::Validation(format!("alpha = {} must exceed -1", self.alpha)));
        }
        if !(self.diag_threshold > 0.0) {
            return Err(Error::Validation("diag_threshold must be positive".into()));
        }
        Ok(())
    }

    /// `(A, A′)` at `x`, where `A(x) = J_α(√x)`.
    fn a_pair(&self, x: f64) -> (f64, f64) {
        let z = x.sqrt();
        let (j, dj) = bessel_j_and_prime(&SpecFunConfig::default(), self.alpha, z);
        (j, dj / (2.0 * z))
    }

    /// Kernel value without argument checks (`x, y > 0`).
    pub fn eval_unchecked(&self, x: f64, y: f64) -> f64 {
        let band = self.diag_threshold * x.max(y);
        if (x - y).abs() < band {
            return self.near_diagonal(0.5 * (x + y), 0.5 * (x - y));
        }
        self.difference_quotient(x, y)
    }

    fn difference_quotient(&self, x: f64, y: f64) -> f64 {
        let (ax, dax) = self.a_pair(x);
        let (ay, day) = self.a_pair(y);
        let bx = 2.0 * x * dax;
        let by = 2.0 * y * day;
        (ax * by - bx * ay) / (2.0 * (x - y))
    }

    fn near_diagonal(&self, m: f64, d: f64) -> f64 {
        let a2 = self.alpha * self.alpha;
        let (a, a1) = self.a_pair(m);
        let f = 0.25 * (1.0 - a2 / m);
        let f1 = 0.25 * a2 / (m * m);
        let f2 = -0.5 * a2 / (m * m * m);
        let a_2 = -(a1 + f * a) / m;
        let a_3 = (a1 + f * a) / (m * m) - (a_2 + f1 * a + f * a1) / m;
        let b = 2.0 * m * a1;
        let b1 = -2.0 * f * a;
        let b2 = -2.0 * f1 * a - 2.0 * f * a1;
        let b3 = -2.0 * f2 * a - 4.0 * f1 * a1 - 2.0 * f * a_2;
        let k0 = 0.5 * (a1 * b - a * b1);
        if d == 0.0 {
            return k0;
        }
        let c3 = (a_3 * b - a * b3) / 3.0 - a_2 * b1 + a1 * b2;
        k0 + 0.25 * d * d * c3
    }
}

impl Kernel for BesselKernelSpec {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_unchecked(x, y)
    }
}

/// `K^Be(x, y)` with argument checks.
pub fn bessel_kernel(spec: &BesselKernelSpec, x: f64, y: f64) -> Result<f64> {
    spec.validate()?;
    if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::domain("bessel_kernel", format!("arguments ({x}, {y}) must be positive")));
    }
    Ok(spec.eval_unchecked(x, y))
}

/// Finite-`n` Laguerre Unitary Ensemble with weight `x^α e^{−x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LueModel {
    /// Matrix size.
    pub n: usize,
    /// Weight exponent `α > −1`.
    pub alpha: f64,
    /// Off-diagonal recurrence coefficients `a_j = √(j(j+α))`, `j = 1..=n`.
    pub a: Vec<f64>,
    /// Diagonal recurrence coefficients `b_j = 2j + α + 1`, `j = 0..n`.
    pub b: Vec<f64>,
    /// `Σ_{j<n} [ln j! + ln Γ(j+α+1)]`, the log of the Hankel determinant of
    /// the unperturbed weight.
    pub log_partition: f64,
}

impl LueModel {
    /// Builds the model for matrix size `n ≥ 1` and `α > −1`.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("LUE size n must be at least 1".into()));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Validation(format!("alpha = {alpha} must exceed -1")));
        }
        let a = (1..=n).map(|j| ((j as f64) * (j as f64 + alpha)).sqrt()).collect();
        let b = (0..n).map(|j| 2.0 * j as f64 + alpha + 1.0).collect();
        let log_partition = (0..n)
            .map(|j| ln_gamma_unchecked(j as f64 + 1.0) + ln_gamma_unchecked(j as f64 + alpha + 1.0))
            .sum();
        Ok(Self {
            n,
            alpha,
            a,
            b,
            log_partition,
        })
    }

    /// Polynomial data at one point: scaled `p_0..p_n`, the derivatives of
    /// `p_{n−1}, p_n` (same scaling) and the total log-scale including
    /// `½ ln w(x)`.
    fn point_data(&self, x: f64) -> PointData {
        let (p, s) = laguerre_orthonormal_scaled(self.n + 1, self.alpha, x);
        // Differentiated recurrence: a_{j+1} p′_{j+1} = (x − b_j) p′_j + p_j − a_j p′_{j−1}.
        let mut dp_prev = 0.0;
        let mut dp = 0.0;
        for j in 0..self.n {
            let aj = if j == 0 { 0.0 } else { self.a[j - 1] };
            let next = ((x - self.b[j]) * dp + p[j] - aj * dp_prev) / self.a[j];
            dp_prev = dp;
            dp = next;
        }
        PointData {
            log_scale: s + 0.5 * (self.alpha * x.ln() - x),
            pn: p[self.n],
            pn1: p[self.n - 1],
            dpn: dp,
            dpn1: dp_prev,
            p,
        }
    }

    fn kernel_from(&self, x: f64, px: &PointData, y: f64, py: &PointData) -> f64 {
        let an = self.a[self.n - 1];
        let scale = (px.log_scale + py.log_scale).exp();
        let band = 1e-4 * x.max(y).max(1.0);
        let sum = if x == y {
            an * (px.dpn * px.pn1 - px.dpn1 * px.pn)
        } else if (x - y).abs() < band {
            px.p[..self.n].iter().zip(&py.p[..self.n]).map(|(a, b)| a * b).sum()
        } else {
            an * (px.pn * py.pn1 - px.pn1 * py.pn) / (x - y)
        };
        sum * scale
    }
}

struct PointData {
    log_scale: f64,
    p: Vec<f64>,
    pn: f64,
    pn1: f64,
    dpn: f64,
    dpn1: f64,
}

impl Kernel for LueModel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let px = self.point_data(x);
        let py = if x == y { None } else { Some(self.point_data(y)) };
        self.kernel_from(x, &px, y, py.as_ref().unwrap_or(&px))
    }

    fn matrix(&self, nodes: &[f64]) -> Vec<f64> {
        let data: Vec<PointData> = nodes.iter().map(|&x| self.point_data(x)).collect();
        let n = nodes.len();
        let mut out = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let v = self.kernel_from(nodes[a], &data[a], nodes[b], &data[b]);
                out[a * n + b] = v;
                out[b * n + a] = v;
            }
        }
        out
    }
}

/// `K_n^{LUE}(λ, ν)` with argument checks.
pub fn lue_kernel(model: &LueModel, lam: f64, nu: f64) -> Result<f64> {
    if !(lam > 0.0 && nu > 0.0) || !lam.is_finite() || !nu.is_finite() {
        return Err(Error::domain("lue_kernel", format!("arguments ({lam}, {nu}) must be positive")));
    }
    Ok(model.eval(lam, nu))
}
