//! Independent scalar reference for `k = 1`: the Tracy–Widom Painlevé V
//!
//! ```text
//! ξq(1−q²)(ξqq′)′ + ξ(1−q²)²((ξq′)′ + q/4) + ξ²q(qq′)² = α²q/4,
//! q(ξ) ~ √(1−s) J_α(√ξ),   F(x, s) = exp(−¼ ∫_0^x log(x/ξ) q² dξ).
//! ```
//!
//! This module integrates the display directly in `ξ`, solved for `q″`. It
//! uses `w = 1 − q²` as an extra state and computes `F` by Gauss–Legendre
//! quadrature of the dense output. It shares nothing with the coupled-system
//! code path except the ODE stepper, and serves as its reference for `k = 1`
//! and `0 ≤ s < 1`.

use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution, OdeOptions, RhsRefusal};
use crate::quad::gauss_legendre;
use crate::specfun::{bessel_j_and_prime, ln_gamma_unchecked, SpecFunConfig};

/// `q″` from the Tracy–Widom display with `1 − q²` supplied as `w`.
///
/// The coefficient of `q″` is `ξ²q²(1−q²) + ξ²(1−q²)² = ξ²(1−q²)`, so
///
/// ```text
/// q″ = [α²q/4 − ξq w (qq′ + ξq′²) − ξ w² (q′ + q/4) − ξ²q(qq′)²] / (ξ² w).
/// ```
pub fn tracy_widom_q2(alpha: f64, xi: f64, q: f64, dq: f64, w: f64) -> f64 {
    let qq = q * dq;
    (alpha * alpha * q / 4.0 - xi * q * w * (qq + xi * dq * dq) - xi * w * w * (dq + q / 4.0) - xi * xi * q * qq * qq)
        / (xi * xi * w)
}

/// Trajectory of the scalar equation.
#[derive(Debug, Clone)]
pub struct ScalarTrajectory {
    /// Bessel order.
    pub alpha: f64,
    /// Thinning parameter `s`.
    pub s: f64,
    /// Starting abscissa.
    pub eps: f64,
    /// Right end.
    pub x_max: f64,
    sol: DenseSolution,
}

impl ScalarTrajectory {
    /// `(q, q′, 1 − q²)` at `ξ ∈ [ε, x_max]`.
    pub fn state_at(&self, xi: f64) -> Result<(f64, f64, f64)> {
        let y = self.sol.eval(xi.clamp(self.eps, self.x_max))?;
        Ok((y[0], y[1], y[2]))
    }

    /// `q²(ξ)`.
    pub fn q_squared(&self, xi: f64) -> Result<f64> {
        let (q, _, _) = self.state_at(xi)?;
        Ok(q * q)
    }

    /// `F(x, s)` by quadrature of `log(x/ξ) q²` over `(ε, x)` on the
    /// accepted mesh, plus the `(0, ε)` head from `q² ≈ (1−s)(ξ/4)^α/Γ(α+1)²`.
    pub fn genfn(&self, x: f64) -> Result<f64> {
        if !(x > self.eps && x <= self.x_max) {
            return Err(Error::domain("ScalarTrajectory::genfn", format!("x = {x} outside ({}, {}]", self.eps, self.x_max)));
        }
        let rule = gauss_legendre(12)?;
        let a1 = self.alpha + 1.0;
        let c = (1.0 - self.s) * (self.alpha * 0.25f64.ln() - 2.0 * ln_gamma_unchecked(a1)).exp();
        // ∫_0^ε c ξ^α log(x/ξ) dξ
        let mut total = c * self.eps.powf(a1) * ((x / self.eps).ln() / a1 + 1.0 / (a1 * a1));
        let mut knots: Vec<f64> = self.sol.mesh().iter().copied().filter(|&t| t < x).collect();
        knots.push(x);
        for win in knots.windows(2) {
            let sub = rule.mapped(win[0], win[1]);
            for (&xi, &wt) in sub.nodes.iter().zip(&sub.weights) {
                total += wt * (x / xi).ln() * self.q_squared(xi)?;
            }
        }
        Ok((-0.25 * total).exp())
    }
}

/// Integrates the scalar equation from `ε` to `x_max`.
///
/// The seed is `q = √(1−s) J_α(√ε)(1 + c ε^{α+1})` with
/// `c = (1−s)/(4^{α+1} Γ(α+1) Γ(α+2) (α+1))`, the `k = 1` case of the seed
/// correction used by the coupled system.
pub fn tracy_widom_integrate(alpha: f64, s: f64, eps: f64, x_max: f64, tol: f64) -> Result<ScalarTrajectory> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Validation(format!("alpha = {alpha} must be finite and >= 0")));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Validation(format!("s = {s} must lie in [0, 1)")));
    }
    if !(eps > 0.0 && eps < x_max && x_max.is_finite()) {
        return Err(Error::Validation(format!("need 0 < eps < x_max, got eps = {eps}, x_max = {x_max}")));
    }
    let cfg = SpecFunConfig::default();
    let a1 = alpha + 1.0;
    let c = (1.0 - s) / ((a1 * 4f64.ln() + ln_gamma_unchecked(a1) + ln_gamma_unchecked(a1 + 1.0)).exp() * a1);
    let g = c * eps.powf(a1);
    let z = eps.sqrt();
    let (j, dj) = bessel_j_and_prime(&cfg, alpha, z);
    let amp = (1.0 - s).sqrt();
    let q0 = amp * j * (1.0 + g);
    let dq0 = amp * (dj * (1.0 + g) / (2.0 * z) + j * a1 * g / eps);
    // w = 1 − q² = s + (1 − s)(1 − J²(1+g)²), kept free of cancellation.
    let one_minus_j2 = if alpha == 0.0 {
        crate::specfun::one_minus_j0_squared(z)
    } else {
        1.0 - j * j
    };
    let w0 = s + (1.0 - s) * (one_minus_j2 - j * j * g * (2.0 + g));
    let rhs = move |xi: f64, y: &[f64], dy: &mut [f64]| -> std::result::Result<(), RhsRefusal> {
        if y[2] == 0.0 {
            return Err(RhsRefusal("1 - q^2 vanished".into()));
        }
        dy[0] = y[1];
        dy[1] = tracy_widom_q2(alpha, xi, y[0], y[1], y[2]);
        dy[2] = -2.0 * y[0] * y[1];
        if dy[1].is_finite() {
            Ok(())
        } else {
            Err(RhsRefusal("non-finite q''".into()))
        }
    };
    let scale = |a: &[f64], b: &[f64], sc: &mut [f64]| {
        for i in 0..3 {
            sc[i] = a[i].abs().max(b[i].abs()).max(1e-300);
        }
        let m = sc[0].max(sc[1]);
        sc[0] = m;
        sc[1] = m;
    };
    let opts = OdeOptions {
        rtol: tol,
        h_init: Some(eps * 1e-3),
        h_min: eps * 1e-12,
        max_steps: 5_000_000,
    };
    let sol = ode::integrate(rhs, scale, |_, _| None, eps, &[q0, dq0, w0], x_max, &opts)?;
    Ok(ScalarTrajectory {
        alpha,
        s,
        eps,
        x_max,
        sol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_at_alpha_zero_is_exponential() {
        let traj = tracy_widom_integrate(0.0, 0.0, 1e-4, 4.0, 1e-11).unwrap();
        for &x in &[0.5, 2.0, 4.0] {
            let f = traj.genfn(x).unwrap();
            assert!((f - (-x / 4.0f64).exp()).abs() < 1e-6, "x = {x}: {f}");
        }
    }

    #[test]
    fn acceleration_satisfies_display() {
        let (a, xi, q, dq) = (0.7, 0.9, 0.4, -0.3);
        let w = 1.0 - q * q;
        let d2 = tracy_widom_q2(a, xi, q, dq, w);
        let lhs = xi * q * w * (q * dq + xi * dq * dq + xi * q * d2)
            + xi * w * w * ((dq + xi * d2) + q / 4.0)
            + xi * xi * q * (q * dq).powi(2);
        assert!((lhs - a * a * q / 4.0).abs() < 1e-14);
    }
}
