//! First-order Lax form of the coupled Painlevé V systems
//!
//! For points `r_0 = 0 < r_1 < … < r_K` (index 0 is the origin) every
//! function `b_j(y)` of the b-form is accompanied by `a_j = −b_j′/2` and
//! `c_j`. The flow in `y` is
//!
//! ```text
//! b_j′ = −2 a_j,   a_j′ = c_j − (u − r_j) b_j,   c_j′ = 2 (u − r_j) a_j,
//! u = (Σ c_j + Σ r_j b_j) / Σ b_j.
//! ```
//!
//! Along this flow `κ_j = a_j² + b_j c_j` is conserved. Eliminating `a_j` and
//! `c_j` gives `(u − r_j) b_j² + b_j′²/4 − b_j b_j″/2 = κ_j`. The formula for
//! `u` keeps `Σ b_j = y/2` invariant, since it makes `Σ a_j′ = 0` for
//! `Σ a_j = −1/4`.
//!
//! The `q`-system corresponds to `κ = (α²/4, 0, …, 0)`. The ratio-probability
//! system of two coupled equations corresponds to `r = (0, 1, r)` and
//! `κ = (α²/4, 1, 0)`, because `κ_1 = 1` produces the extra `1/q̃_1³` term.
//!
//! Unlike the `q`-form, the Lax form is polynomial apart from the division by
//! `Σ b_j = y/2`. It has no singularity at `1 − S = 0`.
//!
//! The flow is integrated in `τ = log y`. Two accumulators are appended,
//! `J0 = ∫ Σ_j r_j b_j dy` and `J1 = ∫ Σ_j r_j b_j log y dy`. In terms of
//! them, `−¼ ∫_0^x Σ_j r_j q_j² log(x/ξ) dξ = −2 (log √x · J0 − J1)`, where
//! `q_j² = 2 b_j/y`.

use crate::error::{Error, Result};
use crate::ode::{self, DenseSolution, OdeOptions, RhsRefusal};

/// Amplitude beyond which a Lax trajectory is stopped as diverging.
pub const LAX_DIVERGENCE: f64 = 1e4;

/// Points and conserved quantities of a Lax system.
#[derive(Debug, Clone, PartialEq)]
pub struct LaxSystem {
    /// `r_0 = 0, r_1, …, r_K`.
    pub r: Vec<f64>,
    /// Conserved `κ_j = a_j² + b_j c_j`.
    pub kappa: Vec<f64>,
}

impl LaxSystem {
    /// Number of points, including the origin.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    /// `true` when there are no points.
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// State dimension `3(K+1) + 2`.
    pub fn dim(&self) -> usize {
        3 * self.len() + 2
    }

    /// Builds the state at `y` from `Q_j = q_j²`, `DQ_j` (`D = ξ d/dξ`,
    /// `ξ = y²`) for `j ≥ 1`, together with `w = 1 − Σ Q_j` supplied
    /// separately to avoid cancellation. The accumulators are set to `j0`, `j1`.
    pub fn state_from_q(&self, y: f64, q: &[f64], dq: &[f64], w: f64, j0: f64, j1: f64) -> Vec<f64> {
        let n = self.len();
        let mut st = vec![0.0; self.dim()];
        let mut p = 0.0;
        for j in 1..n {
            let b = 0.5 * y * q[j - 1];
            let a = -(0.25 * q[j - 1] + 0.5 * dq[j - 1]);
            st[j] = a;
            st[n + j] = b;
            st[2 * n + j] = (self.kappa[j] - a * a) / b;
            p += 0.5 * dq[j - 1];
        }
        let a0 = -0.25 * w + p;
        let b0 = 0.5 * y * w;
        st[0] = a0;
        st[n] = b0;
        st[2 * n] = (self.kappa[0] - a0 * a0) / b0;
        st[3 * n] = j0;
        st[3 * n + 1] = j1;
        st
    }

    /// `q_j² = 2 b_j / y` for `j ≥ 1` from a state at `y`.
    pub fn q_squared(&self, y: f64, st: &[f64]) -> Vec<f64> {
        let n = self.len();
        (1..n).map(|j| 2.0 * st[n + j] / y).collect()
    }

    /// `κ_j = a_j² + b_j c_j` of a state.
    pub fn invariants(&self, st: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|j| st[j] * st[j] + st[n + j] * st[2 * n + j]).collect()
    }

    /// `−¼ ∫_0^x Σ r_j q_j² log(x/ξ) dξ` from the accumulators at `y = √x`.
    pub fn log_weight(&self, y: f64, st: &[f64]) -> f64 {
        let n = self.len();
        -2.0 * (y.ln() * st[3 * n] - st[3 * n + 1])
    }

    /// Right-hand side in `τ = log y`.
    pub fn rhs(&self, tau: f64, st: &[f64], d: &mut [f64]) -> std::result::Result<(), RhsRefusal> {
        let n = self.len();
        let y = tau.exp();
        let (mut bs, mut cs, mut rb) = (0.0, 0.0, 0.0);
        for j in 0..n {
            bs += st[n + j];
            cs += st[2 * n + j];
            rb += self.r[j] * st[n + j];
        }
        if bs == 0.0 {
            return Err(RhsRefusal("sum of b vanished".into()));
        }
        let u = (cs + rb) / bs;
        for j in 0..n {
            let (a, b) = (st[j], st[n + j]);
            let m = u - self.r[j];
            d[j] = y * (st[2 * n + j] - m * b);
            d[n + j] = -2.0 * y * a;
            d[2 * n + j] = 2.0 * y * m * a;
        }
        d[3 * n] = y * rb;
        d[3 * n + 1] = y * rb * tau;
        if d.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(RhsRefusal("non-finite derivative".into()))
        }
    }

    /// Integrates from `τ0` to `τ1`. `stop` is consulted after each accepted
    /// step and may end the integration early (the reason is recorded in
    /// `stopped`); trajectories exceeding [`LAX_DIVERGENCE`] are stopped too.
    pub fn integrate<M>(&self, tau0: f64, y0: &[f64], tau1: f64, tol: f64, mut stop: M) -> Result<DenseSolution>
    where
        M: FnMut(f64, &[f64]) -> Option<String>,
    {
        if y0.len() != self.dim() {
            return Err(Error::Validation(format!("Lax state has length {}, expected {}", y0.len(), self.dim())));
        }
        let n = self.len();
        let scale = move |a: &[f64], b: &[f64], sc: &mut [f64]| {
            // Each (a_j, b_j, c_j) triple shares one scale; accumulators share another.
            for j in 0..n {
                let m = [a[j], b[j], a[n + j], b[n + j], a[2 * n + j], b[2 * n + j]]
                    .iter()
                    .fold(1e-300f64, |acc, v| acc.max(v.abs()));
                sc[j] = m;
                sc[n + j] = m;
                sc[2 * n + j] = m;
            }
            // Accumulators grow by about Σ|r_j b_j| per unit of y.
            let growth = (0..n).fold(0.0f64, |acc, j| acc.max(a[n + j].abs()).max(b[n + j].abs()));
            let m = a[3 * n].abs().max(b[3 * n].abs()).max(growth).max(1e-300);
            sc[3 * n] = m;
            sc[3 * n + 1] = m.max(a[3 * n + 1].abs()).max(b[3 * n + 1].abs());
        };
        let monitor = |t: f64, y: &[f64]| -> Option<String> {
            if y[..3 * n].iter().any(|v| !(v.abs() <= LAX_DIVERGENCE)) {
                return Some("diverged".into());
            }
            stop(t, y)
        };
        let opts = OdeOptions {
            rtol: tol,
            h_init: None,
            h_min: 1e-13,
            max_steps: 2_000_000,
        };
        ode::integrate(|t, y, d| self.rhs(t, y, d), scale, monitor, tau0, y0, tau1, &opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::ParameterSet;
    use crate::painleve::{integrate_with, PainleveConfig};

    #[test]
    fn lax_flow_reproduces_q_system() {
        // Start the Lax flow from a q-trajectory state and compare downstream.
        let p = ParameterSet::new(0.5, vec![1.0, 2.0], vec![0.3, 0.8], 1.0).unwrap();
        let traj = integrate_with(&p, 4.0, &PainleveConfig { eps: None, tol: 1e-12 }).unwrap();
        let sys = LaxSystem {
            r: vec![0.0, 1.0, 2.0],
            kappa: vec![0.25 * 0.25, 0.0, 0.0],
        };
        let xi0 = 0.5;
        let (rho, d, w) = traj.d_state_at(xi0).unwrap();
        let q: Vec<f64> = (0..2).map(|j| traj.sigma[j] * rho[j] * rho[j]).collect();
        let dq: Vec<f64> = (0..2).map(|j| 2.0 * traj.sigma[j] * rho[j] * d[j]).collect();
        let y0 = xi0.sqrt();
        let st = sys.state_from_q(y0, &q, &dq, w, 0.0, 0.0);
        let sol = sys.integrate(y0.ln(), &st, 2.0f64.ln(), 1e-12, |_, _| None).unwrap();
        let end = sol.last_state();
        let q_lax = sys.q_squared(2.0, end);
        let q_ref = traj.q_squared(4.0).unwrap();
        for j in 0..2 {
            assert!((q_lax[j] - q_ref[j]).abs() < 1e-8, "{j}: {} vs {}", q_lax[j], q_ref[j]);
        }
        let kap = sys.invariants(end);
        assert!((kap[0] - 0.0625).abs() < 1e-8 && kap[1].abs() < 1e-8 && kap[2].abs() < 1e-8, "{kap:?}");
        let bsum: f64 = (0..3).map(|j| end[3 + j]).sum();
        assert!((bsum - 1.0).abs() < 1e-10);
    }
}
