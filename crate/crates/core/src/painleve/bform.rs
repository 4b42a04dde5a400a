//! The Lax-pair (b-form) view of a trajectory
//!
//! In the scale `y = √ξ` the functions
//!
//! ```text
//! b_j(y) = (y/2) q_j²(y²),  j = 1..k,       b_0(y) = y/2 − Σ_{j≥1} b_j(y)
//! ```
//!
//! satisfy three relations:
//!
//! ```text
//! Σ_{j=0}^k b_j = y/2,
//! (u − r_j) b_j² + b_j′²/4 − b_j b_j″/2 = 0,   j = 1..k,
//! u b_0² + b_0′²/4 − b_0 b_0″/2 = α²/4,
//! ```
//!
//! where primes are `d/dy`. The `q`-system was obtained by eliminating `u`
//! and `b_0`. Recovering `u` from the last relation and substituting it into
//! the `j`-relations is therefore an independent algebraic check of that
//! elimination.
//!
//! Derivatives come from the trajectory in the `D = ξ d/dξ` form. With
//! `Q = σρ²` we have `d/dy = (2/y) D`, and so
//! `b = (y/2) Q`, `b′ = Q/2 + DQ` and `b″ = (2/y)(DQ/2 + D²Q)`.
//! `b_0` and its derivatives follow from the sum rule.

use super::PainleveTrajectory;
use crate::error::Result;
use serde::Serialize;

/// Smallest `|b_0|` for which `u` is reported.
pub const B0_FLOOR: f64 = 1e-12;

/// The b-form quantities at one abscissa `ξ = y²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BFormPoint {
    /// `ξ = y²`.
    pub xi: f64,
    /// `y = √ξ`.
    pub y: f64,
    /// `b_0, …, b_k`.
    pub b: Vec<f64>,
    /// `b_0′, …, b_k′` (`d/dy`).
    pub db: Vec<f64>,
    /// `b_0″, …, b_k″`.
    pub d2b: Vec<f64>,
    /// `u` recovered from the `α`-relation, `None` when `|b_0| < B0_FLOOR`.
    pub u: Option<f64>,
    /// `Σ_{j=0}^k b_j − y/2`.
    pub sum_residual: f64,
    /// Residuals of the `k` relations `(u − r_j)b_j² + b_j′²/4 − b_j b_j″/2`,
    /// `None` when `u` is unavailable.
    pub j_residuals: Option<Vec<f64>>,
}

/// The b-form of a trajectory sampled on a set of abscissae.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BFormView {
    /// Bessel order.
    pub alpha: f64,
    /// `r_1 < … < r_k`.
    pub r: Vec<f64>,
    /// Samples.
    pub points: Vec<BFormPoint>,
}

impl BFormView {
    /// Largest `|Σ b_j − y/2|` over the samples.
    pub fn max_sum_residual(&self) -> f64 {
        self.points.iter().map(|p| p.sum_residual.abs()).fold(0.0, f64::max)
    }

    /// Largest `j`-relation residual over the samples where `u` is available.
    pub fn max_j_residual(&self) -> f64 {
        self.points
            .iter()
            .filter_map(|p| p.j_residuals.as_ref())
            .flat_map(|r| r.iter().map(|v| v.abs()))
            .fold(0.0, f64::max)
    }

    /// Number of samples at which `u` was unavailable.
    pub fn unavailable(&self) -> usize {
        self.points.iter().filter(|p| p.u.is_none()).count()
    }
}

/// b-form quantities at `ξ`.
pub fn bform_point(traj: &PainleveTrajectory, xi: f64) -> Result<BFormPoint> {
    let (rho, d, _) = traj.d_state_at(xi)?;
    let d2 = traj.d2_at(xi)?;
    let k = traj.k();
    let y = xi.sqrt();
    let mut b = vec![0.0; k + 1];
    let mut db = vec![0.0; k + 1];
    let mut d2b = vec![0.0; k + 1];
    for j in 0..k {
        let s = traj.sigma[j];
        let q = s * rho[j] * rho[j];
        let dq = 2.0 * s * rho[j] * d[j];
        let d2q = 2.0 * s * (d[j] * d[j] + rho[j] * d2[j]);
        b[j + 1] = 0.5 * y * q;
        db[j + 1] = 0.5 * q + dq;
        d2b[j + 1] = (2.0 / y) * (0.5 * dq + d2q);
    }
    b[0] = 0.5 * y - b[1..].iter().sum::<f64>();
    db[0] = 0.5 - db[1..].iter().sum::<f64>();
    d2b[0] = -d2b[1..].iter().sum::<f64>();
    let sum_residual = b.iter().sum::<f64>() - 0.5 * y;
    let a2 = 0.25 * traj.alpha * traj.alpha;
    let u = if b[0].abs() >= B0_FLOOR {
        Some((a2 - 0.25 * db[0] * db[0] + 0.5 * b[0] * d2b[0]) / (b[0] * b[0]))
    } else {
        None
    };
    let j_residuals = u.map(|u| {
        (1..=k)
            .map(|j| (u - traj.r[j - 1]) * b[j] * b[j] + 0.25 * db[j] * db[j] - 0.5 * b[j] * d2b[j])
            .collect()
    });
    Ok(BFormPoint {
        xi,
        y,
        b,
        db,
        d2b,
        u,
        sum_residual,
        j_residuals,
    })
}

/// b-form view on the given abscissae.
pub fn bform(traj: &PainleveTrajectory, xis: &[f64]) -> Result<BFormView> {
    Ok(BFormView {
        alpha: traj.alpha,
        r: traj.r.clone(),
        points: xis.iter().map(|&xi| bform_point(traj, xi)).collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::ParameterSet;
    use crate::painleve::{integrate_with, PainleveConfig};

    #[test]
    fn relations_hold_along_trajectory() {
        let p = ParameterSet::new(0.5, vec![1.0, 2.0, 3.5], vec![0.2, 0.7, 0.4], 1.0).unwrap();
        let traj = integrate_with(&p, 4.0, &PainleveConfig::default()).unwrap();
        let xis: Vec<f64> = (0..40).map(|i| 0.1 + 3.9 * i as f64 / 39.0).collect();
        let view = bform(&traj, &xis).unwrap();
        assert!(view.max_sum_residual() < 1e-14, "{}", view.max_sum_residual());
        assert_eq!(view.unavailable(), 0);
        assert!(view.max_j_residual() < 1e-6, "{}", view.max_j_residual());
    }

    #[test]
    fn small_argument_matches_bessel_form() {
        let p = ParameterSet::new(0.0, vec![1.0, 2.0], vec![0.3, 0.7], 1.0).unwrap();
        let traj = integrate_with(&p, 1.0, &PainleveConfig::default()).unwrap();
        let xi = 1e-3;
        let pt = bform_point(&traj, xi).unwrap();
        let jumps = p.jumps();
        for j in 0..2 {
            let jb = crate::specfun::bessel_j(0.0, (p.r[j] * xi).sqrt()).unwrap();
            let lead = 0.5 * xi.sqrt() * jumps[j] * jb * jb;
            assert!((pt.b[j + 1] - lead).abs() < 10.0 * xi.powf(1.5), "{j}");
        }
    }
}
