//! Gaussian quadrature rules.

use crate::error::{Error, Result};
use crate::specfun::ln_gamma_unchecked;
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// A quadrature rule: nodes and matching weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    /// Abscissae, in increasing order.
    pub nodes: Vec<f64>,
    /// Weights, one per node.
    pub weights: Vec<f64>,
}

impl Rule {
    /// `Σ w_i f(x_i)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// The rule affinely mapped from `[−1, 1]` onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> Rule {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        Rule {
            nodes: self.nodes.iter().map(|&t| c + h * t).collect(),
            weights: self.weights.iter().map(|&w| w * h).collect(),
        }
    }
}

/// `m`-point Gauss–Legendre rule on `[−1, 1]`.
///
/// Nodes are found by Newton iteration on the three-term recurrence from
/// Tricomi-type initial guesses; exact for polynomials of degree `2m − 1`.
pub fn gauss_legendre(m: usize) -> Result<Rule> {
    if m == 0 {
        return Err(Error::domain("gauss_legendre", "need at least one node"));
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    Ok(Rule { nodes, weights })
}

fn legendre_and_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for n in 2..=m {
        let nf = n as f64;
        let p2 = ((2.0 * nf - 1.0) * x * p1 - (nf - 1.0) * p0) / nf;
        p0 = p1;
        p1 = p2;
    }
    let p = if m == 0 { 1.0 } else { p1 };
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// `n`-point generalised Gauss–Laguerre rule for the weight `x^α e^{−x}` on
/// `(0, ∞)` by the Golub–Welsch eigenvalue method.
pub fn gauss_laguerre(n: usize, alpha: f64) -> Result<Rule> {
    if n == 0 {
        return Err(Error::domain("gauss_laguerre", "need at least one node"));
    }
    if !(alpha > -1.0) {
        return Err(Error::domain("gauss_laguerre", format!("alpha {alpha} must exceed -1")));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let fi = i as f64;
        jac[(i, i)] = 2.0 * fi + alpha + 1.0;
        if i + 1 < n {
            let b = ((fi + 1.0) * (fi + 1.0 + alpha)).sqrt();
            jac[(i, i + 1)] = b;
            jac[(i + 1, i)] = b;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mu0 = ln_gamma_unchecked(alpha + 1.0).exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// `m`-point Gauss–Jacobi rule for the weight `t^α` on `(0, 1)`, by the
/// Golub–Welsch method applied to the Jacobi family `P^{(0, α)}` on `[−1, 1]`.
///
/// A function of the form `t^α g(t)` with `g` smooth is integrated with the
/// spectral accuracy of `g`, independently of the endpoint power.
pub fn gauss_jacobi_unit(m: usize, alpha: f64) -> Result<Rule> {
    if m == 0 {
        return Err(Error::domain("gauss_jacobi_unit", "need at least one node"));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::domain("gauss_jacobi_unit", format!("alpha {alpha} must exceed -1")));
    }
    let (a, b) = (0.0, alpha);
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let n = i as f64;
        let s = 2.0 * n + a + b;
        jac[(i, i)] = if i == 0 { (b - a) / (a + b + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        if i + 1 < m {
            let n1 = n + 1.0;
            let s1 = 2.0 * n1 + a + b;
            let off = (4.0 * n1 * (n1 + a) * (n1 + b) * (n1 + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0))).sqrt();
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    // ∫_0^1 t^α dt = 1/(α+1); the map t = (1+x)/2 only rescales the weights.
    let mu0 = 1.0 / (alpha + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (1.0 + eig.eigenvalues[i]), mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for m in [1, 2, 5, 16, 40, 81] {
            let r = gauss_legendre(m).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * m - 1;
            let got = r.integrate(|x| x.powi(deg as i32 - 1));
            let want = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn mapped_rule_weights_sum_to_length() {
        let r = gauss_legendre(20).unwrap().mapped(1.5, 4.0);
        assert!((r.weights.iter().sum::<f64>() - 2.5).abs() < 1e-14);
        assert!(r.integrate(f64::exp) - (4.0f64.exp() - 1.5f64.exp()) < 1e-12);
    }

    #[test]
    fn laguerre_moments() {
        let r = gauss_laguerre(30, 0.5).unwrap();
        // ∫ x^{0.5} e^{-x} x^3 dx = Γ(4.5)
        let want = ln_gamma_unchecked(4.5).exp();
        assert!((r.integrate(|x| x.powi(3)) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn jacobi_moments() {
        for &alpha in &[-0.6, 0.0, 0.05, 0.5, 2.0] {
            let r = gauss_jacobi_unit(12, alpha).unwrap();
            for k in 0..24 {
                let want = 1.0 / (alpha + k as f64 + 1.0);
                let got = r.integrate(|t| t.powi(k));
                assert!((got - want).abs() < 1e-14, "alpha={alpha} k={k}: {got} vs {want}");
            }
            assert!(r.nodes.iter().all(|&t| t > 0.0 && t < 1.0));
        }
    }
}
