//! Finite-`n` Laguerre Unitary Ensemble cross-checks
//!
//! LUE(n, α) is the law on `(0, ∞)ⁿ` with density proportional to
//! `Π_{i<j}(λ_i − λ_j)² Π_i λ_i^α e^{−λ_i}`. Its jump-weight generating function
//!
//! ```text
//! F_n(λ⃗, s⃗) = E Π_j s_j^{#{eigenvalues in (λ_{j−1}, λ_j)}}
//! ```
//!
//! has two exact representations, which this module evaluates independently:
//!
//! * the Fredholm determinant of the finite-`n` kernel ([`lue_genfn`]);
//! * the ratio of Hankel determinants of the perturbed and unperturbed
//!   weights ([`hankel_ratio`]).
//!
//! Under the hard-edge scaling `λ⃗ = x⃗/(4n)`, `F_n` converges to the Bessel
//! generating function `F(x⃗, s⃗)`. [`sample_spectrum`] draws spectra for Monte
//! Carlo validation.
//!
//! # Hankel ratio by congruence
//!
//! A Hankel moment matrix `H = [μ_{i+l}]` of size 12 has a condition number
//! beyond `10¹⁵`, so its determinant cannot be taken directly. Let `C` be the
//! lower-triangular coefficient matrix of the orthonormal Laguerre
//! polynomials, `p_i(x) = Σ_m C_{im} x^m`. Then `C H₀ Cᵀ = I` for the
//! unperturbed weight, and for the perturbed weight
//!
//! ```text
//! det H / det H₀ = det G,   G = I − Σ_j (1 − s_j) C D_j Cᵀ,
//! ```
//!
//! where `D_j` is the Hankel matrix of the moments of `w` restricted to
//! `(λ_{j−1}, λ_j)`. Those moments are lower incomplete gamma functions. `G`
//! is an `O(1)` matrix, and the identity part is exact. Only the perturbation
//! is assembled from moments, and it is small whenever the `λ_j` are small.

use crate::error::{Error, Result};
use crate::fredholm::{generating_fn_general, validate_r, FredholmValue};
use crate::kernels::LueModel;
use crate::specfun::{ln_gamma_unchecked, reg_lower_gamma};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

/// Largest `n` accepted by [`hankel_ratio`].
pub const HANKEL_MAX_N: usize = 12;

/// Interval moments of the weight `x^α e^{−x}` in log-scaled form.
///
/// `log_gamma[m] = ln Γ(α + m + 1)` for `m = 0..2n−1`. `fraction[j][m]` is
/// the share of that moment carried by the `j`-th interval
/// `(λ_{j−1}, λ_j)`, namely `P(α+m+1, λ_j) − P(α+m+1, λ_{j−1})`. The full
/// moments of the perturbed weight are
/// `μ_m = Γ(α+m+1) [1 − Σ_j (1 − s_j) fraction[j][m]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpWeightMoments {
    /// Matrix size `n`.
    pub n: usize,
    /// Weight exponent.
    pub alpha: f64,
    /// Interval endpoints `λ_1 < … < λ_k` (`λ_0 = 0`).
    pub lambdas: Vec<f64>,
    /// Multipliers `s_1, …, s_k`.
    pub s: Vec<f64>,
    /// `ln Γ(α + m + 1)`, `m = 0..2n−1`.
    pub log_gamma: Vec<f64>,
    /// Interval shares of each moment, indexed `[j][m]`.
    pub fraction: Vec<Vec<f64>>,
}

impl JumpWeightMoments {
    /// Assembles the moments for `n ≥ 1`, `α > −1`, increasing positive `λ⃗`
    /// and one multiplier per interval.
    pub fn new(n: usize, alpha: f64, lambdas: &[f64], s: &[f64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("LUE size n must be at least 1".into()));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Validation(format!("alpha = {alpha} must exceed -1")));
        }
        validate_r(lambdas)?;
        if s.len() != lambdas.len() {
            return Err(Error::Validation("one multiplier per interval required".into()));
        }
        let orders = 2 * n - 1;
        let log_gamma = (0..orders).map(|m| ln_gamma_unchecked(alpha + m as f64 + 1.0)).collect();
        let mut fraction = Vec::with_capacity(lambdas.len());
        let mut lower = vec![0.0; orders];
        for &lam in lambdas {
            let upper = (0..orders)
                .map(|m| reg_lower_gamma(alpha + m as f64 + 1.0, lam))
                .collect::<Result<Vec<_>>>()?;
            fraction.push(upper.iter().zip(&lower).map(|(u, l)| u - l).collect());
            lower = upper;
        }
        Ok(Self {
            n,
            alpha,
            lambdas: lambdas.to_vec(),
            s: s.to_vec(),
            log_gamma,
            fraction,
        })
    }

    /// The moment `μ_m` of the perturbed weight.
    pub fn moment(&self, m: usize) -> f64 {
        let share: f64 = self.fraction.iter().zip(&self.s).map(|(f, s)| (1.0 - s) * f[m]).sum();
        self.log_gamma[m].exp() * (1.0 - share)
    }

    /// `G = C H Cᵀ`, the Hankel matrix in the orthonormal Laguerre basis.
    pub fn congruent_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let a = self.alpha;
        // log|C_{im}| and sign, where p_i = Σ_m C_{im} x^m.
        let mut log_c = vec![vec![f64::NEG_INFINITY; n]; n];
        let mut sign_c = vec![vec![0.0; n]; n];
        for i in 0..n {
            let fi = i as f64;
            let norm = 0.5 * (ln_gamma_unchecked(fi + 1.0) - ln_gamma_unchecked(fi + a + 1.0));
            for m in 0..=i {
                let fm = m as f64;
                log_c[i][m] = norm + ln_gamma_unchecked(fi + a + 1.0)
                    - ln_gamma_unchecked(fi - fm + 1.0)
                    - ln_gamma_unchecked(fm + a + 1.0)
                    - ln_gamma_unchecked(fm + 1.0);
                sign_c[i][m] = if m % 2 == 0 { 1.0 } else { -1.0 };
            }
        }
        let mut g = DMatrix::<f64>::identity(n, n);
        for (frac, &s) in self.fraction.iter().zip(&self.s) {
            let weight = 1.0 - s;
            if weight == 0.0 {
                continue;
            }
            for i in 0..n {
                for l in 0..=i {
                    let mut acc = 0.0;
                    for m in 0..=i {
                        for q in 0..=l {
                            let f = frac[m + q];
                            if f == 0.0 {
                                continue;
                            }
                            let lg = log_c[i][m] + log_c[l][q] + self.log_gamma[m + q] + f.abs().ln();
                            acc += sign_c[i][m] * sign_c[l][q] * f.signum() * lg.exp();
                        }
                    }
                    g[(i, l)] -= weight * acc;
                    if l != i {
                        g[(l, i)] -= weight * acc;
                    }
                }
            }
        }
        g
    }
}

/// `F_n(λ⃗, s⃗)` as the Fredholm determinant of the finite-`n` LUE kernel,
/// with `m` doubled from `m0` until consecutive values differ by `< tol`.
pub fn lue_genfn(model: &LueModel, lambdas: &[f64], s: &[Complex64], m0: usize, tol: f64) -> Result<FredholmValue> {
    generating_fn_general(model, model.alpha, lambdas, s, m0, tol)
}

/// `F_n(λ⃗, s⃗)` as the ratio of the Hankel determinants of the perturbed
/// and unperturbed weights (`n ≤ HANKEL_MAX_N`).
pub fn hankel_ratio(n: usize, alpha: f64, lambdas: &[f64], s: &[f64]) -> Result<f64> {
    if n > HANKEL_MAX_N {
        return Err(Error::Conditioning(format!(
            "Hankel ratio requested at n = {n}; moment determinants are only trusted for n <= {HANKEL_MAX_N}"
        )));
    }
    let mom = JumpWeightMoments::new(n, alpha, lambdas, s)?;
    Ok(mom.congruent_matrix().determinant())
}

/// The tridiagonal matrix `T = BBᵀ` of one draw, as (diagonal, subdiagonal).
///
/// `B` is lower bidiagonal with diagonal `√Gamma(α+n−i+1)` and subdiagonal
/// `√Gamma(n−i)` (`i = 1..n`, unit scale). The eigenvalues of `T` are
/// distributed exactly as LUE(n, α) with weight `x^α e^{−x}`.
fn draw_tridiagonal(n: usize, alpha: f64, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Validation("LUE size n must be at least 1".into()));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(Error::Validation(format!("alpha = {alpha} must exceed -1")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = |shape: f64| Gamma::new(shape, 1.0).map_err(|e| Error::Validation(e.to_string()));
    let mut d = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..=n {
        d.push(gamma(alpha + (n - i) as f64 + 1.0)?.sample(&mut rng).sqrt());
        if i < n {
            e.push(gamma((n - i) as f64)?.sample(&mut rng).sqrt());
        }
    }
    // T_ii = d_i² + e_{i−1}², T_{i,i−1} = d_{i−1} e_{i−1}.
    let diag = (0..n).map(|i| d[i] * d[i] + if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 }).collect();
    let off = (1..n).map(|i| d[i - 1] * e[i - 1]).collect();
    Ok((diag, off))
}

/// One draw of the LUE(n, α) spectrum in increasing order, deterministic in
/// `seed`. The draw uses the bidiagonal model; all eigenvalues of the
/// tridiagonal matrix come from a dense symmetric eigensolver.
pub fn sample_spectrum(n: usize, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    let (diag, off) = draw_tridiagonal(n, alpha, seed)?;
    let t = DMatrix::<f64>::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => diag[i],
        1 => off[i.min(j)],
        _ => 0.0,
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// The `count` smallest eigenvalues of the same draw as
/// [`sample_spectrum`]`(n, alpha, seed)`, in increasing order.
///
/// They are found by Sturm-sequence bisection on the tridiagonal matrix, at
/// `O(n)` cost per bisection step. This is much cheaper than the full
/// spectrum when only the hard edge matters.
pub fn sample_smallest(n: usize, alpha: f64, seed: u64, count: usize) -> Result<Vec<f64>> {
    let (diag, off) = draw_tridiagonal(n, alpha, seed)?;
    if count > n {
        return Err(Error::Validation(format!("asked for {count} eigenvalues of a {n} x {n} matrix")));
    }
    // Gershgorin bound; the spectrum lies in (0, upper].
    let upper = (0..n)
        .map(|i| diag[i] + if i > 0 { off[i - 1] } else { 0.0 } + if i + 1 < n { off[i] } else { 0.0 })
        .fold(0.0, f64::max);
    // Number of eigenvalues below x, from the pivots of the LDLᵀ factorisation of T − x.
    let below = |x: f64| -> usize {
        let mut neg = 0;
        let mut piv = 1.0;
        for i in 0..n {
            let coupling = if i > 0 { off[i - 1] * off[i - 1] / piv } else { 0.0 };
            piv = diag[i] - x - coupling;
            if piv == 0.0 {
                piv = -f64::EPSILON * upper;
            }
            if piv < 0.0 {
                neg += 1;
            }
        }
        neg
    };
    let mut out = Vec::with_capacity(count);
    let mut lo_bound = 0.0;
    for k in 0..count {
        let (mut lo, mut hi) = (lo_bound, upper);
        while hi - lo > 4.0 * f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            if below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let v = 0.5 * (lo + hi);
        out.push(v);
        lo_bound = lo;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unperturbed_moments_are_gamma_values() {
        let m = JumpWeightMoments::new(4, 0.7, &[0.5, 2.0], &[1.0, 1.0]).unwrap();
        for k in 0..7 {
            let exact = ln_gamma_unchecked(0.7 + k as f64 + 1.0).exp();
            assert!((m.moment(k) / exact - 1.0).abs() < 1e-12);
        }
        assert!((hankel_ratio(4, 0.7, &[0.5, 2.0], &[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_by_one_ratio_is_incomplete_gamma() {
        let (alpha, lam, s) = (0.4, 1.3, 0.25);
        let r = hankel_ratio(1, alpha, &[lam], &[s]).unwrap();
        let exact = 1.0 - (1.0 - s) * reg_lower_gamma(alpha + 1.0, lam).unwrap();
        assert!((r - exact).abs() < 1e-14, "{r} vs {exact}");
    }

    #[test]
    fn congruence_matches_direct_hankel_determinant_at_small_n() {
        // For n = 3 the plain moment determinant is still well conditioned.
        let (n, alpha, lam, s) = (3, 0.0, [0.6, 1.5], [0.2, 0.7]);
        let mom = JumpWeightMoments::new(n, alpha, &lam, &s).unwrap();
        let h = DMatrix::from_fn(n, n, |i, l| mom.moment(i + l));
        let h0 = DMatrix::from_fn(n, n, |i, l| ln_gamma_unchecked(alpha + (i + l) as f64 + 1.0).exp());
        let direct = h.determinant() / h0.determinant();
        assert!((hankel_ratio(n, alpha, &lam, &s).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn guard_refuses_large_n() {
        assert!(matches!(hankel_ratio(13, 0.0, &[1.0], &[0.0]), Err(Error::Conditioning(_))));
    }

    #[test]
    fn sampler_is_deterministic_and_positive() {
        let a = sample_spectrum(30, 0.5, 7).unwrap();
        let b = sample_spectrum(30, 0.5, 7).unwrap();
        assert_eq!(a, b);
        assert!(a[0] > 0.0 && a.windows(2).all(|w| w[0] <= w[1]));
        // E tr(BBᵀ) = Σ (α+n−i+1) + Σ (n−i) = n(n+α).
        let mean_trace: f64 = (0..200).map(|s| sample_spectrum(30, 0.5, s).unwrap().iter().sum::<f64>()).sum::<f64>() / 200.0;
        assert!((mean_trace / (30.0 * 30.5) - 1.0).abs() < 0.02, "{mean_trace}");
    }

    #[test]
    fn bisection_matches_dense_eigensolver() {
        for seed in 0..5 {
            let all = sample_spectrum(40, 0.3, seed).unwrap();
            let few = sample_smallest(40, 0.3, seed, 4).unwrap();
            for (a, b) in all.iter().zip(&few) {
                assert!((a - b).abs() < 1e-10 * all[39], "{a} vs {b}");
            }
        }
    }
}
