//! Generating functions of the hard-edge Bessel point process.
//!
//! The Bessel process is the `n → ∞` limit of the smallest eigenvalues of
//! Laguerre random matrices, scaled by `4n`. Its joint probability generating
//! function
//!
//! ```text
//! F(x⃗, s⃗) = E Π_{j=1}^{k} s_j^{n_(x_{j−1}, x_j)},   0 = x_0 < x_1 < … < x_k,
//! ```
//!
//! determines the occupancy numbers, the order statistics and the gap
//! probabilities of the process. This crate evaluates it by two independent
//! routes and builds the probabilistic quantities on top of them.
//!
//! * [`fredholm`]: the Fredholm determinant `det(1 − Σ_j (1 − s_j) K χ_j)`
//!   of the Bessel kernel, by Nyström discretisation. It accepts complex
//!   multipliers.
//! * [`painleve`]: the product formula
//!   `F(r⃗x, s⃗) = Π_j exp(−(r_j/4) ∫_0^x log(x/ξ) q_j²(ξ) dξ)`, where
//!   `q_1, …, q_k` solve `k` coupled Painlevé V equations. The module also
//!   includes the scalar Tracy–Widom reference, the Lax-pair (b-form)
//!   invariants, and the ratio probability `Q_α(r)`.
//! * [`apps`]: occupancy distributions, order statistics, joint tails, gaps
//!   on unions, thinning and conditioning, and degenerate-limit probes.
//! * [`lue`]: finite-`n` Laguerre Unitary Ensemble cross-checks. These are
//!   the Fredholm and Hankel representations and a spectrum sampler.
//! * [`kernels`], [`specfun`], [`quad`], [`ode`]: the numerical substrate.
//!   It provides the Bessel and LUE kernels, Bessel and gamma functions,
//!   Gauss rules and an adaptive Dormand–Prince integrator with dense output.
//!
//! All fallible operations return [`Result`], whose [`Error`] separates
//! input problems from numerical failures.
//!
//! ```
//! use besselgap::{generating_fn, genfn_painleve, integrate_with, PainleveConfig, ParameterSet};
//!
//! // Probability that (0, 1) is empty (α = 0): e^{−1/4}.
//! let p = ParameterSet::new(0.0, vec![1.0], vec![0.0], 1.0)?;
//! let fred = generating_fn(&p, 16, 1e-12)?.value();
//! let traj = integrate_with(&p, 1.0, &PainleveConfig::default())?;
//! let pain = genfn_painleve(&traj, 1.0)?.f;
//! assert!((fred - (-0.25f64).exp()).abs() < 1e-12);
//! assert!((pain - fred).abs() < 1e-7);
//! # Ok::<(), besselgap::Error>(())
//! ```

pub mod apps;
pub mod error;
pub mod fredholm;
pub mod kernels;
pub mod lue;
pub mod ode;
pub mod painleve;
pub mod quad;
pub mod specfun;

pub use apps::{
    conditional_smallest, count_distribution, degenerate_probe, gap_probability, joint_tail, kth_smallest_cdf,
    mean_count, thinned_smallest_cdf, CountDistribution, JointTail, Probe, ProbeRow, ProbeTable, TwoRoute,
};
pub use error::{Error, Result};
pub use fredholm::{
    bessel_genfn, fredholm_det, generating_fn, DetValue, DiscretizedOperator, FredholmValue, ParameterSet,
};
pub use kernels::{bessel_kernel, lue_kernel, BesselKernelSpec, Kernel, LueModel};
pub use lue::{hankel_ratio, lue_genfn, sample_spectrum, JumpWeightMoments};
pub use painleve::bform::{bform, BFormPoint, BFormView};
pub use painleve::ratio::{ratio_q, RatioConfig, RatioQ};
pub use painleve::scalar::{tracy_widom_integrate, ScalarTrajectory};
pub use painleve::{
    genfn, genfn_painleve, integrate, integrate_with, GenFnEvaluation, PainleveConfig, PainleveState,
    PainleveTrajectory,
};
