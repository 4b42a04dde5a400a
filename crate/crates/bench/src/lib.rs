//! Fixed workloads shared by the benchmarks.
//!
//! Each fixture is a representative configuration of one engine stage, so
//! timings stay comparable across changes.

use besselgap::{ParameterSet, Result};

/// A `k`-interval configuration at `α = 0.5` with `r_j = j` and multipliers
/// spread evenly over `(0, 1)`.
pub fn spread(k: usize, x: f64) -> Result<ParameterSet> {
    let r = (1..=k).map(|j| j as f64).collect();
    let s = (1..=k).map(|j| (j as f64 - 0.5) / k as f64).collect();
    ParameterSet::new(0.5, r, s, x)
}
