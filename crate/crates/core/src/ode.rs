//! Adaptive Dormand–Prince 5(4) integrator with continuous (dense) output.
//!
//! The integrator is deliberately small and explicit about two things the
//! Painlevé systems need:
//!
//! * a caller-supplied error *scale* per component, so that solutions whose
//!   components differ by many orders of magnitude are controlled in a
//!   relative sense (an absolute tolerance would swamp tiny but significant
//!   amplitudes);
//! * a right-hand side that may refuse an evaluation (for example near a
//!   singular coefficient); the step is then rejected and halved, and the
//!   integration fails once the step falls below a floor.

use crate::error::{Error, Result};

/// Step-control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Target local error relative to the component scales.
    pub rtol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Smallest admissible step (absolute, in the independent variable).
    pub h_min: f64,
    /// Hard cap on the number of attempted steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            h_init: None,
            h_min: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

/// Why a right-hand side evaluation was refused.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsRefusal(pub String);

/// Result of an integration: accepted mesh plus a continuous extension.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    dim: usize,
    /// Mesh points `t_0 < t_1 < … < t_N`.
    ts: Vec<f64>,
    /// States at the mesh points, row-major (`(N+1) × dim`).
    ys: Vec<f64>,
    /// Five interpolation vectors per step, row-major (`N × 5 × dim`).
    coeffs: Vec<f64>,
    /// Reason the integration stopped before the requested end, if any.
    pub stopped: Option<String>,
    /// Number of rejected steps.
    pub rejected: usize,
}

impl DenseSolution {
    /// Dimension of the state vector.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Accepted mesh points (including the initial point).
    pub fn mesh(&self) -> &[f64] {
        &self.ts
    }

    /// State at mesh point `i`.
    pub fn state(&self, i: usize) -> &[f64] {
        &self.ys[i * self.dim..(i + 1) * self.dim]
    }

    /// First mesh point.
    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }

    /// Last mesh point actually reached.
    pub fn t_end(&self) -> f64 {
        *self.ts.last().expect("non-empty mesh")
    }

    /// Final state.
    pub fn last_state(&self) -> &[f64] {
        self.state(self.ts.len() - 1)
    }

    /// Evaluates the continuous extension at `t ∈ [t_start, t_end]`.
    /// Values at mesh points reproduce the stored states exactly.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// In-place variant of [`DenseSolution::eval`].
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (t0, t1) = (self.t_start(), self.t_end());
        let slack = 1e-12 * (t1 - t0).abs().max(1.0);
        if !(t >= t0 - slack && t <= t1 + slack) {
            return Err(Error::domain(
                "DenseSolution::eval",
                format!("t = {t} outside the integrated range [{t0}, {t1}]"),
            ));
        }
        let n = self.ts.len();
        if n == 1 {
            out.copy_from_slice(self.state(0));
            return Ok(());
        }
        // Index of the step containing t.
        let i = match self.ts.binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => {
                out.copy_from_slice(self.state(i));
                return Ok(());
            }
            Err(i) => i.clamp(1, n - 1) - 1,
        };
        let h = self.ts[i + 1] - self.ts[i];
        let th = ((t - self.ts[i]) / h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let d = self.dim;
        let c = &self.coeffs[i * 5 * d..(i + 1) * 5 * d];
        for k in 0..d {
            out[k] = c[k] + th * (c[d + k] + th1 * (c[2 * d + k] + th * (c[3 * d + k] + th1 * c[4 * d + k])));
        }
        Ok(())
    }
}

// Dormand–Prince coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates `y′ = f(t, y)` from `t0` to `t1 > t0`.
///
/// * `rhs(t, y, dy)` writes the derivative or refuses the evaluation.
/// * `scale(y_old, y_new, sc)` writes the error scale of every component; the
///   local error estimate `e` is accepted when `rms(e_i / sc_i) ≤ rtol`.
/// * `monitor(t, y)` is called after every accepted step; returning
///   `Some(reason)` ends the integration early (the solution is kept and
///   `stopped` records the reason).
pub fn integrate<F, S, M>(
    mut rhs: F,
    scale: S,
    mut monitor: M,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &OdeOptions,
) -> Result<DenseSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> std::result::Result<(), RhsRefusal>,
    S: Fn(&[f64], &[f64], &mut [f64]),
    M: FnMut(f64, &[f64]) -> Option<String>,
{
    if !(t1 > t0) {
        return Err(Error::domain("ode::integrate", format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    let d = y0.len();
    let mut sol = DenseSolution {
        dim: d,
        ts: vec![t0],
        ys: y0.to_vec(),
        coeffs: Vec::new(),
        stopped: None,
        rejected: 0,
    };
    let fail = |t: f64, reason: String| Error::Integration { t, reason };

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; d];
    rhs(t, &y, &mut k1).map_err(|e| fail(t, format!("initial derivative refused: {}", e.0)))?;
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut ytmp = vec![0.0; d];
    let mut ynew = vec![0.0; d];
    let mut sc = vec![0.0; d];

    let mut h = match opts.h_init {
        Some(h) => h,
        None => initial_step(&mut rhs, &scale, t, &y, &k1, opts.rtol, t1 - t0),
    }
    .min(t1 - t0);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < t1 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(fail(t, format!("exceeded {} steps", opts.max_steps)));
        }
        if t + h >= t1 || t + 1.01 * h >= t1 {
            h = t1 - t;
        }
        if h < opts.h_min {
            return Err(fail(t, format!("step size {h:e} fell below the floor {:e}", opts.h_min)));
        }
        let stages: std::result::Result<(), RhsRefusal> = (|| {
            for i in 0..d {
                ytmp[i] = y[i] + h * A21 * k1[i];
            }
            rhs(t + C2 * h, &ytmp, &mut k2)?;
            for i in 0..d {
                ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            rhs(t + C3 * h, &ytmp, &mut k3)?;
            for i in 0..d {
                ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            rhs(t + C4 * h, &ytmp, &mut k4)?;
            for i in 0..d {
                ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            rhs(t + C5 * h, &ytmp, &mut k5)?;
            for i in 0..d {
                ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            rhs(t + h, &ytmp, &mut k6)?;
            for i in 0..d {
                ynew[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            rhs(t + h, &ynew, &mut k7)?;
            Ok(())
        })();
        if stages.is_err() {
            sol.rejected += 1;
            h *= 0.5;
            last_rejected = true;
            continue;
        }
        scale(&y, &ynew, &mut sc);
        let mut acc = 0.0;
        for i in 0..d {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let r = e / sc[i];
            acc += r * r;
        }
        let err = (acc / d as f64).sqrt() / opts.rtol;
        if !err.is_finite() {
            sol.rejected += 1;
            h *= 0.25;
            last_rejected = true;
            continue;
        }
        if err <= 1.0 {
            // Dense-output coefficients for this step.
            let mut block = vec![0.0; 5 * d];
            for i in 0..d {
                let r2 = ynew[i] - y[i];
                let r3 = h * k1[i] - r2;
                block[i] = y[i];
                block[d + i] = r2;
                block[2 * d + i] = r3;
                block[3 * d + i] = r2 - h * k7[i] - r3;
                block[4 * d + i] =
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            sol.coeffs.extend_from_slice(&block);
            t = if h == t1 - t { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7);
            sol.ts.push(t);
            sol.ys.extend_from_slice(&y);
            if let Some(reason) = monitor(t, &y) {
                sol.stopped = Some(reason);
                return Ok(sol);
            }
            let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            sol.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.1);
            last_rejected = true;
        }
    }
    Ok(sol)
}

fn initial_step<F, S>(rhs: &mut F, scale: &S, t: f64, y: &[f64], f0: &[f64], rtol: f64, span: f64) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]) -> std::result::Result<(), RhsRefusal>,
    S: Fn(&[f64], &[f64], &mut [f64]),
{
    let d = y.len();
    let mut sc = vec![0.0; d];
    scale(y, y, &mut sc);
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / d as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; d];
    if rhs(t + h0, &y1, &mut f1).is_err() {
        return h0 * 1e-3;
    }
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(0.2) * rtol.powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_scale(rtol_floor: f64) -> impl Fn(&[f64], &[f64], &mut [f64]) {
        move |a: &[f64], b: &[f64], s: &mut [f64]| {
            for i in 0..s.len() {
                s[i] = a[i].abs().max(b[i].abs()).max(rtol_floor);
            }
        }
    }

    #[test]
    fn harmonic_oscillator_and_dense_output() {
        let opts = OdeOptions {
            rtol: 1e-12,
            ..Default::default()
        };
        let sol = integrate(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            rel_scale(1.0),
            |_, _| None,
            0.0,
            &[0.0, 1.0],
            10.0,
            &opts,
        )
        .unwrap();
        let end = sol.last_state();
        assert!((end[0] - 10f64.sin()).abs() < 1e-10);
        for i in 0..200 {
            let t = i as f64 * 0.05;
            let v = sol.eval(t).unwrap();
            assert!((v[0] - t.sin()).abs() < 1e-9, "dense output at {t}");
        }
        // Interpolant reproduces nodes exactly.
        let k = sol.mesh().len() / 2;
        assert_eq!(sol.eval(sol.mesh()[k]).unwrap(), sol.state(k).to_vec());
    }

    #[test]
    fn relative_scale_controls_tiny_solutions() {
        let opts = OdeOptions {
            rtol: 1e-11,
            ..Default::default()
        };
        let sol = integrate(
            |_, y, dy| {
                dy[0] = -3.0 * y[0];
                Ok(())
            },
            rel_scale(1e-300),
            |_, _| None,
            0.0,
            &[1e-40],
            5.0,
            &opts,
        )
        .unwrap();
        let want = 1e-40 * (-15.0f64).exp();
        assert!((sol.last_state()[0] - want).abs() < 1e-9 * want);
    }

    #[test]
    fn refusals_shrink_step_until_floor() {
        let opts = OdeOptions {
            rtol: 1e-8,
            h_min: 1e-6,
            ..Default::default()
        };
        let res = integrate(
            |t, _, dy| {
                if t > 0.5 {
                    Err(RhsRefusal("singular".into()))
                } else {
                    dy[0] = 1.0;
                    Ok(())
                }
            },
            rel_scale(1.0),
            |_, _| None,
            0.0,
            &[0.0],
            1.0,
            &opts,
        );
        assert!(matches!(res, Err(Error::Integration { .. })));
    }

    #[test]
    fn monitor_stops_early() {
        let sol = integrate(
            |_, y, dy| {
                dy[0] = y[0];
                Ok(())
            },
            rel_scale(1.0),
            |_, y| (y[0] > 100.0).then(|| "blow-up".to_string()),
            0.0,
            &[1.0],
            20.0,
            &OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(sol.stopped.as_deref(), Some("blow-up"));
        assert!(sol.t_end() < 20.0);
    }
}
