//! Explicit Runge–Kutta steppers: Dormand–Prince 5(4) with adaptive step
//! control, and classical fixed-step RK4.
//!
//! Integration is driven toward a list of output times; steps are clamped so
//! every output time is hit exactly, which keeps samples from different
//! integrators directly comparable.

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// A first-order system `y' = f(t, y)`. Returning `Err` stops the integration.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), CoreError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rk4,
    Dopri5,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub method: Method,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum step, and the fixed step for RK4.
    pub max_step: f64,
    pub min_step: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            method: Method::Dopri5,
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_step: 0.05,
            min_step: 1e-14,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(CoreError::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.max_step > 0.0 && self.min_step > 0.0 && self.min_step < self.max_step) {
            return Err(CoreError::InvalidInput("need 0 < min_step < max_step".into()));
        }
        Ok(())
    }
}

/// Statistics of one integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Outcome of [`integrate`]: samples at the output times reached, plus the
/// error that stopped the run early (if any).
pub struct OdeSolution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: StepStats,
    pub stopped: Option<CoreError>,
}

// Dormand–Prince coefficients
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

struct Work {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    next: Vec<f64>,
}

impl Work {
    fn new(n: usize) -> Self {
        Work {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            next: vec![0.0; n],
        }
    }
}

fn combine(out: &mut [f64], y: &[f64], h: f64, terms: &[(f64, &[f64])]) {
    for i in 0..y.len() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] = y[i] + h * acc;
    }
}

/// One Dormand–Prince step from `(t, y)` with `k[0] = f(t, y)` already set.
/// Leaves the 5th-order solution in `w.next`, `f(t+h, next)` in `k[6]`, and
/// returns the scaled RMS error estimate.
fn dopri_step<S: OdeSystem>(
    sys: &S,
    t: f64,
    y: &[f64],
    h: f64,
    ctl: &StepControl,
    w: &mut Work,
    stats: &mut StepStats,
) -> Result<f64, CoreError> {
    let [k1, k2, k3, k4, k5, k6, k7] = &mut w.k;
    combine(&mut w.tmp, y, h, &[(A21, k1)]);
    sys.rhs(t + C2 * h, &w.tmp, k2)?;
    combine(&mut w.tmp, y, h, &[(A31, k1), (A32, k2)]);
    sys.rhs(t + C3 * h, &w.tmp, k3)?;
    combine(&mut w.tmp, y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
    sys.rhs(t + C4 * h, &w.tmp, k4)?;
    combine(&mut w.tmp, y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
    sys.rhs(t + C5 * h, &w.tmp, k5)?;
    combine(&mut w.tmp, y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
    sys.rhs(t + h, &w.tmp, k6)?;
    combine(&mut w.next, y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
    sys.rhs(t + h, &w.next, k7)?;
    stats.rhs_evals += 6;

    let mut err = 0.0;
    for i in 0..y.len() {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = ctl.abs_tol + ctl.rel_tol * y[i].abs().max(w.next[i].abs());
        err += (e / sc).powi(2);
    }
    Ok((err / y.len() as f64).sqrt())
}

fn rk4_step<S: OdeSystem>(sys: &S, t: f64, y: &[f64], h: f64, w: &mut Work) -> Result<(), CoreError> {
    let [k1, k2, k3, k4, ..] = &mut w.k;
    sys.rhs(t, y, k1)?;
    combine(&mut w.tmp, y, h / 2.0, &[(1.0, k1)]);
    sys.rhs(t + h / 2.0, &w.tmp, k2)?;
    combine(&mut w.tmp, y, h / 2.0, &[(1.0, k2)]);
    sys.rhs(t + h / 2.0, &w.tmp, k3)?;
    combine(&mut w.tmp, y, h, &[(1.0, k3)]);
    sys.rhs(t + h, &w.tmp, k4)?;
    combine(&mut w.next, y, h / 6.0, &[(1.0, k1), (2.0, k2), (2.0, k3), (1.0, k4)]);
    Ok(())
}

/// Integrates from `(t0, y0)` and records the state at each of `outputs`
/// (increasing, all `> t0`). `y0` itself is recorded first.
pub fn integrate<S: OdeSystem>(sys: &S, t0: f64, y0: &[f64], outputs: &[f64], ctl: &StepControl) -> Result<OdeSolution, CoreError> {
    ctl.validate()?;
    if y0.len() != sys.dim() {
        return Err(CoreError::InvalidInput("state dimension mismatch".into()));
    }
    if outputs.windows(2).any(|w| w[1] <= w[0]) || outputs.first().is_some_and(|&t| t <= t0) {
        return Err(CoreError::InvalidInput("output times must increase past t0".into()));
    }
    let n = y0.len();
    let mut w = Work::new(n);
    let mut stats = StepStats::default();
    let mut sol = OdeSolution {
        times: vec![t0],
        states: vec![y0.to_vec()],
        stats,
        stopped: None,
    };
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = ctl.max_step.min(1e-3);
    let mut fsal_ready = false;

    for &target in outputs {
        while t < target {
            let remaining = target - t;
            let last = remaining <= ctl.max_step.min(h) * (1.0 + 1e-12);
            let step = if last { remaining } else { h.min(ctl.max_step) };
            let res = match ctl.method {
                Method::Rk4 => rk4_step(sys, t, &y, step, &mut w).map(|_| {
                    stats.rhs_evals += 4;
                    0.0
                }),
                Method::Dopri5 => {
                    if !fsal_ready {
                        if let Err(e) = sys.rhs(t, &y, &mut w.k[0]) {
                            sol.stopped = Some(e);
                            sol.stats = stats;
                            return Ok(sol);
                        }
                        stats.rhs_evals += 1;
                        fsal_ready = true;
                    }
                    dopri_step(sys, t, &y, step, ctl, &mut w, &mut stats)
                }
            };
            let err = match res {
                Ok(e) => e,
                Err(e) if ctl.method == Method::Dopri5 && step > ctl.min_step => {
                    // a singular trial stage: retreat
                    log::debug!("trial stage failed at t = {t}: {e}; halving step");
                    h = step / 4.0;
                    stats.rejected += 1;
                    continue;
                }
                Err(e) => {
                    sol.stopped = Some(e);
                    sol.stats = stats;
                    return Ok(sol);
                }
            };
            if err <= 1.0 || ctl.method == Method::Rk4 {
                t = if last { target } else { t + step };
                std::mem::swap(&mut y, &mut w.next);
                if ctl.method == Method::Dopri5 {
                    let (head, tail) = w.k.split_at_mut(6);
                    head[0].copy_from_slice(&tail[0]);
                }
                stats.accepted += 1;
                if ctl.method == Method::Dopri5 {
                    let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    // do not let a short clamped final step shrink the next one
                    h = if last { h.max(step * fac) } else { step * fac };
                } else {
                    h = ctl.max_step;
                }
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                if h < ctl.min_step {
                    sol.stopped = Some(CoreError::StepSizeUnderflow { t });
                    sol.stats = stats;
                    return Ok(sol);
                }
            }
        }
        sol.times.push(t);
        sol.states.push(y.clone());
    }
    sol.stats = stats;
    Ok(sol)
}
