//! Equations of motion in size/rotation/shape variables, a Cartesian
//! reference integrator, and the analytic Saari-relation residual.
//!
//! The shape equation is the `s`-time form
//! `x'' = ((2C - (4/3) x ∧ x') / N) (y', -x') + (3 I^{1-a/2} / a) grad mu`
//! with `ds = (N / I) dt`, converted to physical time by
//! `x_tt = (N_t / N - I_t / I) x_t + (N / I)^2 x''`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geometry::mu_derivatives;
use crate::ode::{integrate, OdeSolution, OdeSystem, StepControl, StepStats};
use crate::reduction::{
    angular_momentum, reduced_energy, shape_norm, total_energy, wedge, Alpha, CartesianState, ReducedState,
};

/// Indices into the augmented reduced state vector.
pub mod idx {
    pub const I: usize = 0;
    pub const I_DOT: usize = 1;
    pub const THETA: usize = 2;
    pub const X: usize = 3;
    pub const Y: usize = 4;
    pub const X_DOT: usize = 5;
    pub const Y_DOT: usize = 6;
    /// `s` when integrating in `t`; `t` when integrating in `s`.
    pub const CLOCK: usize = 7;
    /// `int C / I dt`.
    pub const PHASE_C: usize = 8;
    /// `int (2/3) (zeta ∧ zeta_dot) / N dt`.
    pub const PHASE_SHAPE: usize = 9;
    pub const DIM: usize = 10;
}

/// `(I, I_t, theta, x, y, x_t, y_t)`.
pub type CoreState = [f64; 7];

/// Time derivatives `(I_t, I_tt, theta_t, x_t, y_t, x_tt, y_tt)`.
pub fn reduced_rhs(s: &CoreState, c: f64, e: f64, alpha: Alpha) -> Result<CoreState, CoreError> {
    let [i, i_dot, _theta, x, y, xd, yd] = *s;
    if !(i > 0.0) {
        return Err(CoreError::Singular(format!("moment of inertia {i} is not positive")));
    }
    let a = alpha.value();
    let d = mu_derivatives(x, y, alpha)?;
    let n = 0.5 + 2.0 / 3.0 * (x * x + y * y);
    let n_dot = 4.0 / 3.0 * (x * xd + y * yd);
    let u = d.mu * i.powf(-a / 2.0);
    let i_ddot = 4.0 * (e + (1.0 / a - 0.5) * u);
    let theta_dot = c / i - 2.0 / 3.0 * (x * yd - y * xd) / n;

    // s-derivatives
    let to_s = i / n;
    let (xs, ys) = (to_s * xd, to_s * yd);
    let lambda = (2.0 * c - 4.0 / 3.0 * (x * ys - y * xs)) / n;
    let beta = 3.0 * i.powf(1.0 - a / 2.0) / a;
    let xss = lambda * ys + beta * d.mu_x;
    let yss = -lambda * xs + beta * d.mu_y;

    let damp = n_dot / n - i_dot / i;
    let to_t2 = (n / i) * (n / i);
    Ok([
        i_dot,
        i_ddot,
        theta_dot,
        xd,
        yd,
        damp * xd + to_t2 * xss,
        damp * yd + to_t2 * yss,
    ])
}

/// Packs a reduced state into the core vector.
pub fn core_of_reduced(r: &ReducedState) -> CoreState {
    [r.i, r.i_dot, r.theta, r.zeta.re, r.zeta.im, r.zeta_dot.re, r.zeta_dot.im]
}

/// Rebuilds a reduced state from the core vector; `theta_dot` is recovered from `C`.
pub fn reduced_of_core(s: &CoreState, c: f64) -> ReducedState {
    let zeta = Complex64::new(s[3], s[4]);
    let zeta_dot = Complex64::new(s[5], s[6]);
    ReducedState {
        i: s[0],
        i_dot: s[1],
        theta: s[2],
        theta_dot: c / s[0] - 2.0 / 3.0 * wedge(zeta, zeta_dot) / shape_norm(zeta),
        zeta,
        zeta_dot,
    }
}

/// Both sides of Saari's relation in physical time, from the analytic flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaariTerms {
    /// `d/dt [(I^2 / 6) |x_t|^2 / N^2]`.
    pub shape_power: f64,
    /// `(I^{1-a/2} / a) d mu / dt`.
    pub measure_power: f64,
}

impl SaariTerms {
    pub fn residual(&self) -> f64 {
        self.shape_power - self.measure_power
    }

    /// Residual divided by `max(1, |shape_power|, |measure_power|)`.
    pub fn scaled_residual(&self) -> f64 {
        self.residual() / 1f64.max(self.shape_power.abs()).max(self.measure_power.abs())
    }
}

fn saari_from_accel(s: &CoreState, accel: (f64, f64), alpha: Alpha) -> Result<SaariTerms, CoreError> {
    let [i, i_dot, _, x, y, xd, yd] = *s;
    let a = alpha.value();
    let d = mu_derivatives(x, y, alpha)?;
    let n = 0.5 + 2.0 / 3.0 * (x * x + y * y);
    let n_dot = 4.0 / 3.0 * (x * xd + y * yd);
    let v2 = xd * xd + yd * yd;
    let va = xd * accel.0 + yd * accel.1;
    let shape_power = (2.0 * i * i_dot * v2 / (n * n) + 2.0 * i * i * va / (n * n) - 2.0 * i * i * v2 * n_dot / (n * n * n)) / 6.0;
    let measure_power = i.powf(1.0 - a / 2.0) / a * (d.mu_x * xd + d.mu_y * yd);
    Ok(SaariTerms { shape_power, measure_power })
}

/// Saari's relation evaluated with shape accelerations taken from [`reduced_rhs`].
pub fn saari_terms(s: &CoreState, c: f64, e: f64, alpha: Alpha) -> Result<SaariTerms, CoreError> {
    let f = reduced_rhs(s, c, e, alpha)?;
    saari_from_accel(s, (f[5], f[6]), alpha)
}

/// `d/ds[(1/6)|x'|^2] - (I^{1-a/2}/a) d mu/ds`, i.e. the time-form residual times `I / N`.
pub fn saari_residual_s(s: &CoreState, c: f64, e: f64, alpha: Alpha) -> Result<f64, CoreError> {
    let n = 0.5 + 2.0 / 3.0 * (s[3] * s[3] + s[4] * s[4]);
    Ok(saari_terms(s, c, e, alpha)?.residual() * s[0] / n)
}

/// Saari's relation with the shape acceleration computed from a Cartesian
/// state and its Newtonian accelerations, independent of [`reduced_rhs`].
pub fn saari_terms_cartesian(state: &CartesianState, alpha: Alpha) -> Result<SaariTerms, CoreError> {
    let r = crate::reduction::reduced_of_cartesian(state)?;
    let acc = cartesian_accelerations(&state.q, alpha)?;
    let z1 = state.q[1] - state.q[0];
    let z1d = state.v[1] - state.v[0];
    let z1dd = acc[1] - acc[0];
    let (z2, z2d, z2dd) = (1.5 * state.q[2], 1.5 * state.v[2], 1.5 * acc[2]);
    // zeta = z2 / z1
    let zeta_dd = z2dd / z1 - 2.0 * z2d * z1d / (z1 * z1) - z2 * z1dd / (z1 * z1) + 2.0 * z2 * z1d * z1d / (z1 * z1 * z1);
    saari_from_accel(&core_of_reduced(&r), (zeta_dd.re, zeta_dd.im), alpha)
}

/// `x' ∧ x'' + ((2C - (4/3) x ∧ x') / N) |x'|^2 - (3 I^{1-a/2} / a) x' ∧ grad mu`,
/// with `s`-derivatives obtained from the time-derivatives of [`reduced_rhs`].
pub fn wedge_identity_residual(s: &CoreState, c: f64, e: f64, alpha: Alpha) -> Result<f64, CoreError> {
    let f = reduced_rhs(s, c, e, alpha)?;
    let [i, i_dot, _, x, y, xd, yd] = *s;
    let a = alpha.value();
    let d = mu_derivatives(x, y, alpha)?;
    let n = 0.5 + 2.0 / 3.0 * (x * x + y * y);
    let n_dot = 4.0 / 3.0 * (x * xd + y * yd);
    let k = i / n;
    let (xs, ys) = (k * xd, k * yd);
    let damp = i_dot / i - n_dot / n;
    let xss = k * k * (damp * xd + f[5]);
    let yss = k * k * (damp * yd + f[6]);
    let lhs = xs * yss - ys * xss;
    let lambda = (2.0 * c - 4.0 / 3.0 * (x * ys - y * xs)) / n;
    let beta = 3.0 * i.powf(1.0 - a / 2.0) / a;
    Ok(lhs + lambda * (xs * xs + ys * ys) - beta * (xs * d.mu_y - ys * d.mu_x))
}

/// Newtonian accelerations `q_k'' = -sum_j (q_k - q_j) / r_kj^{a+2}`.
pub fn cartesian_accelerations(q: &[Complex64; 3], alpha: Alpha) -> Result<[Complex64; 3], CoreError> {
    let mut acc = [Complex64::default(); 3];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let d = q[i] - q[j];
        let r = d.norm();
        if r == 0.0 {
            return Err(CoreError::Singular(format!("bodies {} and {} collide", i + 1, j + 1)));
        }
        let f = d * r.powf(-alpha.value() - 2.0);
        acc[i] -= f;
        acc[j] += f;
    }
    Ok(acc)
}

/// Accelerations of a Cartesian state, as a convenience over [`cartesian_accelerations`].
pub fn cartesian_rhs(s: &CartesianState, alpha: Alpha) -> Result<[Complex64; 3], CoreError> {
    cartesian_accelerations(&s.q, alpha)
}

/// Augmented reduced system in physical time.
struct ReducedFlow {
    c: f64,
    e: f64,
    alpha: Alpha,
}

impl OdeSystem for ReducedFlow {
    fn dim(&self) -> usize {
        idx::DIM
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), CoreError> {
        let core: CoreState = y[..7].try_into().unwrap();
        let f = reduced_rhs(&core, self.c, self.e, self.alpha)?;
        dy[..7].copy_from_slice(&f);
        let n = 0.5 + 2.0 / 3.0 * (y[3] * y[3] + y[4] * y[4]);
        dy[idx::CLOCK] = n / y[0];
        dy[idx::PHASE_C] = self.c / y[0];
        dy[idx::PHASE_SHAPE] = 2.0 / 3.0 * (y[3] * y[6] - y[4] * y[5]) / n;
        Ok(())
    }
}

/// The same flow with `s` as the independent variable and `t` carried in `CLOCK`.
struct ReducedFlowInS(ReducedFlow);

impl OdeSystem for ReducedFlowInS {
    fn dim(&self) -> usize {
        idx::DIM
    }

    fn rhs(&self, _s: f64, y: &[f64], dy: &mut [f64]) -> Result<(), CoreError> {
        self.0.rhs(y[idx::CLOCK], y, dy)?;
        let dt_ds = 1.0 / dy[idx::CLOCK];
        for v in dy.iter_mut() {
            *v *= dt_ds;
        }
        dy[idx::CLOCK] = dt_ds;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Horizon {
    /// Integrate to physical time `t`.
    Time(f64),
    /// Integrate to shape time `s`.
    ShapeTime(f64),
}

impl Horizon {
    pub fn end(self) -> f64 {
        match self {
            Horizon::Time(t) | Horizon::ShapeTime(t) => t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub control: StepControl,
    pub horizon: Horizon,
    /// Spacing of recorded samples in the independent variable.
    pub output_interval: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            control: StepControl::default(),
            horizon: Horizon::Time(10.0),
            output_interval: 0.05,
        }
    }
}

impl IntegratorConfig {
    pub fn output_grid(&self) -> Result<Vec<f64>, CoreError> {
        let end = self.horizon.end();
        if !(end > 0.0) || !(self.output_interval > 0.0) {
            return Err(CoreError::InvalidInput("horizon and output interval must be positive".into()));
        }
        let n = (end / self.output_interval - 1e-9).ceil().max(1.0) as usize;
        Ok((1..=n).map(|k| if k == n { end } else { k as f64 * self.output_interval }).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReducedSample {
    pub t: f64,
    pub s: f64,
    pub state: ReducedState,
    pub c: f64,
    pub e: f64,
    pub mu: f64,
    pub saari_residual: f64,
    /// `int C / I dt`.
    pub phase_c: f64,
    /// `int (2/3)(zeta ∧ zeta_dot) / N dt`.
    pub phase_shape: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedTrajectory {
    pub alpha: Alpha,
    /// Angular momentum and energy fixed by the initial state.
    pub c0: f64,
    pub e0: f64,
    pub samples: Vec<ReducedSample>,
    pub stats: StepStats,
    /// Why the run ended before the horizon, if it did.
    pub truncated: Option<String>,
}

fn sample_of(y: &[f64], t: f64, s: f64, c: f64, e0: f64, alpha: Alpha) -> Result<ReducedSample, CoreError> {
    let core: CoreState = y[..7].try_into().unwrap();
    let state = reduced_of_core(&core, c);
    let terms = saari_terms(&core, c, e0, alpha)?;
    Ok(ReducedSample {
        t,
        s,
        state,
        c: angular_momentum(&state),
        e: reduced_energy(&state, alpha)?,
        mu: mu_derivatives(state.zeta.re, state.zeta.im, alpha)?.mu,
        saari_residual: terms.scaled_residual(),
        phase_c: y[idx::PHASE_C],
        phase_shape: y[idx::PHASE_SHAPE],
    })
}

pub fn integrate_reduced(init: &ReducedState, cfg: &IntegratorConfig, alpha: Alpha) -> Result<ReducedTrajectory, CoreError> {
    if !(init.i > 0.0) {
        return Err(CoreError::Singular("initial moment of inertia must be positive".into()));
    }
    let c = angular_momentum(init);
    let e = reduced_energy(init, alpha)?;
    let flow = ReducedFlow { c, e, alpha };
    let mut y0 = vec![0.0; idx::DIM];
    y0[..7].copy_from_slice(&core_of_reduced(init));
    let outputs = cfg.output_grid()?;
    let sol: OdeSolution = match cfg.horizon {
        Horizon::Time(_) => integrate(&flow, 0.0, &y0, &outputs, &cfg.control)?,
        Horizon::ShapeTime(_) => integrate(&ReducedFlowInS(flow), 0.0, &y0, &outputs, &cfg.control)?,
    };
    let mut samples = Vec::with_capacity(sol.times.len());
    for (x, y) in sol.times.iter().zip(&sol.states) {
        let (t, s) = match cfg.horizon {
            Horizon::Time(_) => (*x, y[idx::CLOCK]),
            Horizon::ShapeTime(_) => (y[idx::CLOCK], *x),
        };
        samples.push(sample_of(y, t, s, c, e, alpha)?);
    }
    Ok(ReducedTrajectory {
        alpha,
        c0: c,
        e0: e,
        samples,
        stats: sol.stats,
        truncated: sol.stopped.map(|e| e.to_string()),
    })
}

struct CartesianFlow {
    alpha: Alpha,
}

fn unpack(y: &[f64]) -> ([Complex64; 3], [Complex64; 3]) {
    let q = [0, 1, 2].map(|k| Complex64::new(y[2 * k], y[2 * k + 1]));
    let v = [0, 1, 2].map(|k| Complex64::new(y[6 + 2 * k], y[7 + 2 * k]));
    (q, v)
}

impl OdeSystem for CartesianFlow {
    fn dim(&self) -> usize {
        12
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<(), CoreError> {
        let (q, v) = unpack(y);
        let a = cartesian_accelerations(&q, self.alpha)?;
        for k in 0..3 {
            dy[2 * k] = v[k].re;
            dy[2 * k + 1] = v[k].im;
            dy[6 + 2 * k] = a[k].re;
            dy[7 + 2 * k] = a[k].im;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct CartesianTrajectory {
    pub samples: Vec<CartesianState>,
    pub energies: Vec<f64>,
    pub angular_momenta: Vec<f64>,
    pub stats: StepStats,
    pub truncated: Option<String>,
}

/// Reference integration of Newton's equations (time horizon only).
pub fn integrate_cartesian(init: &CartesianState, cfg: &IntegratorConfig, alpha: Alpha) -> Result<CartesianTrajectory, CoreError> {
    let Horizon::Time(_) = cfg.horizon else {
        return Err(CoreError::InvalidInput("the Cartesian integrator runs in physical time".into()));
    };
    let mut y0 = vec![0.0; 12];
    for k in 0..3 {
        y0[2 * k] = init.q[k].re;
        y0[2 * k + 1] = init.q[k].im;
        y0[6 + 2 * k] = init.v[k].re;
        y0[7 + 2 * k] = init.v[k].im;
    }
    let outputs: Vec<f64> = cfg.output_grid()?.iter().map(|t| init.t + t).collect();
    let sol = integrate(&CartesianFlow { alpha }, init.t, &y0, &outputs, &cfg.control)?;
    let mut out = CartesianTrajectory {
        samples: Vec::new(),
        energies: Vec::new(),
        angular_momenta: Vec::new(),
        stats: sol.stats,
        truncated: sol.stopped.map(|e| e.to_string()),
    };
    for (t, y) in sol.times.iter().zip(&sol.states) {
        let (q, v) = unpack(y);
        let st = CartesianState { q, v, t: *t };
        out.energies.push(total_energy(&st, alpha)?);
        out.angular_momenta.push(st.angular_momentum());
        out.samples.push(st);
    }
    Ok(out)
}

/// Largest relative deviation of `values` from the first entry.
pub fn relative_drift(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut it = values.into_iter();
    let Some(first) = it.next() else { return 0.0 };
    let scale = first.abs().max(f64::MIN_POSITIVE);
    it.map(|v| (v - first).abs() / scale).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::lagrange_rotating;
    use crate::reduction::cartesian_of_reduced;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shape_at_rest_at_equilateral_stays() {
        let r = lagrange_rotating(Alpha::STRONG, 1.3);
        let cc = angular_momentum(&r);
        let e = reduced_energy(&r, Alpha::STRONG).unwrap();
        let f = reduced_rhs(&core_of_reduced(&r), cc, e, Alpha::STRONG).unwrap();
        assert!(f[5].abs() < 1e-14 && f[6].abs() < 1e-14);
        assert!(f[1].abs() < 1e-13, "I'' = {}", f[1]);
    }

    #[test]
    fn forces_balance() {
        let line = [c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let a = cartesian_accelerations(&line, Alpha::new(1.0).unwrap()).unwrap();
        assert!(a[1].norm() < 1e-15);
        let r = 1.7;
        let s3 = 3f64.sqrt();
        let tri = [c(-r / 2.0, -r * s3 / 6.0), c(r / 2.0, -r * s3 / 6.0), c(0.0, r * s3 / 3.0)];
        let a = cartesian_accelerations(&tri, Alpha::STRONG).unwrap();
        for k in 0..3 {
            assert!((a[k].norm() - s3 / r.powi(3)).abs() < 1e-14);
            // points to the centroid (origin)
            assert!((a[k] / tri[k]).im.abs() < 1e-14 && (a[k] / tri[k]).re < 0.0);
        }
        let sum: Complex64 = a.iter().sum();
        assert!(sum.norm() < 1e-14);
    }

    #[test]
    fn saari_residual_vanishes_without_shape_motion() {
        let r = lagrange_rotating(Alpha::STRONG, 1.0);
        let t = saari_terms(&core_of_reduced(&r), angular_momentum(&r), 0.0, Alpha::STRONG).unwrap();
        assert_eq!(t.shape_power, 0.0);
        assert_eq!(t.residual(), 0.0);
    }

    #[test]
    fn reduced_and_cartesian_saari_agree_at_random_state() {
        let r = ReducedState { i: 1.7, i_dot: 0.3, theta: 0.4, theta_dot: 0.9, zeta: c(0.2, 0.7), zeta_dot: c(0.15, -0.1) };
        let a = Alpha::new(1.5).unwrap();
        let cart = cartesian_of_reduced(&r, 0.0);
        let t1 = saari_terms(&core_of_reduced(&r), angular_momentum(&r), reduced_energy(&r, a).unwrap(), a).unwrap();
        let t2 = saari_terms_cartesian(&cart, a).unwrap();
        assert!((t1.shape_power - t2.shape_power).abs() < 1e-12, "{t1:?} {t2:?}");
        assert!(t1.residual().abs() < 1e-13);
        assert!(t2.residual().abs() < 1e-12);
    }

    #[test]
    fn output_grid_hits_horizon() {
        let cfg = IntegratorConfig { horizon: Horizon::Time(1.0), output_interval: 0.3, ..Default::default() };
        assert_eq!(cfg.output_grid().unwrap(), vec![0.3, 0.6, 0.8999999999999999, 1.0]);
    }
}
