//! Unit-size, rotation-stripped body positions `Q_k` along a reduced trajectory.
//!
//! `Q_k = exp(i theta0 - i phi) eta_k` with `phi = int (2/3)(zeta ∧ zeta_dot)/N dt`,
//! equivalently `exp(-i int C/I dt) q_k / sqrt(I)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::ReducedTrajectory;
use crate::reduction::{
    cartesian_of_reduced, eta_of_zeta, eta_rate, kinetic_split, shape_norm, wedge, CartesianState, ReducedState,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QkState {
    pub t: f64,
    /// `int C / I dt`.
    pub phase_c: f64,
    /// `int (2/3)(zeta ∧ zeta_dot) / N dt`.
    pub phase_shape: f64,
    pub q: [Complex64; 3],
    pub q_dot: [Complex64; 3],
}

/// Absolute defects of the three normalizations satisfied by `Q_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QkDefects {
    /// `|sum Q_k|`.
    pub center: f64,
    /// `|sum |Q_k|^2 - 1|`.
    pub norm: f64,
    /// `|sum Q_k ∧ Q_k_dot|`.
    pub spin: f64,
}

impl QkDefects {
    pub fn max(&self) -> f64 {
        self.center.max(self.norm).max(self.spin)
    }
}

impl QkState {
    pub fn defects(&self) -> QkDefects {
        let sum: Complex64 = self.q.iter().sum();
        let norm: f64 = self.q.iter().map(|z| z.norm_sqr()).sum();
        let spin: f64 = self.q.iter().zip(&self.q_dot).map(|(&a, &b)| wedge(a, b)).sum();
        QkDefects { center: sum.norm(), norm: (norm - 1.0).abs(), spin: spin.abs() }
    }

    /// `(1/2) sum |Q_k_dot|^2`, the shape kinetic energy per unit `I`.
    pub fn half_speed_sq(&self) -> f64 {
        0.5 * self.q_dot.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }
}

/// `Q_k` and `Q_k_dot` from shape data and the shape phase.
pub fn qk_of_shape(zeta: Complex64, zeta_dot: Complex64, theta0: f64, phase_shape: f64) -> ([Complex64; 3], [Complex64; 3]) {
    let rot = Complex64::from_polar(1.0, theta0 - phase_shape);
    let eta = eta_of_zeta(zeta);
    let eta_dot = eta_rate(zeta, zeta_dot);
    let phase_rate = 2.0 / 3.0 * wedge(zeta, zeta_dot) / shape_norm(zeta);
    let i = Complex64::i();
    (eta.map(|e| rot * e), [0, 1, 2].map(|k| rot * (eta_dot[k] - i * phase_rate * eta[k])))
}

pub fn reconstruct_qk(traj: &ReducedTrajectory, theta0: f64) -> Vec<QkState> {
    traj.samples
        .iter()
        .map(|s| {
            let (q, q_dot) = qk_of_shape(s.state.zeta, s.state.zeta_dot, theta0, s.phase_shape);
            QkState { t: s.t, phase_c: s.phase_c, phase_shape: s.phase_shape, q, q_dot }
        })
        .collect()
}

/// `theta(t) = int C/I dt + theta0 - int (2/3)(zeta ∧ zeta_dot)/N dt`.
pub fn theta_of_t(traj: &ReducedTrajectory, theta0: f64) -> Vec<f64> {
    traj.samples.iter().map(|s| s.phase_c + theta0 - s.phase_shape).collect()
}

/// `Q_k = exp(-i int C/I dt) q_k / sqrt(I)` from Cartesian positions.
pub fn qk_of_cartesian(state: &CartesianState, phase_c: f64) -> [Complex64; 3] {
    let scale = Complex64::from_polar(1.0 / state.moment_of_inertia().sqrt(), -phase_c);
    state.q.map(|z| scale * z)
}

/// The same sample's `Q_k` computed from the Cartesian reconstruction at the
/// integrated angle.
pub fn qk_via_cartesian(r: &ReducedState, phase_c: f64) -> [Complex64; 3] {
    qk_of_cartesian(&cartesian_of_reduced(r, 0.0), phase_c)
}

/// Three evaluations of the shape kinetic energy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShapeEnergy {
    /// Total kinetic energy minus the size and rotation parts.
    pub from_split: f64,
    /// `(I/6)|zeta_dot|^2 / N^2`.
    pub from_shape: f64,
    /// `(I/2) sum |Q_k_dot|^2`.
    pub from_qk: f64,
}

impl ShapeEnergy {
    pub fn max_defect(&self) -> f64 {
        let scale = 1f64.max(self.from_shape.abs());
        ((self.from_split - self.from_shape).abs().max((self.from_qk - self.from_shape).abs())) / scale
    }
}

pub fn shape_energy(r: &ReducedState, c: f64) -> ShapeEnergy {
    let cart = cartesian_of_reduced(r, 0.0);
    let (size, rotation, from_shape) = match kinetic_split(r, c) {
        Ok(k) => (k.size, k.rotation, k.shape),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN),
    };
    let (_, q_dot) = qk_of_shape(r.zeta, r.zeta_dot, 0.0, 0.0);
    ShapeEnergy {
        from_split: 0.5 * cart.twice_kinetic() - size - rotation,
        from_shape,
        from_qk: 0.5 * r.i * q_dot.iter().map(|z| z.norm_sqr()).sum::<f64>(),
    }
}
