//! Named initial data: the rotating equilateral triangle and seeded
//! near-equilateral states for property tests.
//!
//! The near-equilateral generator is an arbitrary choice of test orbits, not
//! a catalogue of physically distinguished solutions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{integrate_reduced, Horizon, IntegratorConfig};
use crate::error::CoreError;
use crate::ode::StepControl;
use crate::reduction::{cartesian_of_reduced, reduced_energy, Alpha, CartesianState, ReducedState};

/// Shape of the equilateral triangle with positive orientation.
pub fn equilateral_shape() -> Complex64 {
    Complex64::new(0.0, 3f64.sqrt() / 2.0)
}

/// Angular speed of the rigidly rotating equilateral triangle of side `r`:
/// `omega^2 = 3 r^{-alpha-2}`.
pub fn lagrange_omega(alpha: Alpha, r: f64) -> f64 {
    (3.0 * r.powf(-alpha.value() - 2.0)).sqrt()
}

/// Rotating equilateral triangle of side `r`, in reduced variables.
pub fn lagrange_rotating(alpha: Alpha, r: f64) -> ReducedState {
    ReducedState {
        i: r * r,
        i_dot: 0.0,
        theta: 0.0,
        theta_dot: lagrange_omega(alpha, r),
        zeta: equilateral_shape(),
        zeta_dot: Complex64::default(),
    }
}

/// Rotating equilateral triangle of side `r` built directly in the plane.
pub fn lagrange_rotating_cartesian(alpha: Alpha, r: f64) -> CartesianState {
    let w = lagrange_omega(alpha, r);
    let rho = r / 3f64.sqrt();
    let q = [0, 1, 2].map(|k| Complex64::from_polar(rho, PI / 2.0 + TAU * k as f64 / 3.0));
    let v = q.map(|z| Complex64::i() * w * z);
    CartesianState::new(q, v, 0.0)
}

/// Knobs for [`near_lagrange_states`].
#[derive(Clone, Copy, Debug)]
pub struct NearLagrange {
    pub alpha: Alpha,
    pub shape_spread: f64,
    pub rate_spread: f64,
    /// Horizon over which candidates must stay away from collision.
    pub prescreen_t: f64,
    /// Minimum of `min pair distance / sqrt(I)` allowed during the prescreen.
    pub min_separation: f64,
}

impl NearLagrange {
    pub fn new(alpha: Alpha) -> Self {
        NearLagrange { alpha, shape_spread: 0.1, rate_spread: 0.1, prescreen_t: 10.0, min_separation: 0.05 }
    }
}

fn candidate(rng: &mut ChaCha8Rng, p: &NearLagrange) -> Result<Option<ReducedState>, CoreError> {
    let s = p.shape_spread;
    let v = p.rate_spread;
    let omega = lagrange_omega(p.alpha, 1.0);
    let strong = p.alpha.is_strong();
    // For alpha = 2 the circular orbit has E = 0; spin up and expand so I grows.
    let spin = if strong { rng.gen_range(0.0..v) } else { rng.gen_range(-v..v) };
    let i_dot = rng.gen_range(-v..v);
    let r = ReducedState {
        i: 1.0,
        i_dot: if strong { i_dot.abs() } else { i_dot },
        theta: rng.gen_range(0.0..TAU),
        theta_dot: omega * (1.0 + spin),
        zeta: equilateral_shape() + Complex64::new(rng.gen_range(-s..s), rng.gen_range(-s..s)),
        zeta_dot: Complex64::new(rng.gen_range(-v..v), rng.gen_range(-v..v)),
    };
    if strong && reduced_energy(&r, p.alpha)? <= 0.0 {
        return Ok(None);
    }
    Ok(Some(r))
}

fn survives(r: &ReducedState, p: &NearLagrange) -> bool {
    let cfg = IntegratorConfig {
        control: StepControl { abs_tol: 1e-9, rel_tol: 1e-9, ..StepControl::default() },
        horizon: Horizon::Time(p.prescreen_t),
        output_interval: 0.05,
    };
    let Ok(traj) = integrate_reduced(r, &cfg, p.alpha) else { return false };
    traj.truncated.is_none()
        && traj.samples.iter().all(|smp| {
            let c = cartesian_of_reduced(&smp.state, smp.t);
            c.min_pair_distance() / smp.state.i.sqrt() >= p.min_separation
        })
}

/// `count` seeded near-equilateral states that pass a collision prescreen.
pub fn near_lagrange_states(p: &NearLagrange, count: usize, seed: u64) -> Result<Vec<ReducedState>, CoreError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0usize;
    while out.len() < count {
        tries += 1;
        if tries > 200 * count.max(1) {
            return Err(CoreError::InvalidInput(format!("only {} of {count} fixtures passed the prescreen", out.len())));
        }
        if let Some(r) = candidate(&mut rng, p)? {
            if survives(&r, p) {
                out.push(r);
            }
        }
    }
    Ok(out)
}
