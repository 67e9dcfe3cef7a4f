//! Size, rotation and shape coordinates for three unit masses in the plane.
//!
//! Positions are complex numbers. The shape variable is the ratio of Jacobi
//! vectors `zeta = (3/2) q3 / (q2 - q1)`, and a configuration is rebuilt as
//! `q_k = sqrt(I) e^{i theta} xi_k / sqrt(N)` with
//! `xi = (-1/2 - zeta/3, 1/2 - zeta/3, 2 zeta/3)` and `N = sum |xi_k|^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Distance from `zeta = ±1/2` below which a state counts as a binary collision.
pub const COLLISION_TOL: f64 = 1e-12;
/// Center-of-mass correction above which [`CartesianState::new`] logs a warning.
pub const CM_WARN_TOL: f64 = 1e-9;

/// Planar wedge product `(a + ib) ∧ (c + id) = ad - bc`.
pub fn wedge(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Exponent of the homogeneous potential `U = sum r_ij^-alpha`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    /// The inverse-square (strong force) case.
    pub const STRONG: Alpha = Alpha(2.0);

    pub fn new(alpha: f64) -> Result<Self, CoreError> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Alpha(alpha))
        } else {
            Err(CoreError::InvalidInput(format!("alpha must be positive and finite, got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_strong(self) -> bool {
        self.0 == 2.0
    }
}

impl TryFrom<f64> for Alpha {
    type Error = CoreError;
    fn try_from(a: f64) -> Result<Self, Self::Error> {
        Alpha::new(a)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Positions and velocities of the three bodies in the center-of-mass frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CartesianState {
    pub q: [Complex64; 3],
    pub v: [Complex64; 3],
    pub t: f64,
}

impl CartesianState {
    /// Projects positions and velocities onto the zero-center-of-mass subspace.
    pub fn new(q: [Complex64; 3], v: [Complex64; 3], t: f64) -> Self {
        let cq = (q[0] + q[1] + q[2]) / 3.0;
        let cv = (v[0] + v[1] + v[2]) / 3.0;
        if cq.norm() > CM_WARN_TOL || cv.norm() > CM_WARN_TOL {
            log::warn!(
                "center of mass corrected by |dq| = {:.3e}, |dv| = {:.3e}",
                cq.norm(),
                cv.norm()
            );
        }
        CartesianState {
            q: q.map(|z| z - cq),
            v: v.map(|z| z - cv),
            t,
        }
    }

    pub fn moment_of_inertia(&self) -> f64 {
        self.q.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `K = sum |v_k|^2`, twice the kinetic energy.
    pub fn twice_kinetic(&self) -> f64 {
        self.v.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn potential(&self, alpha: Alpha) -> Result<f64, CoreError> {
        let mut u = 0.0;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let r = (self.q[i] - self.q[j]).norm();
            if r == 0.0 {
                return Err(CoreError::Singular(format!("bodies {} and {} coincide", i + 1, j + 1)));
            }
            u += r.powf(-alpha.value());
        }
        Ok(u)
    }

    /// `sum q_k ∧ v_k`.
    pub fn angular_momentum(&self) -> f64 {
        self.q.iter().zip(&self.v).map(|(&q, &v)| wedge(q, v)).sum()
    }

    pub fn min_pair_distance(&self) -> f64 {
        [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| (self.q[i] - self.q[j]).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Applies `q -> lambda e^{i phi} q` (and the same to velocities).
    pub fn scaled_rotated(&self, lambda: f64, phi: f64) -> Self {
        let f = Complex64::from_polar(lambda, phi);
        CartesianState {
            q: self.q.map(|z| z * f),
            v: self.v.map(|z| z * f),
            t: self.t,
        }
    }
}

/// Size, orientation and shape with their rates.
///
/// `theta_dot` is carried explicitly so the state determines the angular momentum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub i: f64,
    pub i_dot: f64,
    pub theta: f64,
    pub theta_dot: f64,
    #[serde(with = "complex_pair")]
    pub zeta: Complex64,
    #[serde(with = "complex_pair")]
    pub zeta_dot: Complex64,
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// `N(zeta) = 1/2 + (2/3)|zeta|^2`.
pub fn shape_norm(zeta: Complex64) -> f64 {
    0.5 + 2.0 / 3.0 * zeta.norm_sqr()
}

/// `dN/dt = (4/3) Re(conj(zeta) zeta_dot)`.
pub fn shape_norm_rate(zeta: Complex64, zeta_dot: Complex64) -> f64 {
    4.0 / 3.0 * (zeta.conj() * zeta_dot).re
}

pub fn shape_of_cartesian(s: &CartesianState) -> Result<Complex64, CoreError> {
    let z1 = s.q[1] - s.q[0];
    if z1.norm() == 0.0 {
        return Err(CoreError::DegenerateShape);
    }
    Ok(1.5 * s.q[2] / z1)
}

pub fn xi_of_zeta(zeta: Complex64) -> [Complex64; 3] {
    let third = zeta / 3.0;
    [
        Complex64::new(-0.5, 0.0) - third,
        Complex64::new(0.5, 0.0) - third,
        2.0 * third,
    ]
}

/// `eta_k = xi_k / sqrt(N)`, the unit-size normalized vertices.
pub fn eta_of_zeta(zeta: Complex64) -> [Complex64; 3] {
    let n = shape_norm(zeta).sqrt();
    xi_of_zeta(zeta).map(|x| x / n)
}

/// Time derivatives of `eta_k` along `zeta_dot`.
pub fn eta_rate(zeta: Complex64, zeta_dot: Complex64) -> [Complex64; 3] {
    let n = shape_norm(zeta);
    let n_dot = shape_norm_rate(zeta, zeta_dot);
    let xi = xi_of_zeta(zeta);
    let xi_dot = [-zeta_dot / 3.0, -zeta_dot / 3.0, 2.0 * zeta_dot / 3.0];
    let s = n.sqrt();
    [0, 1, 2].map(|k| xi_dot[k] / s - xi[k] * (0.5 * n_dot / (n * s)))
}

pub fn check_collision(zeta: Complex64) -> Result<(), CoreError> {
    let half = Complex64::new(0.5, 0.0);
    if (zeta - half).norm() < COLLISION_TOL || (zeta + half).norm() < COLLISION_TOL {
        return Err(CoreError::Collision { x: zeta.re, y: zeta.im });
    }
    Ok(())
}

/// Cartesian positions and velocities realizing a reduced state.
pub fn cartesian_of_reduced(r: &ReducedState, t: f64) -> CartesianState {
    let n = shape_norm(r.zeta);
    let n_dot = shape_norm_rate(r.zeta, r.zeta_dot);
    let a = (r.i / n).sqrt();
    let a_dot = if r.i > 0.0 { 0.5 * a * (r.i_dot / r.i - n_dot / n) } else { 0.0 };
    let rot = Complex64::from_polar(1.0, r.theta);
    let xi = xi_of_zeta(r.zeta);
    let xi_dot = [-r.zeta_dot / 3.0, -r.zeta_dot / 3.0, 2.0 * r.zeta_dot / 3.0];
    let i_unit = Complex64::i();
    let q = xi.map(|x| rot * a * x);
    let v = [0, 1, 2].map(|k| rot * (i_unit * r.theta_dot * a * xi[k] + a_dot * xi[k] + a * xi_dot[k]));
    CartesianState { q, v, t }
}

/// Inverse of [`cartesian_of_reduced`], with `theta = arg(q2 - q1)`.
pub fn reduced_of_cartesian(s: &CartesianState) -> Result<ReducedState, CoreError> {
    let z1 = s.q[1] - s.q[0];
    if z1.norm() == 0.0 {
        return Err(CoreError::DegenerateShape);
    }
    let z1_dot = s.v[1] - s.v[0];
    let zeta = 1.5 * s.q[2] / z1;
    let zeta_dot = 1.5 * (s.v[2] * z1 - s.q[2] * z1_dot) / (z1 * z1);
    let i = s.moment_of_inertia();
    let i_dot = 2.0 * s.q.iter().zip(&s.v).map(|(q, v)| (q.conj() * v).re).sum::<f64>();
    Ok(ReducedState {
        i,
        i_dot,
        theta: z1.arg(),
        theta_dot: (z1_dot / z1).im,
        zeta,
        zeta_dot,
    })
}

/// `mu(zeta) = N^{alpha/2} (1 + |zeta - 1/2|^-alpha + |zeta + 1/2|^-alpha)`.
pub fn measure_mu(zeta: Complex64, alpha: Alpha) -> Result<f64, CoreError> {
    check_collision(zeta)?;
    let a = alpha.value();
    let half = Complex64::new(0.5, 0.0);
    let s = 1.0 + (zeta - half).norm().powf(-a) + (zeta + half).norm().powf(-a);
    Ok(shape_norm(zeta).powf(a / 2.0) * s)
}

/// `C = I (theta_dot + (2/3)(zeta ∧ zeta_dot) / N)`.
pub fn angular_momentum(r: &ReducedState) -> f64 {
    r.i * (r.theta_dot + 2.0 / 3.0 * wedge(r.zeta, r.zeta_dot) / shape_norm(r.zeta))
}

/// Size, rotation and shape parts of the kinetic energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticSplit {
    pub size: f64,
    pub rotation: f64,
    pub shape: f64,
}

impl KineticSplit {
    pub fn total(&self) -> f64 {
        self.size + self.rotation + self.shape
    }
}

pub fn kinetic_split(r: &ReducedState, c: f64) -> Result<KineticSplit, CoreError> {
    if r.i <= 0.0 {
        return Err(CoreError::Singular("moment of inertia must be positive".into()));
    }
    let n = shape_norm(r.zeta);
    Ok(KineticSplit {
        size: r.i_dot * r.i_dot / (8.0 * r.i),
        rotation: c * c / (2.0 * r.i),
        shape: r.i / 6.0 * r.zeta_dot.norm_sqr() / (n * n),
    })
}

/// Shape energy written with the normalized vertices:
/// `(I/2) sum |eta_dot|^2 - (I/2) (sum eta ∧ eta_dot)^2`.
pub fn shape_energy_eta(i: f64, zeta: Complex64, zeta_dot: Complex64) -> f64 {
    let eta = eta_of_zeta(zeta);
    let eta_dot = eta_rate(zeta, zeta_dot);
    let kin: f64 = eta_dot.iter().map(|z| z.norm_sqr()).sum();
    let rot: f64 = eta.iter().zip(&eta_dot).map(|(&a, &b)| wedge(a, b)).sum();
    0.5 * i * kin - 0.5 * i * rot * rot
}

/// `E = K/2 - U/alpha`.
pub fn total_energy(s: &CartesianState, alpha: Alpha) -> Result<f64, CoreError> {
    Ok(0.5 * s.twice_kinetic() - s.potential(alpha)? / alpha.value())
}

/// Energy from reduced variables: kinetic split minus `mu I^{-alpha/2} / alpha`.
pub fn reduced_energy(r: &ReducedState, alpha: Alpha) -> Result<f64, CoreError> {
    let c = angular_momentum(r);
    let k = kinetic_split(r, c)?;
    let mu = measure_mu(r.zeta, alpha)?;
    Ok(k.total() - mu * r.i.powf(-alpha.value() / 2.0) / alpha.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn equilateral() -> CartesianState {
        let s3 = 3f64.sqrt();
        CartesianState::new(
            [c(-0.5, -s3 / 6.0), c(0.5, -s3 / 6.0), c(0.0, s3 / 3.0)],
            [Complex64::default(); 3],
            0.0,
        )
    }

    #[test]
    fn shape_of_reference_triangles() {
        let z = shape_of_cartesian(&equilateral()).unwrap();
        assert!((z - c(0.0, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        let line = CartesianState::new([c(-0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)], [Complex64::default(); 3], 0.0);
        assert_eq!(shape_of_cartesian(&line).unwrap(), c(0.0, 0.0));
        let degenerate = CartesianState::new([c(0.0, 0.0); 3], [Complex64::default(); 3], 0.0);
        assert_eq!(shape_of_cartesian(&degenerate), Err(CoreError::DegenerateShape));
    }

    #[test]
    fn xi_at_reference_shapes() {
        let xi = xi_of_zeta(c(0.0, 0.0));
        assert_eq!(xi, [c(-0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let xi = xi_of_zeta(c(0.0, 3f64.sqrt() / 2.0));
        assert!((xi[2] - c(0.0, 3f64.sqrt() / 3.0)).norm() < 1e-15);
        assert!((xi[0].norm() - xi[2].norm()).abs() < 1e-15);
        assert!((xi[1].norm() - xi[2].norm()).abs() < 1e-15);
    }

    #[test]
    fn mu_reference_values() {
        let a = Alpha::STRONG;
        assert!((measure_mu(c(0.0, 3f64.sqrt() / 2.0), a).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(measure_mu(c(0.0, 0.0), a).unwrap(), 4.5);
        assert!((measure_mu(c(1.5, 0.0), a).unwrap() - 4.5).abs() < 1e-14);
        assert!(matches!(measure_mu(c(0.5, 0.0), a), Err(CoreError::Collision { .. })));
    }

    #[test]
    fn rest_energy_of_unit_equilateral() {
        assert!((total_energy(&equilateral(), Alpha::STRONG).unwrap() + 1.5).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_scales_and_rotates() {
        let zeta = c(0.3, 0.7);
        let base = ReducedState { i: 1.0, i_dot: 0.0, theta: 0.0, theta_dot: 0.0, zeta, zeta_dot: c(0.0, 0.0) };
        let moved = ReducedState { i: 4.0, theta: PI / 2.0, ..base };
        let a = cartesian_of_reduced(&base, 0.0);
        let b = cartesian_of_reduced(&moved, 0.0);
        for k in 0..3 {
            assert!((b.q[k] - a.q[k] * c(0.0, 2.0)).norm() < 1e-14);
        }
        assert!((a.moment_of_inertia() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn angular_momentum_reference_cases() {
        let r = ReducedState { i: 2.0, i_dot: 0.0, theta: 0.0, theta_dot: 0.7, zeta: c(0.1, 0.9), zeta_dot: c(0.0, 0.0) };
        assert!((angular_momentum(&r) - 1.4).abs() < 1e-15);
        let zeta_dot = c(0.3, -0.2);
        let td = -2.0 / 3.0 * wedge(r.zeta, zeta_dot) / shape_norm(r.zeta);
        let r0 = ReducedState { theta_dot: td, zeta_dot, ..r };
        assert!(angular_momentum(&r0).abs() < 1e-15);
    }

    #[test]
    fn kinetic_split_at_rest_shape() {
        let r = ReducedState { i: 2.0, i_dot: 0.0, theta: 0.0, theta_dot: 0.5, zeta: c(0.2, 0.8), zeta_dot: c(0.0, 0.0) };
        let k = kinetic_split(&r, 3.0).unwrap();
        assert_eq!((k.size, k.shape), (0.0, 0.0));
        assert_eq!(k.rotation, 9.0 / 4.0);
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::new(0.0).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::new(1.0).is_ok());
        assert!(Alpha::STRONG.is_strong());
    }
}
