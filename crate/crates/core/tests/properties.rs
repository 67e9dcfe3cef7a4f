use num_complex::Complex64;
use proptest::prelude::*;

use saari_core::dynamics::{
    core_of_reduced, reduced_rhs, saari_residual_s, saari_terms, saari_terms_cartesian, wedge_identity_residual,
};
use saari_core::geometry::mu_derivatives;
use saari_core::qk::{qk_of_shape, shape_energy};
use saari_core::reduction::{
    angular_momentum, cartesian_of_reduced, kinetic_split, measure_mu, reduced_energy, reduced_of_cartesian,
    total_energy, Alpha, CartesianState, ReducedState,
};

fn alpha() -> impl Strategy<Value = Alpha> {
    prop_oneof![Just(1.0), Just(2.0), Just(3.0), 0.3f64..4.0].prop_map(|a| Alpha::new(a).unwrap())
}

/// Shapes kept at least 0.1 away from the binary collisions at `±1/2`.
fn shape() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0)
        .prop_map(|(x, y)| Complex64::new(x, y))
        .prop_filter("near collision", |z| (z - 0.5).norm() > 0.1 && (z + 0.5).norm() > 0.1)
}

fn rate() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y)| Complex64::new(x, y))
}

fn reduced() -> impl Strategy<Value = ReducedState> {
    (0.2f64..5.0, -2.0f64..2.0, -3.0f64..3.0, -2.0f64..2.0, shape(), rate()).prop_map(
        |(i, i_dot, theta, theta_dot, zeta, zeta_dot)| ReducedState { i, i_dot, theta, theta_dot, zeta, zeta_dot },
    )
}

/// `I^{a/2} U` from pairwise distances, with `I` the moment of inertia about the centre of mass.
fn mu_from_distances(q: &[Complex64; 3], a: f64) -> f64 {
    let i: f64 = q.iter().map(|z| z.norm_sqr()).sum();
    let u: f64 = [(0, 1), (0, 2), (1, 2)].iter().map(|&(j, k)| (q[j] - q[k]).norm().powf(-a)).sum();
    i.powf(a / 2.0) * u
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mu_matches_pairwise_distances(r in reduced(), a in alpha()) {
        let q = cartesian_of_reduced(&r, 0.0).q;
        let mu = measure_mu(r.zeta, a).unwrap();
        prop_assert!(close(mu, mu_from_distances(&q, a.value()), 1e-12));
    }

    #[test]
    fn mu_is_even_in_each_coordinate(z in shape(), a in alpha()) {
        let mu = measure_mu(z, a).unwrap();
        for w in [z.conj(), -z, -z.conj()] {
            prop_assert!(close(mu, measure_mu(w, a).unwrap(), 1e-14));
        }
    }

    #[test]
    fn mu_is_at_least_three(z in shape(), a in alpha()) {
        prop_assert!(measure_mu(z, a).unwrap() >= 3.0 - 1e-12);
    }

    #[test]
    fn derivatives_match_finite_differences(z in shape(), a in alpha()) {
        let h = 1e-5;
        let d = mu_derivatives(z.re, z.im, a).unwrap();
        let mu = |x: f64, y: f64| measure_mu(Complex64::new(x, y), a).unwrap();
        let at = |x: f64, y: f64| mu_derivatives(x, y, a).unwrap();
        let fx = (mu(z.re + h, z.im) - mu(z.re - h, z.im)) / (2.0 * h);
        let fy = (mu(z.re, z.im + h) - mu(z.re, z.im - h)) / (2.0 * h);
        prop_assert!(close(d.mu, mu(z.re, z.im), 1e-13));
        prop_assert!(close(d.mu_x, fx, 1e-6), "{} {}", d.mu_x, fx);
        prop_assert!(close(d.mu_y, fy, 1e-6), "{} {}", d.mu_y, fy);
        let h = 1e-6;
        let fxx = (at(z.re + h, z.im).mu_x - at(z.re - h, z.im).mu_x) / (2.0 * h);
        let fyx = (at(z.re, z.im + h).mu_x - at(z.re, z.im - h).mu_x) / (2.0 * h);
        let fxy = (at(z.re + h, z.im).mu_y - at(z.re - h, z.im).mu_y) / (2.0 * h);
        let fyy = (at(z.re, z.im + h).mu_y - at(z.re, z.im - h).mu_y) / (2.0 * h);
        prop_assert!(close(d.mu_xx, fxx, 1e-6), "{} {}", d.mu_xx, fxx);
        prop_assert!(close(d.mu_yy, fyy, 1e-6));
        prop_assert!(close(d.mu_xy, fyx, 1e-6));
        prop_assert!(close(d.mu_xy, fxy, 1e-6));
    }

    #[test]
    fn reduction_round_trip(r in reduced()) {
        let back = reduced_of_cartesian(&cartesian_of_reduced(&r, 0.0)).unwrap();
        prop_assert!(close(back.i, r.i, 1e-12));
        prop_assert!(close(back.i_dot, r.i_dot, 1e-12));
        prop_assert!((Complex64::from_polar(1.0, back.theta) - Complex64::from_polar(1.0, r.theta)).norm() < 1e-12);
        prop_assert!(close(back.theta_dot, r.theta_dot, 1e-11));
        prop_assert!((back.zeta - r.zeta).norm() < 1e-12);
        prop_assert!((back.zeta_dot - r.zeta_dot).norm() < 1e-11);
    }

    #[test]
    fn reduced_invariants_match_cartesian(r in reduced(), a in alpha()) {
        let s = cartesian_of_reduced(&r, 0.0);
        prop_assert!(close(angular_momentum(&r), s.angular_momentum(), 1e-12));
        prop_assert!(close(reduced_energy(&r, a).unwrap(), total_energy(&s, a).unwrap(), 1e-12));
        let split = kinetic_split(&r, angular_momentum(&r)).unwrap();
        prop_assert!(close(split.total(), 0.5 * s.twice_kinetic(), 1e-12));
    }

    #[test]
    fn saari_relation_holds_on_the_flow(r in reduced(), a in alpha()) {
        let c = angular_momentum(&r);
        let e = reduced_energy(&r, a).unwrap();
        let core = core_of_reduced(&r);
        let t = saari_terms(&core, c, e, a).unwrap();
        prop_assert!(t.scaled_residual().abs() < 1e-12, "{t:?}");
        prop_assert!(saari_residual_s(&core, c, e, a).unwrap().abs() < 1e-11 * t.shape_power.abs().max(1.0) * r.i);
    }

    #[test]
    fn saari_relation_holds_for_newtonian_accelerations(r in reduced(), a in alpha()) {
        let t = saari_terms_cartesian(&cartesian_of_reduced(&r, 0.0), a).unwrap();
        prop_assert!(t.scaled_residual().abs() < 1e-10, "{t:?}");
    }

    #[test]
    fn wedge_identity_holds(r in reduced(), a in alpha()) {
        let c = angular_momentum(&r);
        let e = reduced_energy(&r, a).unwrap();
        let res = wedge_identity_residual(&core_of_reduced(&r), c, e, a).unwrap();
        let scale = r.i * r.i * (1.0 + r.zeta_dot.norm_sqr()) * (1.0 + c.abs()) * r.i.powf(1.0 - a.value() / 2.0).max(1.0);
        prop_assert!(res.abs() < 1e-11 * scale, "{res}");
    }

    #[test]
    fn reduced_rhs_matches_newtonian_flow(r in reduced(), a in alpha()) {
        // Central differences of the reduced coordinates along the exact Cartesian vector field.
        let s = cartesian_of_reduced(&r, 0.0);
        let acc = saari_core::dynamics::cartesian_accelerations(&s.q, a).unwrap();
        let h = 1e-5;
        let shift = |sign: f64| {
            let q = [0, 1, 2].map(|k| s.q[k] + sign * h * s.v[k]);
            let v = [0, 1, 2].map(|k| s.v[k] + sign * h * acc[k]);
            reduced_of_cartesian(&CartesianState { q, v, t: 0.0 }).unwrap()
        };
        let (p, m) = (shift(1.0), shift(-1.0));
        let i_ddot = (p.i_dot - m.i_dot) / (2.0 * h);
        let zeta_ddot = (p.zeta_dot - m.zeta_dot) / (2.0 * h);
        let f = reduced_rhs(&core_of_reduced(&r), angular_momentum(&r), reduced_energy(&r, a).unwrap(), a).unwrap();
        let tol = 1e-4;
        prop_assert!(close(f[0], r.i_dot, 1e-12));
        prop_assert!(close(f[1], i_ddot, tol), "{} {}", f[1], i_ddot);
        prop_assert!(close(f[2], r.theta_dot, 1e-11));
        prop_assert!(close(f[5], zeta_ddot.re, tol), "{} {}", f[5], zeta_ddot.re);
        prop_assert!(close(f[6], zeta_ddot.im, tol), "{} {}", f[6], zeta_ddot.im);
    }

    #[test]
    fn qk_normalizations(z in shape(), zd in rate(), th in -3.0f64..3.0, ph in -3.0f64..3.0) {
        let (q, q_dot) = qk_of_shape(z, zd, th, ph);
        let sum: Complex64 = q.iter().sum();
        let norm: f64 = q.iter().map(|w| w.norm_sqr()).sum();
        let spin: f64 = q.iter().zip(&q_dot).map(|(a, b)| (a.conj() * b).im).sum();
        prop_assert!(sum.norm() < 1e-13);
        prop_assert!((norm - 1.0).abs() < 1e-13);
        prop_assert!(spin.abs() < 1e-12 * (1.0 + zd.norm()));
    }

    #[test]
    fn shape_energy_three_ways(r in reduced()) {
        let e = shape_energy(&r, angular_momentum(&r));
        prop_assert!(e.max_defect() < 1e-11 * (1.0 + e.from_split.abs()), "{e:?}");
    }

    #[test]
    fn scaling_and_rotation_leave_shape_alone(r in reduced(), lam in 0.2f64..5.0, phi in -3.0f64..3.0) {
        let s = cartesian_of_reduced(&r, 0.0);
        let t = reduced_of_cartesian(&s.scaled_rotated(lam, phi)).unwrap();
        prop_assert!((t.zeta - r.zeta).norm() < 1e-12);
        prop_assert!(close(t.i, lam * lam * r.i, 1e-12));
    }
}
