//! The configurational measure for the inverse-square potential as an exact
//! rational function of the shape coordinates, and its partial derivatives.
//!
//! With `D∓ = (x ∓ 1/2)^2 + y^2` and `N = 1/2 + (2/3)(x^2 + y^2)`,
//! `mu = N (D₋D₊ + D₋ + D₊) / (D₋D₊)`.

use std::sync::OnceLock;

use crate::poly::{MultiPoly, VarSet};
use crate::rational::RationalFn;

pub const X: usize = 0;
pub const Y: usize = 1;
pub const C2: usize = 2;
pub const K2: usize = 3;
pub const M0: usize = 4;

/// Raw ring: shape coordinates `x, y` plus the parameters `C2 = C^2`, `K2 = k^2`, `M0 = mu0`.
pub fn raw_vars() -> &'static VarSet {
    static V: OnceLock<VarSet> = OnceLock::new();
    V.get_or_init(|| VarSet::new(&["x", "y", "C2", "K2", "M0"]))
}

/// Elimination ring: `X = x^2`, `Y = y^2`, same parameters; lex order X > Y > C2 > K2 > M0.
pub fn elim_vars() -> &'static VarSet {
    static V: OnceLock<VarSet> = OnceLock::new();
    V.get_or_init(|| VarSet::new(&["X", "Y", "C2", "K2", "M0"]))
}

/// `x -> X` with exponent halving, identity on the parameters.
pub fn to_squares(p: &MultiPoly) -> Option<MultiPoly> {
    p.remap(
        elim_vars(),
        &[Some((X, 2)), Some((Y, 2)), Some((C2, 1)), Some((K2, 1)), Some((M0, 1))],
    )
}

/// Inverse of [`to_squares`]: `X -> x^2`, `Y -> y^2`.
pub fn from_squares(p: &MultiPoly) -> MultiPoly {
    let mut terms = Vec::with_capacity(p.len());
    for (e, c) in p.terms() {
        let mut e2 = *e;
        e2[X] *= 2;
        e2[Y] *= 2;
        terms.push((e2, c.clone()));
    }
    MultiPoly::from_terms(raw_vars(), terms)
}

/// Integer-coefficient building blocks: `4 D₋`, `4 D₊`, `6 N`.
pub struct Atoms {
    pub d_minus4: MultiPoly,
    pub d_plus4: MultiPoly,
    pub n6: MultiPoly,
}

pub fn atoms() -> Atoms {
    let v = raw_vars();
    let x = v.var("x");
    let y = v.var("y");
    let c = |k: i64| MultiPoly::constant(v, k);
    let r2 = &x * &x + &y * &y;
    let four_r2 = r2.scale(&4.into());
    Atoms {
        d_minus4: &four_r2 - &x.scale(&4.into()) + c(1),
        d_plus4: &four_r2 + &x.scale(&4.into()) + c(1),
        n6: &four_r2 + c(3),
    }
}

/// `D₋ = (x - 1/2)^2 + y^2` as an exact rational function.
pub fn d_minus() -> RationalFn {
    RationalFn::new(atoms().d_minus4, MultiPoly::constant(raw_vars(), 4)).unwrap()
}

/// `D₊ = (x + 1/2)^2 + y^2`.
pub fn d_plus() -> RationalFn {
    RationalFn::new(atoms().d_plus4, MultiPoly::constant(raw_vars(), 4)).unwrap()
}

/// `N = 1/2 + (2/3)(x^2 + y^2)`.
pub fn shape_norm() -> RationalFn {
    RationalFn::new(atoms().n6, MultiPoly::constant(raw_vars(), 6)).unwrap()
}

/// `mu(x, y)` for the inverse-square potential, in lowest terms.
pub fn mu_exact() -> RationalFn {
    let dm = d_minus();
    let dp = d_plus();
    let prod = dm.mul(&dp);
    let inner = prod.add(&dm).add(&dp);
    shape_norm().mul(&inner).div(&prod).expect("D₋D₊ is not the zero function")
}

/// Exact partial derivatives of `mu` up to second order.
#[derive(Clone, Debug)]
pub struct ExactDerivatives {
    pub mu: RationalFn,
    pub mu_x: RationalFn,
    pub mu_y: RationalFn,
    pub mu_xx: RationalFn,
    pub mu_xy: RationalFn,
    pub mu_yy: RationalFn,
}

pub fn exact_derivatives() -> ExactDerivatives {
    let mu = mu_exact();
    let mu_x = mu.diff(X);
    let mu_y = mu.diff(Y);
    let mu_xx = mu_x.diff(X);
    let mu_xy = mu_x.diff(Y);
    let mu_yy = mu_y.diff(Y);
    ExactDerivatives {
        mu,
        mu_x,
        mu_y,
        mu_xx,
        mu_xy,
        mu_yy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn at(x: BigRational, y: BigRational) -> Vec<BigRational> {
        vec![x, y, BigRational::zero(), BigRational::zero(), BigRational::zero()]
    }

    #[test]
    fn mu_at_central_configurations() {
        let mu = mu_exact();
        // equilateral: x = 0, y^2 = 3/4
        let sq = at(q(0, 1), q(3, 4));
        assert_eq!(mu.eval_at_squares(&sq).unwrap(), q(3, 1));
        assert_eq!(mu.eval_rational(&at(q(0, 1), q(0, 1))).unwrap(), q(9, 2));
        assert_eq!(mu.eval_rational(&at(q(3, 2), q(0, 1))).unwrap(), q(9, 2));
    }

    #[test]
    fn gradient_vanishes_at_euler_points() {
        let d = exact_derivatives();
        for p in [at(q(0, 1), q(0, 1)), at(q(3, 2), q(0, 1)), at(q(-3, 2), q(0, 1))] {
            assert!(d.mu_x.eval_rational(&p).unwrap().is_zero());
            assert!(d.mu_y.eval_rational(&p).unwrap().is_zero());
        }
    }

    #[test]
    fn mu_is_even_with_expected_denominator() {
        let mu = mu_exact();
        assert!(mu.numer().is_even_in(X) && mu.numer().is_even_in(Y));
        let a = atoms();
        let expected = (&a.d_minus4 * &a.d_plus4).scale(&6.into());
        assert_eq!(mu.denom(), &expected);
    }
}
