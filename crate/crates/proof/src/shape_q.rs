//! The level-set polynomial `Q(X, Y, M0)`: the cleared-denominator form of
//! `mu(x, y) = mu0` written in `X = x^2`, `Y = y^2`.

use num_rational::BigRational;

use crate::error::ProofError;
use crate::measure::{self, elim_vars};
use crate::poly::MultiPoly;
use crate::rational::RationalFn;

/// Builds `Q` term by term from its expanded form.
pub fn build_q() -> MultiPoly {
    let v = elim_vars();
    let x = v.var("X");
    let y = v.var("Y");
    let m0 = v.var("M0");
    let c = |k: i64| MultiPoly::constant(v, k);
    let s = |k: i64, p: &MultiPoly| p.scale(&k.into());

    let free = c(27)
        + s(64, &x.pow(3))
        + s(156, &y)
        + s(208, &y.pow(2))
        + s(64, &y.pow(3))
        + s(48, &(&x.pow(2) * &(c(3) + s(4, &y))))
        + s(4, &(&x * &(c(27) + s(88, &y) + s(48, &y.pow(2)))));
    let bracket = s(16, &x.pow(2))
        + s(8, &(&x * &(c(-1) + s(4, &y))))
        + (c(1) + s(4, &y)).pow(2);
    free - s(6, &(&m0 * &bracket))
}

/// Returns the constant `c` with `Q = c * D₋ D₊ (mu - mu0)`, or an error if the
/// ratio is not a constant.
pub fn identity_constant(q: &MultiPoly) -> Result<BigRational, ProofError> {
    let raw = measure::raw_vars();
    let q_raw = RationalFn::from_poly(measure::from_squares(q));
    let m0 = RationalFn::from_poly(raw.var("M0"));
    let rhs = measure::d_minus()
        .mul(&measure::d_plus())
        .mul(&measure::mu_exact().sub(&m0));
    let ratio = q_raw.div(&rhs)?;
    ratio.as_constant().ok_or_else(|| {
        ProofError::mismatch("build_Q", format!("Q / (D₋D₊(mu - mu0)) is not constant: {ratio:?}"))
    })
}
