//! Exact rational functions over the integers, kept in lowest terms.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::ProofError;
use crate::gcd::gcd;
use crate::poly::{MultiPoly, VarSet};

/// `num / den` with `gcd(num, den) = 1` and `den` having a positive leading coefficient.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFn {
    num: MultiPoly,
    den: MultiPoly,
}

impl RationalFn {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self, ProofError> {
        if den.is_zero() {
            return Err(ProofError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    pub fn from_poly(p: MultiPoly) -> Self {
        let den = MultiPoly::one(p.vars());
        RationalFn { num: p, den }
    }

    pub fn constant(vars: &VarSet, num: i64, den: i64) -> Self {
        Self::new(MultiPoly::constant(vars, num), MultiPoly::constant(vars, den))
            .expect("nonzero constant denominator")
    }

    fn reduce(num: MultiPoly, den: MultiPoly) -> Self {
        if num.is_zero() {
            let one = MultiPoly::one(den.vars());
            return RationalFn { num, den: one };
        }
        let g = gcd(&num, &den);
        let mut num = num.div_exact(&g).expect("gcd divides numerator");
        let mut den = den.div_exact(&g).expect("gcd divides denominator");
        if den.leading_coeff().is_negative() {
            num = -num;
            den = -den;
        }
        RationalFn { num, den }
    }

    pub fn numer(&self) -> &MultiPoly {
        &self.num
    }

    pub fn denom(&self) -> &MultiPoly {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The value as an exact rational number when it does not depend on any variable.
    pub fn as_constant(&self) -> Option<BigRational> {
        Some(BigRational::new(self.num.as_constant()?, self.den.as_constant()?))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self::reduce(&self.num + &rhs.num, self.den.clone());
        }
        Self::reduce(
            &self.num * &rhs.den + &rhs.num * &self.den,
            &self.den * &rhs.den,
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        RationalFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        // cross-cancel first to keep the products small
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = rhs.den.div_exact(&g1).unwrap();
        let n2 = rhs.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let mut num = &n1 * &n2;
        let mut den = &d1 * &d2;
        if den.leading_coeff().is_negative() {
            num = -num;
            den = -den;
        }
        RationalFn { num, den }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, ProofError> {
        Ok(self.mul(&rhs.recip()?))
    }

    pub fn recip(&self) -> Result<Self, ProofError> {
        if self.num.is_zero() {
            return Err(ProofError::ZeroDenominator);
        }
        let (mut num, mut den) = (self.den.clone(), self.num.clone());
        if den.leading_coeff().is_negative() {
            num = -num;
            den = -den;
        }
        Ok(RationalFn { num, den })
    }

    pub fn scale(&self, num: i64, den: i64) -> Self {
        self.mul(&Self::constant(self.vars(), num, den))
    }

    pub fn pow(&self, n: u32) -> Self {
        RationalFn {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    /// Partial derivative by the quotient rule, reduced.
    pub fn diff(&self, var: usize) -> Self {
        let num = &self.num.diff(var) * &self.den - &self.num * &self.den.diff(var);
        Self::reduce(num, &self.den * &self.den)
    }

    pub fn eval_rational(&self, values: &[BigRational]) -> Result<BigRational, ProofError> {
        let d = self.den.eval_rational(values);
        if d.is_zero() {
            return Err(ProofError::ZeroDenominator);
        }
        Ok(self.num.eval_rational(values) / d)
    }

    /// Evaluates with variable `i` replaced by the square root of `squares[i]`.
    /// Only valid when every variable occurs with even exponents.
    pub fn eval_at_squares(&self, squares: &[BigRational]) -> Result<BigRational, ProofError> {
        let n = self.vars().len();
        let halve: Vec<Option<(usize, u16)>> = (0..n).map(|i| Some((i, 2))).collect();
        let (Some(num), Some(den)) = (
            self.num.remap(self.vars(), &halve),
            self.den.remap(self.vars(), &halve),
        ) else {
            return Err(ProofError::Consistency(
                "odd exponent in evaluation at square roots".into(),
            ));
        };
        let d = den.eval_rational(squares);
        if d.is_zero() {
            return Err(ProofError::ZeroDenominator);
        }
        Ok(num.eval_rational(squares) / d)
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.num.eval_f64(values) / self.den.eval_f64(values)
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
