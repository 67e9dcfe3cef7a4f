//! Integral domains with exact division, and dense univariate polynomials over them.
//!
//! The resultant and determinant routines are written once against [`Domain`]
//! and instantiated over `BigInt`, over dense polynomials in one symbolic
//! variable, and over [`MultiPoly`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::MultiPoly;

/// Commutative ring without zero divisors where exact quotients are computable.
pub trait Domain: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `Some(q)` with `q * rhs == self`, or `None` if `rhs` does not divide `self`.
    fn div_exact(&self, rhs: &Self) -> Option<Self>;

    fn pow(&self, n: u32) -> Self {
        let mut result = self.one_like();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }
}

impl Domain for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        if Zero::is_zero(rhs) {
            return None;
        }
        let (q, r) = self.div_rem(rhs);
        num_traits::Zero::is_zero(&r).then_some(q)
    }
}

impl Domain for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.vars())
    }
    fn one_like(&self) -> Self {
        MultiPoly::one(self.vars())
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        MultiPoly::div_exact(self, rhs)
    }
}

/// Dense univariate polynomial, lowest degree first, no trailing zeros.
///
/// `zero` carries the coefficient ring's context (the variable set for
/// `MultiPoly` coefficients).
#[derive(Clone, PartialEq, Debug)]
pub struct UniPoly<R: Domain> {
    coeffs: Vec<R>,
    zero: R,
}

impl<R: Domain> UniPoly<R> {
    pub fn new(mut coeffs: Vec<R>, zero: R) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs, zero }
    }

    pub fn zero(zero: R) -> Self {
        UniPoly {
            coeffs: Vec::new(),
            zero,
        }
    }

    pub fn constant(c: R) -> Self {
        let zero = c.zero_like();
        Self::new(vec![c], zero)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &R {
        self.coeffs.get(i).unwrap_or(&self.zero)
    }

    pub fn zero_coeff(&self) -> &R {
        &self.zero
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> &R {
        self.coeffs.last().unwrap_or(&self.zero)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect(), self.zero.clone())
    }

    fn shifted_scaled(&self, shift: usize, c: &R) -> Self {
        let mut coeffs = vec![self.zero.clone(); shift];
        coeffs.extend(self.coeffs.iter().map(|a| a.mul(c)));
        Self::new(coeffs, self.zero.clone())
    }

    /// Pseudo-remainder: `lc(divisor)^(deg self - deg divisor + 1) * self mod divisor`.
    pub fn pseudo_rem(&self, divisor: &Self) -> Self {
        let d = divisor.degree().expect("pseudo-remainder by zero polynomial");
        let Some(n) = self.degree() else {
            return self.clone();
        };
        if n < d {
            return self.clone();
        }
        let lcb = divisor.leading_coeff().clone();
        let mut r = self.clone();
        let mut e = (n - d + 1) as u32;
        while let Some(dr) = r.degree() {
            if dr < d {
                break;
            }
            let lcr = r.leading_coeff().clone();
            let lhs = r.scale(&lcb);
            let rhs = divisor.shifted_scaled(dr - d, &lcr);
            r = lhs.sub(&rhs);
            e -= 1;
        }
        if e > 0 {
            r = r.scale(&lcb.pow(e));
        }
        r
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = self.zero.clone();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }
}

impl<R: Domain> Domain for UniPoly<R> {
    fn zero_like(&self) -> Self {
        UniPoly::zero(self.zero.clone())
    }

    fn one_like(&self) -> Self {
        UniPoly::new(vec![self.zero.one_like()], self.zero.clone())
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        UniPoly::new(coeffs, self.zero.clone())
    }

    fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                (Some(a), Some(b)) => a.sub(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.neg(),
                (None, None) => unreachable!(),
            })
            .collect();
        UniPoly::new(coeffs, self.zero.clone())
    }

    fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return self.zero_like();
        }
        let mut out = vec![self.zero.clone(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::new(out, self.zero.clone())
    }

    fn neg(&self) -> Self {
        UniPoly::new(self.coeffs.iter().map(|c| c.neg()).collect(), self.zero.clone())
    }

    fn div_exact(&self, rhs: &Self) -> Option<Self> {
        let d = rhs.degree()?;
        let Some(n) = self.degree() else {
            return Some(self.clone());
        };
        if n < d {
            return None;
        }
        let lc = rhs.leading_coeff();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![self.zero.clone(); n - d + 1];
        for k in (0..=n - d).rev() {
            let top = &rem[k + d];
            if top.is_zero() {
                continue;
            }
            let q = top.div_exact(lc)?;
            for (j, b) in rhs.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&q.mul(b));
            }
            quot[k] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(UniPoly::new(quot, self.zero.clone()))
    }
}
