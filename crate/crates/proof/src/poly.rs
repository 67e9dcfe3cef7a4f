//! Sparse multivariate polynomials with arbitrary-precision integer coefficients.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors. Arrays compare
//! lexicographically, so the map order is the lex term order with the first
//! variable of the [`VarSet`] most significant; the leading term is the last
//! entry. Zero coefficients are never stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Maximum number of variables a polynomial ring may carry.
pub const MAX_VARS: usize = 6;

/// Exponent vector; unused trailing slots stay zero.
pub type Exponents = [u16; MAX_VARS];

/// Ordered list of variable names shared by every polynomial of one ring.
#[derive(Clone)]
pub struct VarSet(Arc<Vec<String>>);

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        assert!(names.len() <= MAX_VARS, "at most {MAX_VARS} variables supported");
        VarSet(Arc::new(names.iter().map(|s| s.as_ref().to_string()).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// The polynomial consisting of the single variable `name`.
    ///
    /// Panics when the name is not part of the set.
    pub fn var(&self, name: &str) -> MultiPoly {
        let i = self
            .index_of(name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        MultiPoly::var(self, i)
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for VarSet {}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: VarSet,
    terms: BTreeMap<Exponents, BigInt>,
}

fn add_exps(a: &Exponents, b: &Exponents) -> Exponents {
    let mut out = [0u16; MAX_VARS];
    for i in 0..MAX_VARS {
        out[i] = a[i]
            .checked_add(b[i])
            .expect("exponent overflow in polynomial product");
    }
    out
}

fn divides(small: &Exponents, big: &Exponents) -> bool {
    small.iter().zip(big).all(|(s, b)| s <= b)
}

fn sub_exps(a: &Exponents, b: &Exponents) -> Exponents {
    let mut out = [0u16; MAX_VARS];
    for i in 0..MAX_VARS {
        out[i] = a[i] - b[i];
    }
    out
}

impl MultiPoly {
    pub fn zero(vars: &VarSet) -> Self {
        MultiPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<T: Into<BigInt>>(vars: &VarSet, c: T) -> Self {
        let c = c.into();
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert([0; MAX_VARS], c);
        }
        p
    }

    pub fn one(vars: &VarSet) -> Self {
        Self::constant(vars, 1)
    }

    pub fn var(vars: &VarSet, index: usize) -> Self {
        assert!(index < vars.len());
        let mut e = [0u16; MAX_VARS];
        e[index] = 1;
        Self::monomial(vars, e, BigInt::one())
    }

    pub fn monomial(vars: &VarSet, exps: Exponents, coeff: BigInt) -> Self {
        let mut p = Self::zero(vars);
        if !coeff.is_zero() {
            p.terms.insert(exps, coeff);
        }
        p
    }

    /// Builds a polynomial from terms, merging duplicates and dropping zeros.
    pub fn from_terms<I>(vars: &VarSet, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, BigInt)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Exponents, BigInt)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, exps: &Exponents) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn leading_term(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.last_key_value()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_default()
    }

    /// Returns the constant value if the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<BigInt> {
        match self.terms.len() {
            0 => Some(BigInt::zero()),
            1 => self.terms.get(&[0; MAX_VARS]).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var] as u32).max().unwrap_or(0)
    }

    /// Per-variable maximum degree, in variable order.
    pub fn degrees(&self) -> Vec<u32> {
        (0..self.vars.len()).map(|i| self.degree_in(i)).collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exps: &Exponents, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (add_exps(e, exps), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Partial derivative with respect to variable `var`.
    pub fn diff(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut e2 = *e;
                e2[var] -= 1;
                out.terms.insert(e2, c * BigInt::from(e[var]));
            }
        }
        out
    }

    /// Nonnegative gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides every coefficient by `c`, or `None` when some division leaves a remainder.
    pub fn div_scalar_exact(&self, c: &BigInt) -> Option<Self> {
        if c.is_zero() {
            return None;
        }
        let mut terms = BTreeMap::new();
        for (e, v) in &self.terms {
            let (q, r) = v.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.insert(*e, q);
        }
        Some(MultiPoly {
            vars: self.vars.clone(),
            terms,
        })
    }

    /// Content-free part with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        self.div_scalar_exact(&c).expect("content divides every coefficient")
    }

    /// Multiplies by -1 if needed so the leading coefficient is positive.
    pub fn sign_normalized(&self) -> Self {
        if self.leading_coeff().is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact multivariate division. Returns `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<Self> {
        assert_eq!(self.vars, divisor.vars, "variable sets differ");
        let (lt_e, lt_c) = divisor.leading_term()?;
        let (lt_e, lt_c) = (*lt_e, lt_c.clone());
        if let Some(c) = divisor.as_constant() {
            return self.div_scalar_exact(&c);
        }
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        let tail: Vec<(Exponents, BigInt)> = divisor
            .terms
            .iter()
            .rev()
            .skip(1)
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        while let Some((e, c)) = rem.terms.pop_last() {
            if !divides(&lt_e, &e) {
                return None;
            }
            let (qc, r) = c.div_rem(&lt_c);
            if !r.is_zero() {
                return None;
            }
            let qe = sub_exps(&e, &lt_e);
            for (de, dc) in &tail {
                rem.add_term(add_exps(&qe, de), -(&qc * dc));
            }
            quot.terms.insert(qe, qc);
        }
        Some(quot)
    }

    /// Largest `k` such that `factor^k` divides `self`, together with the cofactor.
    pub fn strip_factor(&self, factor: &MultiPoly) -> (u32, MultiPoly) {
        let mut k = 0;
        let mut cur = self.clone();
        if cur.is_zero() || factor.is_constant() {
            return (0, cur);
        }
        while let Some(q) = cur.div_exact(factor) {
            cur = q;
            k += 1;
        }
        (k, cur)
    }

    /// Substitutes the integer `value` for variable `var`.
    pub fn eval_var(&self, var: usize, value: &BigInt) -> Self {
        let max = self.degree_in(var) as usize;
        let mut powers = Vec::with_capacity(max + 1);
        powers.push(BigInt::one());
        for i in 1..=max {
            let next = &powers[i - 1] * value;
            powers.push(next);
        }
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let d = e2[var] as usize;
            e2[var] = 0;
            out.add_term(e2, c * &powers[d]);
        }
        out
    }

    /// Coefficients with respect to `var`, lowest degree first. Each coefficient
    /// lives in the same ring with `var` absent.
    pub fn to_univariate(&self, var: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Self::zero(&self.vars); if self.is_zero() { 0 } else { deg + 1 }];
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let d = e2[var] as usize;
            e2[var] = 0;
            out[d].terms.insert(e2, c.clone());
        }
        out
    }

    pub fn from_univariate(vars: &VarSet, var: usize, coeffs: &[MultiPoly]) -> Self {
        let mut out = Self::zero(vars);
        for (d, c) in coeffs.iter().enumerate() {
            for (e, v) in &c.terms {
                assert_eq!(e[var], 0, "coefficient still depends on the main variable");
                let mut e2 = *e;
                e2[var] = d as u16;
                out.terms.insert(e2, v.clone());
            }
        }
        out
    }

    /// True when every exponent of `var` is even.
    pub fn is_even_in(&self, var: usize) -> bool {
        self.terms.keys().all(|e| e[var] % 2 == 0)
    }

    /// Moves the polynomial into another ring. `map[i]` gives, for variable `i`
    /// of `self`, the target index and an exponent divisor (1 to keep, 2 to
    /// rewrite `x^2` as a new variable). `None` if a divisor does not divide an
    /// exponent or a dropped variable actually occurs.
    pub fn remap(&self, target: &VarSet, map: &[Option<(usize, u16)>]) -> Option<Self> {
        assert_eq!(map.len(), self.vars.len());
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = [0u16; MAX_VARS];
            for (i, m) in map.iter().enumerate() {
                match m {
                    None => {
                        if e[i] != 0 {
                            return None;
                        }
                    }
                    Some((j, div)) => {
                        if e[i] % div != 0 {
                            return None;
                        }
                        e2[*j] += e[i] / div;
                    }
                }
            }
            out.add_term(e2, c.clone());
        }
        Some(out)
    }

    /// Applies `x_i -> s_i * x_i` with `s_i = ±1`.
    pub fn reflect(&self, var: usize) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, if e[var] % 2 == 1 { -c } else { c.clone() }))
                .collect(),
        }
    }

    /// Exact evaluation at rational values (one per variable).
    pub fn eval_rational(&self, values: &[BigRational]) -> BigRational {
        assert_eq!(values.len(), self.vars.len());
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (i, v) in values.iter().enumerate() {
                if e[i] > 0 {
                    t *= num_traits::pow::pow(v.clone(), e[i] as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at integer values (one per variable).
    pub fn eval_integer(&self, values: &[BigInt]) -> BigInt {
        assert_eq!(values.len(), self.vars.len());
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in values.iter().enumerate() {
                if e[i] > 0 {
                    t *= num_traits::pow::pow(v.clone(), e[i] as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Floating-point evaluation (Horner-free, adequate for moderate degrees).
    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.vars.len());
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (i, v) in values.iter().enumerate() {
                if e[i] > 0 {
                    t *= v.powi(e[i] as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Largest coefficient bit length.
    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.bits()).max().unwrap_or(0)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    /// Terms in descending lex order, e.g. `64*X^3 + 48*X^2*Y - 6*M0 + 27`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = self.vars.names();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&d| d == 0);
            if !mag.is_one() || is_const {
                factors.push(mag.to_string());
            }
            for (i, name) in names.iter().enumerate() {
                match e[i] {
                    0 => {}
                    1 => factors.push(name.clone()),
                    d => factors.push(format!("{name}^{d}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(mut self) -> MultiPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, rhs.vars, "variable sets differ");
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (e, c) in &small.terms {
            big.add_term(*e, c.clone());
        }
        big
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, rhs.vars, "variable sets differ");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.vars, rhs.vars, "variable sets differ");
        if self.is_zero() || rhs.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        let mut acc: HashMap<Exponents, BigInt> =
            HashMap::with_capacity(self.len().saturating_mul(rhs.len()).min(1 << 20));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = add_exps(ea, eb);
                let prod = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$m(rhs)
            }
        }
        impl $tr<MultiPoly> for &MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> VarSet {
        VarSet::new(&["x", "y", "z"])
    }

    #[test]
    fn arithmetic_and_display() {
        let v = ring();
        let x = v.var("x");
        let y = v.var("y");
        let one = MultiPoly::one(&v);
        let p = (&x + &one) * (&x - &one);
        assert_eq!(p.to_string(), "x^2 - 1");
        let q = (&x + &y).pow(2);
        assert_eq!(q.to_string(), "x^2 + 2*x*y + y^2");
        assert!((&q - &q).is_zero());
    }

    #[test]
    fn exact_division_and_failure() {
        let v = ring();
        let x = v.var("x");
        let y = v.var("y");
        let a = &x * &x - &y * &y;
        let b = &x + &y;
        assert_eq!(a.div_exact(&b).unwrap(), &x - &y);
        assert!(a.div_exact(&(&x + MultiPoly::constant(&v, 2))).is_none());
        let c = a.scale(&BigInt::from(6));
        assert_eq!(c.content(), BigInt::from(6));
        assert_eq!(c.div_exact(&MultiPoly::constant(&v, 3)).unwrap(), a.scale(&BigInt::from(2)));
    }

    #[test]
    fn strip_factor_counts_multiplicity() {
        let v = ring();
        let x = v.var("x");
        let f = &x.scale(&BigInt::from(4)) - MultiPoly::one(&v);
        let p = f.pow(3) * (&x + &v.var("z"));
        let (k, rest) = p.strip_factor(&f);
        assert_eq!(k, 3);
        assert_eq!(rest, &x + &v.var("z"));
    }

    #[test]
    fn univariate_round_trip_and_derivative() {
        let v = ring();
        let x = v.var("x");
        let y = v.var("y");
        let p = &x.pow(3) * &y + &y.pow(2) + MultiPoly::constant(&v, 5);
        let coeffs = p.to_univariate(1);
        assert_eq!(coeffs.len(), 3);
        assert_eq!(MultiPoly::from_univariate(&v, 1, &coeffs), p);
        assert_eq!(p.diff(0), x.pow(2).scale(&BigInt::from(3)) * &y);
        assert_eq!(p.eval_var(1, &BigInt::from(2)), x.pow(3).scale(&BigInt::from(2)) + MultiPoly::constant(&v, 9));
    }

    #[test]
    fn remap_halves_even_exponents() {
        let raw = VarSet::new(&["x", "y"]);
        let sq = VarSet::new(&["X", "Y"]);
        let x = raw.var("x");
        let p = x.pow(4) + raw.var("y").pow(2);
        let q = p.remap(&sq, &[Some((0, 2)), Some((1, 2))]).unwrap();
        assert_eq!(q.to_string(), "X^2 + Y");
        assert!(x.remap(&sq, &[Some((0, 2)), Some((1, 2))]).is_none());
    }
}
