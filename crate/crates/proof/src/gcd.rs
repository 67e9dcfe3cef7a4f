//! Multivariate gcd over the integers by recursive primitive remainder sequences.
//!
//! The polynomial is viewed as univariate in its first occurring variable with
//! coefficients in the remaining ones; contents are taken recursively. The
//! result is always re-checked by exact division before it is returned.

use num_integer::Integer;

use crate::domain::{Domain, UniPoly};
use crate::poly::MultiPoly;

/// Greatest common divisor with positive leading coefficient (zero iff both inputs are zero).
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let g = gcd_unchecked(a, b);
    if !g.is_zero() {
        assert!(
            a.div_exact(&g).is_some() && b.div_exact(&g).is_some(),
            "gcd failed to divide its inputs"
        );
    }
    g
}

fn gcd_unchecked(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.sign_normalized();
    }
    if b.is_zero() {
        return a.sign_normalized();
    }
    let vars = a.vars().clone();
    let main = (0..vars.len()).find(|&i| a.degree_in(i) > 0 || b.degree_in(i) > 0);
    let Some(main) = main else {
        let g = a.as_constant().unwrap().gcd(&b.as_constant().unwrap());
        return MultiPoly::constant(&vars, g);
    };
    if a.degree_in(main) == 0 {
        return gcd_unchecked(a, &content_in(b, main));
    }
    if b.degree_in(main) == 0 {
        return gcd_unchecked(&content_in(a, main), b);
    }

    let ca = content_in(a, main);
    let cb = content_in(b, main);
    let zero = MultiPoly::zero(&vars);
    let mut f = UniPoly::new(a.div_exact(&ca).unwrap().to_univariate(main), zero.clone());
    let mut g = UniPoly::new(b.div_exact(&cb).unwrap().to_univariate(main), zero.clone());
    if f.degree() < g.degree() {
        std::mem::swap(&mut f, &mut g);
    }
    while g.degree().unwrap_or(0) > 0 {
        let r = f.pseudo_rem(&g);
        f = g;
        if r.is_zero() {
            g = UniPoly::zero(zero.clone());
            break;
        }
        g = primitive_uni(&r);
    }
    let common = gcd_unchecked(&ca, &cb);
    if g.is_zero() {
        // f is the last nonzero remainder
        let pf = primitive_uni(&f);
        let poly = MultiPoly::from_univariate(&vars, main, pf.coeffs());
        (&common * &poly).sign_normalized()
    } else {
        // constant remainder: coprime in the main variable
        common.sign_normalized()
    }
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `var`.
pub fn content_in(p: &MultiPoly, var: usize) -> MultiPoly {
    let mut acc = MultiPoly::zero(p.vars());
    for c in p.to_univariate(var) {
        if c.is_zero() {
            continue;
        }
        acc = gcd_unchecked(&acc, &c);
        if acc.is_constant() && acc.as_constant().unwrap() == 1.into() {
            break;
        }
    }
    acc
}

fn primitive_uni(p: &UniPoly<MultiPoly>) -> UniPoly<MultiPoly> {
    let zero = p.zero_coeff().clone();
    let mut c = zero.clone();
    for k in p.coeffs() {
        if !k.is_zero() {
            c = gcd_unchecked(&c, k);
        }
    }
    if c.is_zero() {
        return p.clone();
    }
    let lc_negative = {
        let lc = p.leading_coeff();
        lc.leading_coeff() < 0.into()
    };
    let c = if lc_negative { c.neg() } else { c };
    UniPoly::new(
        p.coeffs().iter().map(|k| k.div_exact(&c).unwrap()).collect(),
        zero,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::VarSet;
    use num_bigint::BigInt;

    #[test]
    fn recovers_planted_common_factor() {
        let v = VarSet::new(&["x", "y"]);
        let x = v.var("x");
        let y = v.var("y");
        let one = MultiPoly::one(&v);
        let common = (&x * &x + &y * &y + &one).scale(&BigInt::from(3));
        let a = &common * &(&x - &y);
        let b = &common * &(&x + &y.pow(2) + &one).scale(&BigInt::from(2));
        assert_eq!(gcd(&a, &b), common);
    }

    #[test]
    fn coprime_and_constant_cases() {
        let v = VarSet::new(&["x", "y"]);
        let x = v.var("x");
        let y = v.var("y");
        assert_eq!(gcd(&x, &y), MultiPoly::one(&v));
        let six = MultiPoly::constant(&v, 6);
        assert_eq!(gcd(&six, &x.scale(&BigInt::from(4))), MultiPoly::constant(&v, 2));
        assert_eq!(gcd(&MultiPoly::zero(&v), &(-&x)), x);
    }

    #[test]
    fn gcd_of_power_products() {
        let v = VarSet::new(&["x", "y"]);
        let x = v.var("x");
        let y = v.var("y");
        let one = MultiPoly::one(&v);
        let dm = (&x - &one).pow(2) + &y * &y;
        let dp = (&x + &one).pow(2) + &y * &y;
        let a = dm.pow(3) * dp.pow(1) * (&x + &y);
        let b = dm.pow(2) * dp.pow(2);
        assert_eq!(gcd(&a, &b), dm.pow(2) * dp);
    }
}
