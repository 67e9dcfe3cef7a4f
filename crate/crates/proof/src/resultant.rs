//! Resultants by the subresultant polynomial remainder sequence, plus the
//! Sylvester-matrix determinant used as an independent check.
//!
//! Sign convention: `Res(A, B) = det Syl(A, B)` with the rows of `A` first,
//! equivalently `lc(A)^deg(B) * prod B(a_i)` over the roots `a_i` of `A`.

use crate::domain::{Domain, UniPoly};
use crate::error::ProofError;
use crate::poly::MultiPoly;

fn is_odd(n: usize) -> bool {
    n % 2 == 1
}

/// Resultant of two univariate polynomials over an integral domain, taken at
/// their actual degrees. Zero if either input is zero.
///
/// Fraction-free subresultant PRS: every division below is exact in the
/// coefficient domain, and a failed division means the inputs broke that
/// assumption, so it panics.
pub fn resultant<R: Domain>(a: &UniPoly<R>, b: &UniPoly<R>) -> R {
    let zero = a.zero_coeff().clone();
    let (Some(mut da), Some(mut db)) = (a.degree(), b.degree()) else {
        return zero;
    };
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut negate = false;
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        if is_odd(da) && is_odd(db) {
            negate = true;
        }
    }
    if db == 0 {
        let r = b.leading_coeff().pow(da as u32);
        return if negate { r.neg() } else { r };
    }
    let mut g = zero.one_like();
    let mut h = zero.one_like();
    loop {
        let delta = da - db;
        if is_odd(da) && is_odd(db) {
            negate = !negate;
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return zero;
        }
        let divisor = g.mul(&h.pow(delta as u32));
        let next = UniPoly::new(
            r.coeffs()
                .iter()
                .map(|c| c.div_exact(&divisor).expect("subresultant division is exact"))
                .collect(),
            zero.clone(),
        );
        a = b;
        b = next;
        g = a.leading_coeff().clone();
        h = match delta {
            0 => h,
            1 => g.clone(),
            _ => g
                .pow(delta as u32)
                .div_exact(&h.pow(delta as u32 - 1))
                .expect("subresultant h update is exact"),
        };
        da = a.degree().expect("nonzero");
        db = b.degree().expect("nonzero");
        if db == 0 {
            let lb = b.leading_coeff();
            let r = if da == 1 {
                lb.clone()
            } else {
                lb.pow(da as u32)
                    .div_exact(&h.pow(da as u32 - 1))
                    .expect("final subresultant division is exact")
            };
            return if negate { r.neg() } else { r };
        }
    }
}

/// The `(m+n) x (m+n)` Sylvester matrix of `a` (degree m) and `b` (degree n),
/// highest coefficients first, rows of `a` on top.
pub fn sylvester_matrix<R: Domain>(a: &UniPoly<R>, b: &UniPoly<R>) -> Vec<Vec<R>> {
    let zero = a.zero_coeff().clone();
    let m = a.degree().unwrap_or(0);
    let n = b.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for k in 0..=m {
            row[i + k] = a.coeff(m - k).clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for k in 0..=n {
            row[i + k] = b.coeff(n - k).clone();
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free Gaussian elimination (Bareiss). Exact over any integral domain.
pub fn determinant_bareiss<R: Domain>(matrix: Vec<Vec<R>>, zero: &R) -> R {
    let n = matrix.len();
    if n == 0 {
        return zero.one_like();
    }
    let mut m = matrix;
    let mut sign_flip = false;
    let mut prev = zero.one_like();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return zero.clone(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = zero.clone();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign_flip {
        d.neg()
    } else {
        d
    }
}

/// Resultant with respect to variable `var` of two polynomials in the same ring.
pub fn resultant_in(f: &MultiPoly, g: &MultiPoly, var: usize) -> Result<MultiPoly, ProofError> {
    if f.is_zero() || g.is_zero() {
        return Err(ProofError::DegenerateResultant(
            "zero input polynomial".to_string(),
        ));
    }
    let zero = MultiPoly::zero(f.vars());
    let uf = UniPoly::new(f.to_univariate(var), zero.clone());
    let ug = UniPoly::new(g.to_univariate(var), zero);
    Ok(resultant(&uf, &ug))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn zp(v: &[i64]) -> UniPoly<BigInt> {
        UniPoly::new(v.iter().map(|&c| BigInt::from(c)).collect(), BigInt::zero())
    }

    fn syl(a: &UniPoly<BigInt>, b: &UniPoly<BigInt>) -> BigInt {
        determinant_bareiss(sylvester_matrix(a, b), &BigInt::zero())
    }

    #[test]
    fn small_known_resultants() {
        // Res(x^2 - 1, x - 2) = (1 - 2)(-1 - 2) = 3
        assert_eq!(resultant(&zp(&[-1, 0, 1]), &zp(&[-2, 1])), BigInt::from(3));
        // shared root x = 1
        assert_eq!(resultant(&zp(&[-1, 0, 1]), &zp(&[-1, 1])), BigInt::zero());
        // constant second argument: Res(a, c) = c^deg a
        assert_eq!(resultant(&zp(&[1, 2, 3]), &zp(&[5])), BigInt::from(25));
        assert_eq!(resultant(&zp(&[5]), &zp(&[1, 2, 3])), BigInt::from(25));
    }

    #[test]
    fn bareiss_handles_zero_pivots() {
        let m = vec![
            vec![BigInt::from(0), BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(3), BigInt::from(1), BigInt::from(4)],
            vec![BigInt::from(5), BigInt::from(9), BigInt::from(2)],
        ];
        // cofactor expansion: 0*(2-36) - 2*(6-20) + 1*(27-5) = 28 + 22 = 50
        assert_eq!(determinant_bareiss(m, &BigInt::zero()), BigInt::from(50));
    }

    #[test]
    fn multivariate_resultant_eliminates() {
        let v = crate::poly::VarSet::new(&["a", "y"]);
        let a = v.var("a");
        let y = v.var("y");
        // Res_y(y^2 - a, y - 1) = 1 - a
        let r = resultant_in(&(&y * &y - &a), &(&y - MultiPoly::one(&v)), 1).unwrap();
        assert_eq!(r, MultiPoly::one(&v) - &a);
        let c = &y * &y + &a;
        assert!(resultant_in(&c, &c, 1).unwrap().is_zero());
    }

    fn small_poly() -> impl Strategy<Value = UniPoly<BigInt>> {
        prop::collection::vec(-9i64..=9, 1..6).prop_filter_map("nonzero leading", |v| {
            let p = zp(&v);
            (p.degree().is_some()).then_some(p)
        })
    }

    proptest! {
        #[test]
        fn matches_sylvester_determinant(a in small_poly(), b in small_poly()) {
            prop_assume!(a.degree().unwrap() + b.degree().unwrap() > 0);
            prop_assert_eq!(resultant(&a, &b), syl(&a, &b));
        }

        #[test]
        fn multiplicative_in_second_argument(f in small_poly(), g in small_poly(), h in small_poly()) {
            let gh = g.mul(&h);
            prop_assert_eq!(resultant(&f, &gh), resultant(&f, &g).mul(&resultant(&f, &h)));
        }

        #[test]
        fn antisymmetry(f in small_poly(), g in small_poly()) {
            let m = f.degree().unwrap();
            let n = g.degree().unwrap();
            let r = resultant(&g, &f);
            let expected = if (m * n) % 2 == 1 { -r } else { r };
            prop_assert_eq!(resultant(&f, &g), expected);
        }
    }
}
