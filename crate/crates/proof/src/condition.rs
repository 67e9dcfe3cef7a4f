//! The curvature-matching polynomial `P(x^2, y^2, C^2, k^2)`.
//!
//! Equating the level-set curvature of `mu = mu0` with the curvature forced by
//! the shape equation of motion (at constant speed `k` in `s`-time) and
//! squaring away the sign `ε` gives
//!
//! ```text
//! 4C²/(k²N²) |∇μ|⁶ − (H − 4/(3N) (x·∇μ) |∇μ|² + 3/(2k²) |∇μ|⁴)² = 0,
//! H = μ_y² μ_xx − 2 μ_x μ_y μ_xy + μ_x² μ_yy.
//! ```
//!
//! Every denominator that appears is a product of the irreducible atoms
//! `4D₋`, `4D₊`, `6N`, `k²` and an integer, so fractions are carried with a
//! factored denominator and reduced by trial division against those atoms.
//! That reduction is a complete gcd because the atoms are irreducible over Q.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::ProofError;
use crate::measure::{self, ExactDerivatives, C2, K2, X, Y};
use crate::poly::MultiPoly;
use crate::rational::RationalFn;

const N_ATOMS: usize = 4;

/// `num / (scalar * prod atoms[i]^exps[i])` with `scalar > 0`.
#[derive(Clone, Debug)]
struct FactoredFrac {
    num: MultiPoly,
    scalar: BigInt,
    exps: [u32; N_ATOMS],
}

struct AtomTable {
    atoms: [MultiPoly; N_ATOMS],
}

impl AtomTable {
    fn new() -> Self {
        let a = measure::atoms();
        let k2 = measure::raw_vars().var("K2");
        AtomTable {
            atoms: [a.d_minus4, a.d_plus4, a.n6, k2],
        }
    }

    fn frac(&self, r: &RationalFn) -> Result<FactoredFrac, ProofError> {
        let mut rest = r.denom().clone();
        let mut exps = [0u32; N_ATOMS];
        for (i, atom) in self.atoms.iter().enumerate() {
            let (k, cof) = rest.strip_factor(atom);
            exps[i] = k;
            rest = cof;
        }
        let scalar = rest.as_constant().ok_or_else(|| {
            ProofError::Consistency(format!("denominator does not factor over the atoms: {rest}"))
        })?;
        let mut num = r.numer().clone();
        let mut scalar = scalar;
        if scalar.is_negative() {
            scalar = -scalar;
            num = -num;
        }
        Ok(FactoredFrac { num, scalar, exps })
    }

    fn poly(&self, p: MultiPoly) -> FactoredFrac {
        FactoredFrac {
            num: p,
            scalar: BigInt::one(),
            exps: [0; N_ATOMS],
        }
    }

    fn inverse_atom(&self, i: usize) -> FactoredFrac {
        let mut exps = [0; N_ATOMS];
        exps[i] = 1;
        FactoredFrac {
            num: MultiPoly::one(measure::raw_vars()),
            scalar: BigInt::one(),
            exps,
        }
    }

    fn mul(&self, a: &FactoredFrac, b: &FactoredFrac) -> FactoredFrac {
        let mut exps = [0; N_ATOMS];
        for i in 0..N_ATOMS {
            exps[i] = a.exps[i] + b.exps[i];
        }
        FactoredFrac {
            num: &a.num * &b.num,
            scalar: &a.scalar * &b.scalar,
            exps,
        }
    }

    fn lift(&self, a: &FactoredFrac, exps: &[u32; N_ATOMS], scalar: &BigInt) -> MultiPoly {
        let mut num = a.num.scale(&(scalar / &a.scalar));
        for i in 0..N_ATOMS {
            let extra = exps[i] - a.exps[i];
            if extra > 0 {
                num = &num * &self.atoms[i].pow(extra);
            }
        }
        num
    }

    fn add(&self, a: &FactoredFrac, b: &FactoredFrac) -> FactoredFrac {
        let mut exps = [0; N_ATOMS];
        for i in 0..N_ATOMS {
            exps[i] = a.exps[i].max(b.exps[i]);
        }
        let scalar = a.scalar.lcm(&b.scalar);
        let num = self.lift(a, &exps, &scalar) + self.lift(b, &exps, &scalar);
        FactoredFrac { num, scalar, exps }
    }

    fn neg(&self, a: &FactoredFrac) -> FactoredFrac {
        FactoredFrac {
            num: -&a.num,
            ..a.clone()
        }
    }

    fn scale(&self, a: &FactoredFrac, num: i64, den: i64) -> FactoredFrac {
        assert!(den > 0);
        FactoredFrac {
            num: a.num.scale(&num.into()),
            scalar: &a.scalar * BigInt::from(den),
            exps: a.exps,
        }
    }

    /// Cancels every atom and integer factor shared by numerator and denominator.
    fn reduce(&self, mut a: FactoredFrac) -> FactoredFrac {
        for i in 0..N_ATOMS {
            while a.exps[i] > 0 {
                match a.num.div_exact(&self.atoms[i]) {
                    Some(q) => {
                        a.num = q;
                        a.exps[i] -= 1;
                    }
                    None => break,
                }
            }
        }
        let g = a.num.content().gcd(&a.scalar);
        if !g.is_one() {
            a.num = a.num.div_scalar_exact(&g).unwrap();
            a.scalar /= g;
        }
        a
    }
}

/// `P` together with the bookkeeping recorded in the report.
#[derive(Clone, Debug)]
pub struct CurvatureCondition {
    /// `P` in the elimination ring (X, Y, C2, K2).
    pub p: MultiPoly,
    /// `P` in the raw ring (x, y, C2, K2) before the square rewrite.
    pub p_raw: MultiPoly,
    /// Integer content removed from the reduced numerator (sign included).
    pub removed_content: BigInt,
    /// Exponents of `4D₋, 4D₊, 6N, k²` left in the reduced denominator.
    pub denominator_exponents: [u32; N_ATOMS],
}

/// Assembles the matching condition and returns its sign-normalized primitive numerator.
pub fn build_p(derivs: &ExactDerivatives) -> Result<CurvatureCondition, ProofError> {
    let t = AtomTable::new();
    let v = measure::raw_vars();
    let mx = t.frac(&derivs.mu_x)?;
    let my = t.frac(&derivs.mu_y)?;
    let mxx = t.frac(&derivs.mu_xx)?;
    let mxy = t.frac(&derivs.mu_xy)?;
    let myy = t.frac(&derivs.mu_yy)?;

    let grad2 = t.add(&t.mul(&mx, &mx), &t.mul(&my, &my));
    let h = {
        let a = t.mul(&t.mul(&my, &my), &mxx);
        let b = t.scale(&t.mul(&t.mul(&mx, &my), &mxy), -2, 1);
        let c = t.mul(&t.mul(&mx, &mx), &myy);
        t.add(&t.add(&a, &b), &c)
    };
    let x_dot_grad = t.add(
        &t.mul(&t.poly(v.var("x")), &mx),
        &t.mul(&t.poly(v.var("y")), &my),
    );
    let grad4 = t.mul(&grad2, &grad2);
    let grad6 = t.mul(&grad4, &grad2);
    let inv_n6 = t.inverse_atom(2);
    let inv_k2 = t.inverse_atom(3);

    // 4C²/(k²N²) = 144 C² / (k² (6N)²)
    let lhs = t.scale(
        &t.mul(
            &t.mul(&t.poly(v.var("C2")), &grad6),
            &t.mul(&inv_k2, &t.mul(&inv_n6, &inv_n6)),
        ),
        144,
        1,
    );
    // 4/(3N) = 8/(6N)
    let middle = t.scale(&t.mul(&t.mul(&x_dot_grad, &grad2), &inv_n6), -8, 1);
    let last = t.scale(&t.mul(&grad4, &inv_k2), 3, 2);
    let bracket = t.reduce(t.add(&t.add(&h, &middle), &last));
    let expr = t.add(&lhs, &t.neg(&t.mul(&bracket, &bracket)));
    let reduced = t.reduce(expr);

    if reduced.num.is_zero() {
        return Err(ProofError::Consistency("matching condition vanishes identically".into()));
    }
    let p_raw = reduced.num.primitive_part();
    let removed_content = reduced
        .num
        .div_exact(&p_raw)
        .and_then(|c| c.as_constant())
        .expect("primitive part differs by an integer");

    if !p_raw.is_even_in(X) || !p_raw.is_even_in(Y) {
        return Err(ProofError::Consistency(
            "odd power of x or y in the matching condition".into(),
        ));
    }
    let p = measure::to_squares(&p_raw).expect("even in x and y");
    debug_assert_eq!(p.degree_in(measure::M0), 0);
    let _ = (C2, K2);
    Ok(CurvatureCondition {
        p,
        p_raw,
        removed_content,
        denominator_exponents: reduced.exps,
    })
}
