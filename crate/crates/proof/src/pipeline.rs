//! End-to-end elimination pipeline and its JSON report.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::condition::{build_p, CurvatureCondition};
use crate::elimination::{resultant_y, sylvester_check, Elimination};
use crate::error::ProofError;
use crate::measure::{self, elim_vars, C2, K2, M0, X, Y};
use crate::poly::{MultiPoly, VarSet};
use crate::rational::RationalFn;
use crate::resultant::resultant_in;
use crate::shape_q::{build_q, identity_constant};

/// Interpolation margin beyond the proven degree bounds.
pub const MARGIN: u32 = 2;
/// Number of Sylvester-determinant spot checks of `R`.
pub const SYLVESTER_CHECKS: usize = 5;
const SYLVESTER_SEED: u64 = 0x5eed_0002;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Stage {
    #[serde(rename = "build_Q")]
    BuildQ,
    #[serde(rename = "degrees")]
    Degrees,
    #[serde(rename = "resultant_Y")]
    ResultantY,
    #[serde(rename = "factor_structure")]
    FactorStructure,
    #[serde(rename = "resultant_k2")]
    ResultantK2,
    #[serde(rename = "verify_exclusion")]
    VerifyExclusion,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::BuildQ,
        Stage::Degrees,
        Stage::ResultantY,
        Stage::FactorStructure,
        Stage::ResultantK2,
        Stage::VerifyExclusion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::BuildQ => "build_Q",
            Stage::Degrees => "degrees",
            Stage::ResultantY => "resultant_Y",
            Stage::FactorStructure => "factor_structure",
            Stage::ResultantK2 => "resultant_k2",
            Stage::VerifyExclusion => "verify_exclusion",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Stage::ALL.iter().map(|s| s.name()).collect();
                format!("unknown stage `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub threads: usize,
    /// Last stage to run (inclusive).
    pub stop_after: Stage,
    pub record_timings: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            threads: 1,
            stop_after: Stage::VerifyExclusion,
            record_timings: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub stage: Stage,
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTiming {
    pub stage: Stage,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct QSummary {
    pub polynomial: String,
    pub terms: usize,
    pub y3_coefficient: String,
    pub identity_constant: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PSummary {
    /// Degrees in `X, Y, C2, K2`.
    pub degrees: [u32; 4],
    /// Degrees in `x, y, C, k`.
    pub raw_degrees: [u32; 4],
    pub terms: usize,
    pub max_coeff_bits: u64,
    /// Integer removed to make the cleared numerator primitive (normalization dependent).
    pub removed_content: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultantSummary {
    pub x_degree: u32,
    /// Degrees in `C2, K2, M0`.
    pub parameter_degrees: [u32; 3],
    pub parameter_bounds: [u32; 3],
    pub margin: u32,
    pub samples: usize,
    pub terms: usize,
    pub max_coeff_bits: u64,
    pub sylvester_points: Vec<[i64; 4]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorSummary {
    pub x_exponent: u32,
    pub four_x_minus_one_exponent: u32,
    pub coefficient_count: usize,
    pub nonzero_coefficients: usize,
    /// Signed content of the cofactor (normalization dependent).
    pub a: String,
    /// Degrees of `c_n` in `C2, K2, M0`, indexed by `n`.
    pub coefficient_degrees: Vec<[u32; 3]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EliminantSummary {
    pub name: String,
    /// Degrees in `C2, M0`.
    pub degrees: [u32; 2],
    pub expected_factor: String,
    /// Integer quotient (normalization dependent).
    pub constant: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofReport {
    pub variable_order: Vec<String>,
    pub normalization: String,
    pub stages_run: Vec<Stage>,
    pub q: Option<QSummary>,
    pub p: Option<PSummary>,
    pub resultant: Option<ResultantSummary>,
    pub factors: Option<FactorSummary>,
    pub eliminants: Vec<EliminantSummary>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<StageTiming>>,
    pub passed: bool,
}

impl ProofReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }
}

/// Values carried between stages.
#[derive(Default)]
struct Artifacts {
    q: Option<MultiPoly>,
    p: Option<CurvatureCondition>,
    r: Option<Elimination>,
    coeffs: Option<Vec<MultiPoly>>,
}

struct Runner {
    opts: PipelineOptions,
    report: ProofReport,
    art: Artifacts,
}

impl Runner {
    fn check(&mut self, stage: Stage, check: &str, passed: bool, detail: impl Into<String>) {
        self.report.verdicts.push(Verdict {
            stage,
            check: check.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    fn stage_ok(&self) -> bool {
        self.report.verdicts.iter().all(|v| v.passed)
    }

    fn build_q(&mut self) -> Result<(), ProofError> {
        let q = build_q();
        let e = exps(&[(Y, 3)]);
        let y3 = q.coeff(&e);
        let c = identity_constant(&q)?;
        self.check(Stage::BuildQ, "leading Y coefficient is 64", y3 == BigInt::from(64), y3.to_string());
        self.check(
            Stage::BuildQ,
            "Q = 96 D- D+ (mu - mu0)",
            c == BigRational::from_integer(96.into()),
            format!("ratio {c}"),
        );
        self.report.q = Some(QSummary {
            polynomial: q.to_string(),
            terms: q.len(),
            y3_coefficient: y3.to_string(),
            identity_constant: c.to_string(),
        });
        self.art.q = Some(q);
        Ok(())
    }

    fn degrees(&mut self) -> Result<(), ProofError> {
        let cond = build_p(&measure::exact_derivatives())?;
        let d = cond.p.degrees();
        let degrees = [d[X], d[Y], d[C2], d[K2]];
        let raw_degrees = [2 * d[X], 2 * d[Y], 2 * d[C2], 2 * d[K2]];
        let parity = cond.p_raw.reflect(X) == cond.p_raw && cond.p_raw.reflect(Y) == cond.p_raw;
        self.check(Stage::Degrees, "P even in x and y", parity, "");
        self.check(
            Stage::Degrees,
            "degree table x^60 y^60 C^2 k^4",
            raw_degrees == [60, 60, 2, 4] && d[M0] == 0,
            format!("x^{} y^{} C^{} k^{}", raw_degrees[0], raw_degrees[1], raw_degrees[2], raw_degrees[3]),
        );
        self.report.p = Some(PSummary {
            degrees,
            raw_degrees,
            terms: cond.p.len(),
            max_coeff_bits: cond.p.max_coeff_bits(),
            removed_content: cond.removed_content.to_string(),
        });
        self.art.p = Some(cond);
        Ok(())
    }

    fn resultant_y(&mut self) -> Result<(), ProofError> {
        let p = &self.art.p.as_ref().expect("P built").p;
        let q = self.art.q.as_ref().expect("Q built");
        let e = resultant_y(p, q, MARGIN, self.opts.threads)?;
        let checks = sylvester_check(p, q, &e.r, SYLVESTER_CHECKS, SYLVESTER_SEED);
        let agree = checks.iter().filter(|c| c.agrees).count();
        let x_degree = e.r.degree_in(X);
        self.check(
            Stage::ResultantY,
            "interpolated degrees inside the bounds",
            e.degrees.iter().zip(&e.bounds).all(|(d, b)| d <= b),
            format!("degrees {:?}, bounds {:?}, margin {MARGIN}", e.degrees, e.bounds),
        );
        self.check(
            Stage::ResultantY,
            "agrees with Sylvester determinants",
            agree == checks.len(),
            format!("{agree}/{} specializations", checks.len()),
        );
        self.check(Stage::ResultantY, "R has order x^68", x_degree == 34, format!("X-degree {x_degree}"));
        self.report.resultant = Some(ResultantSummary {
            x_degree,
            parameter_degrees: e.degrees,
            parameter_bounds: e.bounds,
            margin: MARGIN,
            samples: e.samples,
            terms: e.r.len(),
            max_coeff_bits: e.r.max_coeff_bits(),
            sylvester_points: checks.iter().map(|c| c.point).collect(),
        });
        self.art.r = Some(e);
        Ok(())
    }

    fn factor_structure(&mut self) -> Result<(), ProofError> {
        let r = &self.art.r.as_ref().expect("R built").r;
        let f = factor_structure(r)?;
        self.check(
            Stage::FactorStructure,
            "X^4 (4X-1)^6 divides R exactly",
            f.x_exponent == 4 && f.four_x_minus_one_exponent == 6,
            format!("exponents ({}, {})", f.x_exponent, f.four_x_minus_one_exponent),
        );
        let n = f.coefficients.len();
        self.check(Stage::FactorStructure, "25 coefficients c_0..c_24", n == 25, format!("{n}"));
        let nonzero = f.coefficients.iter().filter(|c| !c.is_zero()).count();
        self.report.factors = Some(FactorSummary {
            x_exponent: f.x_exponent,
            four_x_minus_one_exponent: f.four_x_minus_one_exponent,
            coefficient_count: n,
            nonzero_coefficients: nonzero,
            a: f.a.to_string(),
            coefficient_degrees: f
                .coefficients
                .iter()
                .map(|c| [c.degree_in(C2), c.degree_in(K2), c.degree_in(M0)])
                .collect(),
        });
        self.art.coeffs = Some(f.coefficients);
        Ok(())
    }

    fn resultant_k2(&mut self) -> Result<(), ProofError> {
        let c = self.art.coeffs.as_ref().expect("coefficients extracted");
        if c.len() < 25 {
            return Err(ProofError::mismatch("resultant_k2", "fewer than 25 coefficients"));
        }
        let d1 = resultant_k2(&c[24], &c[23])?;
        let d2 = resultant_k2(&c[24], &c[22])?;

        let f1 = d1_factor();
        let q1 = d1.div_exact(&f1).and_then(|q| q.as_constant());
        self.check(
            Stage::ResultantK2,
            "d1 = D1 mu0^6 (mu0-1)^3 (2mu0-1)^12 C^2 ((3mu0-1)C^2 + 2mu0(2mu0-1)^2)",
            q1.as_ref().is_some_and(|d| !d.is_zero()),
            match &q1 {
                Some(d) => format!("D1 = {d}"),
                None => "not an integer multiple".into(),
            },
        );
        let d2_at_0 = d2.eval_var(C2, &BigInt::zero());
        let f2 = d2_factor();
        let q2 = d2_at_0.div_exact(&f2).and_then(|q| q.as_constant());
        self.check(
            Stage::ResultantK2,
            "d2|C=0 = D2 mu0^12 (mu0-1)^4 (2mu0-1)^16",
            q2.as_ref().is_some_and(|d| !d.is_zero()),
            match &q2 {
                Some(d) => format!("D2 = {d}"),
                None => "not an integer multiple".into(),
            },
        );
        for (name, d, f, q) in [("d1", &d1, &f1, &q1), ("d2", &d2, &f2, &q2)] {
            self.report.eliminants.push(EliminantSummary {
                name: name.into(),
                degrees: [d.degree_in(C2), d.degree_in(M0)],
                expected_factor: f.to_string(),
                constant: q.as_ref().map_or_else(String::new, |c| c.to_string()),
            });
        }
        Ok(())
    }

    fn verify_exclusion(&mut self) -> Result<(), ProofError> {
        let g = positivity_factor();
        let shifted = shift_var(&g, M0, 3);
        let nonneg = shifted.terms().all(|(_, c)| !c.is_negative());
        let constant = shifted.coeff(&[0; 6]);
        self.check(
            Stage::VerifyExclusion,
            "(3mu0-1)C^2 + 2mu0(2mu0-1)^2 > 0 for mu0 >= 3, C^2 >= 0",
            nonneg && constant.is_positive(),
            format!("at mu0 = 3 + u: {}", shifted.to_string().replace("M0", "u")),
        );
        let roots = linear_factor_roots();
        let below = roots.iter().all(|r| r < &BigRational::from_integer(3.into()));
        self.check(
            Stage::VerifyExclusion,
            "mu0, mu0-1, 2mu0-1 have no root with mu0 >= 3",
            below,
            format!("roots {}", roots.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")),
        );
        let mu_ok = mu_bound_identities()?;
        self.check(
            Stage::VerifyExclusion,
            "mu = (1/3)(sum r^2)(sum r^-2) >= 3",
            mu_ok,
            "sum-of-squares rearrangement verified symbolically",
        );
        let all = self.stage_ok();
        self.check(
            Stage::VerifyExclusion,
            "no (C^2, k^2, mu0) annihilates c_24, c_23, c_22",
            all,
            if all {
                "d1 = 0 forces C^2 = 0, where d2 does not vanish"
            } else {
                "an earlier step failed"
            },
        );
        Ok(())
    }
}

fn exps(pairs: &[(usize, u16)]) -> [u16; 6] {
    let mut e = [0; 6];
    for &(v, k) in pairs {
        e[v] = k;
    }
    e
}

/// Structure of `R`: multiplicities of `X` and `4X - 1`, the signed integer
/// content `A`, and the coefficients `c_n` of `X^n` in the normalized cofactor.
#[derive(Clone, Debug)]
pub struct RFactors {
    pub x_exponent: u32,
    pub four_x_minus_one_exponent: u32,
    pub a: BigInt,
    pub coefficients: Vec<MultiPoly>,
}

pub fn factor_structure(r: &MultiPoly) -> Result<RFactors, ProofError> {
    if r.is_zero() {
        return Err(ProofError::mismatch("factor_structure", "R is identically zero"));
    }
    let v = r.vars();
    let x = v.var("X");
    let lin = &x.scale(&4.into()) - &MultiPoly::one(v);
    let (ex, rest) = r.strip_factor(&x);
    let (el, rest) = rest.strip_factor(&lin);
    let content = rest.content();
    let a = if rest.leading_coeff().is_negative() { -content } else { content };
    let normalized = rest
        .div_scalar_exact(&a)
        .ok_or_else(|| ProofError::Consistency("content does not divide".into()))?;
    let coefficients = normalized.to_univariate(X);
    Ok(RFactors {
        x_exponent: ex,
        four_x_minus_one_exponent: el,
        a,
        coefficients,
    })
}

/// `Res_{k^2}(a, b)`.
pub fn resultant_k2(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, ProofError> {
    resultant_in(a, b, K2)
}

fn lin(a: i64, b: i64) -> MultiPoly {
    let v = elim_vars();
    &v.var("M0").scale(&a.into()) + &MultiPoly::constant(v, b)
}

/// `(3 mu0 - 1) C^2 + 2 mu0 (2 mu0 - 1)^2`.
pub fn positivity_factor() -> MultiPoly {
    let v = elim_vars();
    &lin(3, -1) * &v.var("C2") + (&lin(2, 0) * &lin(2, -1).pow(2))
}

/// `mu0^6 (mu0 - 1)^3 (2 mu0 - 1)^12 C^2 ((3 mu0 - 1) C^2 + 2 mu0 (2 mu0 - 1)^2)`.
pub fn d1_factor() -> MultiPoly {
    let v = elim_vars();
    lin(1, 0).pow(6) * lin(1, -1).pow(3) * lin(2, -1).pow(12) * v.var("C2") * positivity_factor()
}

/// `mu0^12 (mu0 - 1)^4 (2 mu0 - 1)^16`.
pub fn d2_factor() -> MultiPoly {
    lin(1, 0).pow(12) * lin(1, -1).pow(4) * lin(2, -1).pow(16)
}

fn linear_factor_roots() -> Vec<BigRational> {
    [(1, 0), (1, -1), (2, -1)]
        .iter()
        .map(|&(a, b)| BigRational::new((-b).into(), a.into()))
        .collect()
}

/// `p` with `var` replaced by `var + shift`.
pub fn shift_var(p: &MultiPoly, var: usize, shift: i64) -> MultiPoly {
    let v = p.vars();
    let t = &MultiPoly::var(v, var) + &MultiPoly::constant(v, shift);
    p.to_univariate(var)
        .into_iter()
        .rev()
        .fold(MultiPoly::zero(v), |acc, c| &acc * &t + c)
}

/// Checks the two identities behind `mu >= 3`:
/// `(a+b+c)(ab+bc+ca) - 9abc = a(b-c)^2 + b(c-a)^2 + c(a-b)^2`, and
/// `mu = (1/3)(r12^2 + r13^2 + r23^2)(r12^-2 + r13^-2 + r23^-2)` with
/// `r12^2 = 1`, `r13^2 = D₊`, `r23^2 = D₋` in shape units.
pub fn mu_bound_identities() -> Result<bool, ProofError> {
    let v = VarSet::new(&["a", "b", "c"]);
    let (a, b, c) = (v.var("a"), v.var("b"), v.var("c"));
    let sum = &(&a + &b) + &c;
    let pairs = &(&(&a * &b) + &(&b * &c)) + &(&c * &a);
    let lhs = &sum * &pairs - (&(&a * &b) * &c).scale(&9.into());
    let rhs = &a * &(&b - &c).pow(2) + &b * &(&c - &a).pow(2) + &c * &(&a - &b).pow(2);
    let sos = lhs == rhs;

    let one = RationalFn::constant(measure::raw_vars(), 1, 1);
    let dp = measure::d_plus();
    let dm = measure::d_minus();
    let sum = one.add(&dp).add(&dm);
    let inv_sum = one.add(&dp.recip()?).add(&dm.recip()?);
    let third = RationalFn::constant(measure::raw_vars(), 1, 3);
    let product = third.mul(&sum).mul(&inv_sum);
    Ok(sos && product == measure::mu_exact())
}

/// Runs the pipeline up to `opts.stop_after`. Structural failures are
/// reported as failed verdicts; `Err` means the computation itself broke.
pub fn run_pipeline(opts: PipelineOptions) -> Result<ProofReport, ProofError> {
    let mut runner = Runner {
        report: ProofReport {
            variable_order: elim_vars().names().to_vec(),
            normalization: "P is the primitive cleared numerator with positive lex-leading coefficient; \
                            A, D1, D2 depend on this choice"
                .into(),
            stages_run: Vec::new(),
            q: None,
            p: None,
            resultant: None,
            factors: None,
            eliminants: Vec::new(),
            verdicts: Vec::new(),
            timings: opts.record_timings.then(Vec::new),
            passed: false,
        },
        opts,
        art: Artifacts::default(),
    };
    // earlier stages are prerequisites of later ones
    for stage in Stage::ALL {
        if stage > runner.opts.stop_after {
            break;
        }
        if stage != Stage::VerifyExclusion && !runner.stage_ok() {
            break;
        }
        let start = Instant::now();
        match stage {
            Stage::BuildQ => runner.build_q()?,
            Stage::Degrees => runner.degrees()?,
            Stage::ResultantY => runner.resultant_y()?,
            Stage::FactorStructure => runner.factor_structure()?,
            Stage::ResultantK2 => runner.resultant_k2()?,
            Stage::VerifyExclusion => runner.verify_exclusion()?,
        }
        runner.report.stages_run.push(stage);
        if let Some(t) = runner.report.timings.as_mut() {
            t.push(StageTiming {
                stage,
                millis: start.elapsed().as_millis(),
            });
        }
    }
    let r = &mut runner.report;
    r.passed = r.stages_run.last() == Some(&runner.opts.stop_after) && r.verdicts.iter().all(|v| v.passed);
    Ok(runner.report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positivity_witness_at_three() {
        let g = positivity_factor();
        let at = g.eval_var(M0, &3.into()).eval_var(C2, &0.into());
        assert_eq!(at.as_constant(), Some(BigInt::from(150)));
        let shifted = shift_var(&g, M0, 3);
        assert!(shifted.terms().all(|(_, c)| !c.is_negative()));
    }

    #[test]
    fn shift_is_taylor_translation() {
        let p = lin(1, -1).pow(3);
        let s = shift_var(&p, M0, 1);
        assert_eq!(s, lin(1, 0).pow(3));
    }

    #[test]
    fn mu_bound_identities_hold() {
        assert!(mu_bound_identities().unwrap());
    }

    #[test]
    fn factor_structure_of_planted_product() {
        let v = elim_vars();
        let x = v.var("X");
        let l = &x.scale(&4.into()) - &MultiPoly::one(v);
        let body = &x * &v.var("C2") - v.var("M0") + MultiPoly::constant(v, 2);
        let r = (x.pow(4) * l.pow(6) * body.clone()).scale(&(-6).into());
        let f = factor_structure(&r).unwrap();
        assert_eq!((f.x_exponent, f.four_x_minus_one_exponent), (4, 6));
        assert_eq!(f.a, BigInt::from(-6));
        assert_eq!(f.coefficients.len(), 2);
        assert_eq!(MultiPoly::from_univariate(v, X, &f.coefficients), body);
    }

    #[test]
    fn early_stages_run_alone() {
        let report = run_pipeline(PipelineOptions {
            stop_after: Stage::Degrees,
            record_timings: false,
            ..Default::default()
        })
        .unwrap();
        assert!(report.passed);
        assert_eq!(report.stages_run, vec![Stage::BuildQ, Stage::Degrees]);
        assert_eq!(report.p.unwrap().raw_degrees, [60, 60, 2, 4]);
    }

    #[test]
    fn stage_names_round_trip() {
        for s in Stage::ALL {
            assert_eq!(s.name().parse::<Stage>().unwrap(), s);
        }
        assert!("bogus".parse::<Stage>().is_err());
    }
}
