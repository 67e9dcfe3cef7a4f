//! Elimination of `Y` from `P` and `Q` by evaluation and interpolation.
//!
//! `X` is kept symbolic: at each integer point of the parameter box
//! `(C2, K2, M0)` both polynomials become elements of `Z[X][Y]` and their
//! resultant is computed by the subresultant PRS over `Z[X]`. The parameter
//! dependence is then recovered by exact Newton interpolation one variable at
//! a time.
//!
//! Degree bounds come from the Sylvester matrix: with `m = deg_Y P` and
//! `n = deg_Y Q`, every term of the determinant is a product of `n`
//! coefficients of `P` and `m` coefficients of `Q`, so the degree in a
//! parameter `v` is at most `n * max deg_v(P_j) + m * max deg_v(Q_j)`.
//! Extra margin nodes are sampled, and the interpolated coefficients in the
//! margin must come out zero.

use std::thread;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::UniPoly;
use crate::error::ProofError;
use crate::interp::interpolate_vectors;
use crate::measure::{elim_vars, C2, K2, M0, X, Y};
use crate::poly::{Exponents, MultiPoly};
use crate::resultant::{determinant_bareiss, resultant, sylvester_matrix};

/// Parameters interpolated, in nesting order (outermost first).
const PARAMS: [usize; 3] = [C2, K2, M0];

/// First interpolation node; nodes are `NODE_START, NODE_START + 1, ...`.
const NODE_START: i64 = 1;

#[derive(Clone, Debug)]
pub struct Elimination {
    /// `Res_Y(P, Q)` in the elimination ring (no `Y`).
    pub r: MultiPoly,
    /// Rigorous degree bounds in `C2, K2, M0`.
    pub bounds: [u32; 3],
    /// Degrees actually found in `C2, K2, M0`.
    pub degrees: [u32; 3],
    /// Number of sample points evaluated.
    pub samples: usize,
}

/// Outcome of comparing `R` against a direct Sylvester determinant.
#[derive(Clone, Debug)]
pub struct SpecializationCheck {
    /// `(X, C2, K2, M0)`.
    pub point: [i64; 4],
    pub agrees: bool,
}

fn max_param_degree(p: &MultiPoly, var: usize) -> u32 {
    p.degree_in(var)
}

/// Upper bounds for `deg_v Res_Y(P, Q)` for `v` in `C2, K2, M0`.
pub fn degree_bounds(p: &MultiPoly, q: &MultiPoly) -> [u32; 3] {
    let m = p.degree_in(Y);
    let n = q.degree_in(Y);
    PARAMS.map(|v| n * max_param_degree(p, v) + m * max_param_degree(q, v))
}

/// Coefficient table `[y][x]` of a polynomial after substituting the parameters.
fn specialize(p: &MultiPoly, values: &[BigInt; 3]) -> UniPoly<UniPoly<BigInt>> {
    let dy = p.degree_in(Y) as usize;
    let dx = p.degree_in(X) as usize;
    let mut powers: Vec<Vec<BigInt>> = Vec::with_capacity(3);
    for (i, &v) in PARAMS.iter().enumerate() {
        let d = p.degree_in(v) as usize;
        let mut row = vec![BigInt::one()];
        for k in 1..=d {
            let next = &row[k - 1] * &values[i];
            row.push(next);
        }
        powers.push(row);
    }
    let mut table = vec![vec![BigInt::zero(); dx + 1]; dy + 1];
    for (e, c) in p.terms() {
        let mut t = c.clone();
        for (i, &v) in PARAMS.iter().enumerate() {
            if e[v] > 0 {
                t *= &powers[i][e[v] as usize];
            }
        }
        table[e[Y] as usize][e[X] as usize] += t;
    }
    let zero_x = UniPoly::zero(BigInt::zero());
    UniPoly::new(
        table
            .into_iter()
            .map(|row| UniPoly::new(row, BigInt::zero()))
            .collect(),
        zero_x,
    )
}

fn sample(
    p: &MultiPoly,
    q: &MultiPoly,
    values: &[BigInt; 3],
) -> Result<UniPoly<BigInt>, ProofError> {
    let sp = specialize(p, values);
    let sq = specialize(q, values);
    // the determinant must be taken at the formal degrees
    if sp.degree() != Some(p.degree_in(Y) as usize) || sq.degree() != Some(q.degree_in(Y) as usize) {
        return Err(ProofError::Interpolation(format!(
            "leading Y coefficient vanishes at parameters {values:?}"
        )));
    }
    Ok(resultant(&sp, &sq))
}

fn grid_points(counts: [usize; 3]) -> Vec<[BigInt; 3]> {
    let mut pts = Vec::with_capacity(counts.iter().product());
    for a in 0..counts[0] {
        for b in 0..counts[1] {
            for c in 0..counts[2] {
                pts.push([a, b, c].map(|i| BigInt::from(NODE_START + i as i64)));
            }
        }
    }
    pts
}

fn evaluate_all(
    p: &MultiPoly,
    q: &MultiPoly,
    points: &[[BigInt; 3]],
    threads: usize,
) -> Result<Vec<UniPoly<BigInt>>, ProofError> {
    let threads = threads.max(1).min(points.len().max(1));
    if threads == 1 {
        return points.iter().map(|v| sample(p, q, v)).collect();
    }
    let chunk = points.len().div_ceil(threads);
    thread::scope(|s| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|v| sample(p, q, v)).collect::<Result<Vec<_>, _>>()))
            .collect();
        let mut out = Vec::with_capacity(points.len());
        for h in handles {
            out.extend(h.join().expect("evaluation worker panicked")?);
        }
        Ok(out)
    })
}

/// Interpolates along one axis of a row-major tensor whose innermost block has `inner` entries.
fn interpolate_axis(
    data: Vec<BigInt>,
    outer: usize,
    count: usize,
    inner: usize,
) -> Result<Vec<BigInt>, ProofError> {
    let mut out = Vec::with_capacity(data.len());
    let mut it = data.into_iter();
    for _ in 0..outer {
        let rows: Vec<Vec<BigInt>> = (0..count).map(|_| it.by_ref().take(inner).collect()).collect();
        for row in interpolate_vectors(NODE_START, &rows)? {
            out.extend(row);
        }
    }
    Ok(out)
}

/// `Res_Y(P, Q)` by evaluation–interpolation with `margin` extra nodes per parameter.
pub fn resultant_y(
    p: &MultiPoly,
    q: &MultiPoly,
    margin: u32,
    threads: usize,
) -> Result<Elimination, ProofError> {
    if p.degree_in(Y) == 0 || q.degree_in(Y) == 0 {
        return Err(ProofError::DegenerateResultant("input constant in Y".into()));
    }
    let bounds = degree_bounds(p, q);
    let counts = bounds.map(|b| (b + 1 + margin) as usize);
    let points = grid_points(counts);
    let values = evaluate_all(p, q, &points, threads)?;

    let width = values.iter().filter_map(|v| v.degree()).max().map_or(1, |d| d + 1);
    let mut data = Vec::with_capacity(points.len() * width);
    for v in &values {
        for i in 0..width {
            data.push(v.coeffs().get(i).cloned().unwrap_or_default());
        }
    }
    // tensor layout [C2][K2][M0][X]; interpolate innermost parameter first
    let data = interpolate_axis(data, counts[0] * counts[1], counts[2], width)?;
    let data = interpolate_axis(data, counts[0], counts[1], counts[2] * width)?;
    let data = interpolate_axis(data, 1, counts[0], counts[1] * counts[2] * width)?;

    let mut terms = Vec::new();
    let mut degrees = [0u32; 3];
    let mut idx = 0;
    for a in 0..counts[0] {
        for b in 0..counts[1] {
            for c in 0..counts[2] {
                for x in 0..width {
                    let coeff = &data[idx];
                    idx += 1;
                    if coeff.is_zero() {
                        continue;
                    }
                    let d = [a as u32, b as u32, c as u32];
                    for k in 0..3 {
                        if d[k] > bounds[k] {
                            return Err(ProofError::Interpolation(format!(
                                "nonzero coefficient beyond the degree bound in {}",
                                elim_vars().names()[PARAMS[k]]
                            )));
                        }
                        degrees[k] = degrees[k].max(d[k]);
                    }
                    let mut e: Exponents = [0; 6];
                    e[X] = x as u16;
                    e[C2] = a as u16;
                    e[K2] = b as u16;
                    e[M0] = c as u16;
                    terms.push((e, coeff.clone()));
                }
            }
        }
    }
    Ok(Elimination {
        r: MultiPoly::from_terms(elim_vars(), terms),
        bounds,
        degrees,
        samples: points.len(),
    })
}

fn substitute_all(p: &MultiPoly, point: &[i64; 4]) -> UniPoly<BigInt> {
    let mut out = p.clone();
    for (var, &val) in [X, C2, K2, M0].iter().zip(point) {
        out = out.eval_var(*var, &BigInt::from(val));
    }
    let coeffs = out
        .to_univariate(Y)
        .into_iter()
        .map(|c| c.as_constant().expect("only Y remains"))
        .collect();
    UniPoly::new(coeffs, BigInt::zero())
}

/// Compares `R` at seeded random integer points with the determinant of the
/// Sylvester matrix of the specialized `P` and `Q`.
pub fn sylvester_check(
    p: &MultiPoly,
    q: &MultiPoly,
    r: &MultiPoly,
    count: usize,
    seed: u64,
) -> Vec<SpecializationCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let point = [(); 4].map(|_| rng.gen_range(-40i64..=40));
            let up = substitute_all(p, &point);
            let uq = substitute_all(q, &point);
            let det = determinant_bareiss(sylvester_matrix(&up, &uq), &BigInt::zero());
            let full = [point[0], 0, point[1], point[2], point[3]].map(BigInt::from);
            let agrees = r.eval_integer(&full) == det;
            SpecializationCheck { point, agrees }
        })
        .collect()
}
