//! Exact Newton interpolation over consecutive integer nodes.
//!
//! For an integer polynomial sampled at `t0, t0+1, ..., t0+n`, every divided
//! difference is an integer: level `k` is the previous level's difference
//! divided by `k`. A division that leaves a remainder therefore proves the
//! samples do not come from an integer polynomial of degree `<= n`, which is
//! how a violated degree bound surfaces.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::ProofError;

/// Interpolates vector-valued samples taken at `start, start+1, ...`.
///
/// `samples[i][j]` is component `j` at node `start + i`; all rows must have
/// equal length. Returns monomial coefficients `out[d][j]` (degree `d`).
pub fn interpolate_vectors(start: i64, samples: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>, ProofError> {
    let n = samples.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let width = samples[0].len();
    if samples.iter().any(|s| s.len() != width) {
        return Err(ProofError::Interpolation("ragged sample rows".into()));
    }

    // divided differences in place: table[k] becomes f[t0..tk]
    let mut table: Vec<Vec<BigInt>> = samples.to_vec();
    for level in 1..n {
        let divisor = BigInt::from(level as i64);
        for i in (level..n).rev() {
            for j in 0..width {
                let diff = &table[i][j] - &table[i - 1][j];
                let (q, r) = diff.div_rem(&divisor);
                if !r.is_zero() {
                    return Err(ProofError::Interpolation(format!(
                        "non-integral divided difference at level {level}; degree bound violated"
                    )));
                }
                table[i][j] = q;
            }
        }
    }

    // Newton form to monomial form by Horner on (t - t_k)
    let mut coeffs = vec![vec![BigInt::zero(); width]; n];
    for k in (0..n).rev() {
        let node = BigInt::from(start + k as i64);
        // coeffs <- coeffs * (t - node) + table[k]
        for d in (0..n).rev() {
            for j in 0..width {
                let lower = if d > 0 { coeffs[d - 1][j].clone() } else { BigInt::zero() };
                let cur = std::mem::take(&mut coeffs[d][j]);
                coeffs[d][j] = lower - &node * cur;
            }
        }
        for j in 0..width {
            coeffs[0][j] += &table[k][j];
        }
    }
    Ok(coeffs)
}
