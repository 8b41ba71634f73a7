//! q-Pochhammer symbols with integer subscripts of either sign, and the
//! level-weight monomials that appear in the A/B numerators.
//!
//! Convention for `(a; q)_d`:
//!
//! | d     | value                                   |
//! |-------|-----------------------------------------|
//! | d > 0 | `(1 - a)(1 - qa)...(1 - q^{d-1} a)`     |
//! | d = 0 | `1`                                     |
//! | d < 0 | `1 / ((1 - q^{-1} a)...(1 - q^{d} a))`  |

use crate::error::{Error, Result};
use crate::field::Field;

fn pole<F: Field>(a: &F, q: &F, k: i64) -> Error {
    Error::Pole {
        a: a.to_string(),
        q: q.to_string(),
        k,
    }
}

/// `(a; q)_d` for any integer `d`.
///
/// A vanishing factor is reported as [`Error::Pole`] carrying the exponent
/// `k` of the offending `1 - q^k a`, also for `d > 0` where the product
/// would merely be zero: every caller divides by it.
pub fn qpochhammer<F: Field>(a: &F, q: &F, d: i64) -> Result<F> {
    if q.is_zero() {
        return Err(Error::InvalidArgument("q-Pochhammer base q must be nonzero".into()));
    }
    let one = a.one_like();
    if d == 0 {
        return Ok(one);
    }
    let (start, step) = if d > 0 {
        (a.clone(), q.clone())
    } else {
        let q_inv = q.inv().expect("q is nonzero");
        (a.mul(&q_inv), q_inv)
    };
    let mut prod = one.clone();
    let mut term = start;
    for idx in 0..d.unsigned_abs() as i64 {
        let factor = one.sub(&term);
        if factor.is_zero() {
            let k = if d > 0 { idx } else { -(idx + 1) };
            return Err(pole(a, q, k));
        }
        prod = prod.mul(&factor);
        term = term.mul(&step);
    }
    if d > 0 {
        Ok(prod)
    } else {
        Ok(prod.inv().expect("factors are nonzero"))
    }
}

/// `1 / (a; q)_d`, the form every denominator uses.
pub fn qpochhammer_inv<F: Field>(a: &F, q: &F, d: i64) -> Result<F> {
    qpochhammer(a, q, d).map(|v| v.inv().expect("vanishing factors are reported as poles"))
}

/// `(q; q)_d`.
pub fn qfactorial<F: Field>(q: &F, d: u32) -> Result<F> {
    qpochhammer(q, q, d as i64)
}

/// `(x^{d} q^{d(d-1)/2})^l`, the A-side level weight for one index.
pub fn level_weight_a<F: Field>(x: &F, q: &F, d: u32, l: i64) -> Result<F> {
    let d = d as i64;
    let x_exp = d * l;
    let q_exp = d * (d - 1) / 2 * l;
    Ok(x.pow(x_exp)?.mul(&q.pow(q_exp)?))
}

/// `(x^{-d} q^{d(d+1)/2})^l`, the B-side level weight for one index.
pub fn level_weight_b<F: Field>(x: &F, q: &F, d: u32, l: i64) -> Result<F> {
    let d = d as i64;
    let x_exp = -d * l;
    let q_exp = d * (d + 1) / 2 * l;
    Ok(x.pow(x_exp)?.mul(&q.pow(q_exp)?))
}
