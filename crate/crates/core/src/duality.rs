//! The duality sums `A_d`, `B_d`, their boundary correction coefficients and
//! the identity checkers for the three level regimes.
//!
//! With `x_ij = x_i / x_j` and `d_ij = d_i - d_j`:
//!
//! ```text
//! A_d(x, I, l) = Σ_{|d_I| = d}  Π_{i∈I} (x_i^{d_i} q^{d_i(d_i-1)/2})^l
//!                / ( Π_{i,j∈I} (q^{d_ij+1} x_ij; q)_{d_j} · Π_{i∈I, j∉I} (q x_ij; q)_{d_i} )
//! B_d(x, I, l) = Σ_{|d_I| = d}  Π_{i∈I} (x_i^{-d_i} q^{d_i(d_i+1)/2})^l
//!                / ( Π_{i,j∈I} (q^{d_ij+1} x_ji; q)_{d_j} · Π_{i∈I, j∉I} (q x_ji; q)_{d_i} )
//! ```
//!
//! Inside the level window `1 - |I| <= l <= n - |I| - 1` the identity
//! `A_d(x, I, l) = B_d(x, I^c, -l)` holds; at `l = n - |I|` and `l = -|I|`
//! it holds after the `C_s` / `D_s` corrections.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::compositions::{weak_compositions, Composition};
use crate::error::{Error, Result};
use crate::field::{Field, ParameterPoint};
use crate::qseries::{level_weight_a, level_weight_b, qfactorial, qpochhammer_inv};

/// A nonempty proper subset of `{0, ..., n-1}`, stored sorted.
///
/// Displayed 1-based, matching the usual `[n] = {1, ..., n}` labelling.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexSubset {
    n: usize,
    members: Vec<usize>,
}

impl IndexSubset {
    /// Build from 0-based members.
    pub fn new(n: usize, members: &[usize]) -> Result<Self> {
        let mut m = members.to_vec();
        m.sort_unstable();
        m.dedup();
        if m.len() != members.len() {
            return Err(Error::InvalidArgument(format!(
                "duplicate members in subset {members:?}"
            )));
        }
        if m.iter().any(|&i| i >= n) {
            return Err(Error::InvalidArgument(format!(
                "subset {members:?} is not contained in [0, {n})"
            )));
        }
        if m.is_empty() || m.len() >= n {
            return Err(Error::InvalidArgument(format!(
                "subset must be nonempty and proper, got {} of {n} elements",
                m.len()
            )));
        }
        Ok(IndexSubset { n, members: m })
    }

    /// Build from 1-based labels, e.g. `one_based(3, &[1, 2])`.
    pub fn one_based(n: usize, labels: &[usize]) -> Result<Self> {
        if labels.contains(&0) {
            return Err(Error::InvalidArgument("1-based labels start at 1".into()));
        }
        let zero: Vec<usize> = labels.iter().map(|&i| i - 1).collect();
        IndexSubset::new(n, &zero)
    }

    /// `{0, ..., r-1}`.
    pub fn leading(n: usize, r: usize) -> Result<Self> {
        IndexSubset::new(n, &(0..r).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn complement(&self) -> IndexSubset {
        IndexSubset {
            n: self.n,
            members: (0..self.n).filter(|i| !self.contains(*i)).collect(),
        }
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

/// Position of a level relative to the window `1 - r <= l <= n - r - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Interior,
    UpperBoundary,
    LowerBoundary,
    OutOfRange,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Interior => "interior",
            Regime::UpperBoundary => "upper_boundary",
            Regime::LowerBoundary => "lower_boundary",
            Regime::OutOfRange => "out_of_range",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelSpec {
    pub l: i64,
    pub regime: Regime,
}

impl LevelSpec {
    pub fn new(n: usize, r: usize, l: i64) -> Self {
        LevelSpec {
            l,
            regime: classify_level(n, r, l),
        }
    }
}

pub fn classify_level(n: usize, r: usize, l: i64) -> Regime {
    let (n, r) = (n as i64, r as i64);
    if 1 - r <= l && l <= n - r - 1 {
        Regime::Interior
    } else if l == n - r {
        Regime::UpperBoundary
    } else if l == -r {
        Regime::LowerBoundary
    } else {
        Regime::OutOfRange
    }
}

/// Human-readable statement of the valid levels for `(n, r)`.
pub fn level_window_message(n: usize, r: usize) -> String {
    let (n, r) = (n as i64, r as i64);
    format!(
        "valid levels for n={n}, r={r}: interior window 1-r <= l <= n-r-1, i.e. {} <= l <= {}; boundary levels l = -r = {} and l = n-r = {}",
        1 - r,
        n - r - 1,
        -r,
        n - r
    )
}

/// One identity instance `(point, I, d, l)`.
#[derive(Clone, Debug)]
pub struct DualityCase<F> {
    pub point: ParameterPoint<F>,
    pub subset: IndexSubset,
    pub d: u32,
    pub level: LevelSpec,
}

impl<F: Field> DualityCase<F> {
    pub fn new(point: ParameterPoint<F>, subset: IndexSubset, d: u32, l: i64) -> Result<Self> {
        if point.n() != subset.n() {
            return Err(Error::InvalidArgument(format!(
                "point has {} coordinates but the subset lives in [{}]",
                point.n(),
                subset.n()
            )));
        }
        if point.guard_depth() < d + 1 {
            return Err(Error::InvalidArgument(format!(
                "guard depth {} is below d + 1 = {}",
                point.guard_depth(),
                d + 1
            )));
        }
        let level = LevelSpec::new(subset.n(), subset.len(), l);
        Ok(DualityCase {
            point,
            subset,
            d,
            level,
        })
    }

    pub fn n(&self) -> usize {
        self.subset.n()
    }

    pub fn r(&self) -> usize {
        self.subset.len()
    }
}

/// Outcome of one exact identity check, with both sides as witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict<F> {
    pub holds: bool,
    pub lhs: F,
    pub rhs: F,
}

impl<F: Field> Verdict<F> {
    pub fn compare(lhs: F, rhs: F) -> Self {
        Verdict {
            holds: lhs == rhs,
            lhs,
            rhs,
        }
    }
}

// ---------------------------------------------------------------------------
// A and B sums

/// The A-side summand of one composition (aligned with `subset.members()`).
pub fn a_summand<F: Field>(
    point: &ParameterPoint<F>,
    subset: &IndexSubset,
    c: &Composition,
    l: i64,
) -> Result<F> {
    summand(point, subset, c, l, Side::A)
}

/// The B-side summand of one composition.
pub fn b_summand<F: Field>(
    point: &ParameterPoint<F>,
    subset: &IndexSubset,
    c: &Composition,
    l: i64,
) -> Result<F> {
    summand(point, subset, c, l, Side::B)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    A,
    B,
}

fn summand<F: Field>(
    point: &ParameterPoint<F>,
    subset: &IndexSubset,
    c: &Composition,
    l: i64,
    side: Side,
) -> Result<F> {
    let q = point.q();
    let members = subset.members();
    let outside = subset.complement();
    // x_ij for A, x_ji for B
    let ratio = |i: usize, j: usize| match side {
        Side::A => point.ratio(i, j),
        Side::B => point.ratio(j, i),
    };
    let mut acc = q.one_like();
    for (a, &i) in members.iter().enumerate() {
        let di = c.part(a);
        let weight = match side {
            Side::A => level_weight_a(point.x_at(i), q, di, l)?,
            Side::B => level_weight_b(point.x_at(i), q, di, l)?,
        };
        acc = acc.mul(&weight);
        for (b, &j) in members.iter().enumerate() {
            let dj = c.part(b);
            let shift = q.pow(di as i64 - dj as i64 + 1)?;
            let arg = shift.mul(&ratio(i, j));
            acc = acc.mul(&qpochhammer_inv(&arg, q, dj as i64)?);
        }
        for &j in outside.members() {
            let arg = q.mul(&ratio(i, j));
            acc = acc.mul(&qpochhammer_inv(&arg, q, di as i64)?);
        }
    }
    Ok(acc)
}

fn sum_over<F: Field>(
    point: &ParameterPoint<F>,
    subset: &IndexSubset,
    d: u32,
    l: i64,
    side: Side,
) -> Result<F> {
    let mut total = point.q().zero_like();
    for c in weak_compositions(d, subset.len()) {
        total = total.add(&summand(point, subset, &c, l, side)?);
    }
    Ok(total)
}

/// `A_d(x, I, l)`.
pub fn a_sum<F: Field>(point: &ParameterPoint<F>, subset: &IndexSubset, d: u32, l: i64) -> Result<F> {
    sum_over(point, subset, d, l, Side::A)
}

/// `B_d(x, I, l)`; note the subset is the B-side argument set.
pub fn b_sum<F: Field>(point: &ParameterPoint<F>, subset: &IndexSubset, d: u32, l: i64) -> Result<F> {
    sum_over(point, subset, d, l, Side::B)
}

// ---------------------------------------------------------------------------
// Boundary coefficients

fn check_s(d: u32, s: u32) -> Result<()> {
    if s > d {
        return Err(Error::InvalidArgument(format!("s = {s} exceeds d = {d}")));
    }
    Ok(())
}

fn sign_power<F: Field>(one: &F, exponent: u64) -> F {
    if exponent % 2 == 0 {
        one.clone()
    } else {
        one.neg()
    }
}

/// Upper-boundary coefficient for the A-side set `I`:
/// `(-1)^{(n-r)s} Π_{i∉I} x_i^s / ((q;q)_s q^{s(d-s+n-r)})`.
pub fn boundary_c<F: Field>(
    point: &ParameterPoint<F>,
    subset: &IndexSubset,
    d: u32,
    s: u32,
) -> Result<F> {
    check_s(d, s)?;
    let q = point.q();
    let k = (subset.n() - subset.len()) as i64;
    let (s, d) = (s as i64, d as i64);
    let mut num = sign_power(&q.one_like(), (k * s) as u64);
    for &i in subset.complement().members() {
        num = num.mul(&point.x_at(i).pow(s)?);
    }
    let den = qfactorial(q, s as u32)?.mul(&q.pow(s * (d - s + k))?);
    num.div(&den)
}

/// Lower-boundary coefficient for the A-side set `I`:
/// `(-1)^{|I|s} Π_{i∈I} x_i^{-s} / ((q;q)_s q^{s(d-s)})`.
pub fn boundary_d<F: Field>(
    point: &ParameterPoint<F>,
    subset: &IndexSubset,
    d: u32,
    s: u32,
) -> Result<F> {
    check_s(d, s)?;
    let q = point.q();
    let r = subset.len() as i64;
    let (s, d) = (s as i64, d as i64);
    let mut num = sign_power(&q.one_like(), (r * s) as u64);
    for &i in subset.members() {
        num = num.mul(&point.x_at(i).pow(-s)?);
    }
    let den = qfactorial(q, s as u32)?.mul(&q.pow(s * (d - s))?);
    num.div(&den)
}

// ---------------------------------------------------------------------------
// Checkers

fn expect_regime<F>(case: &DualityCase<F>, expected: Regime) -> Result<()> {
    if case.level.regime != expected {
        return Err(Error::RegimeMismatch {
            expected: expected.to_string(),
            found: case.level.regime.to_string(),
        });
    }
    Ok(())
}

/// `A_d(x, I, l) = B_d(x, I^c, -l)` inside the level window.
pub fn verify_interior<F: Field>(case: &DualityCase<F>) -> Result<Verdict<F>> {
    expect_regime(case, Regime::Interior)?;
    let l = case.level.l;
    let lhs = a_sum(&case.point, &case.subset, case.d, l)?;
    let rhs = b_sum(&case.point, &case.subset.complement(), case.d, -l)?;
    Ok(Verdict::compare(lhs, rhs))
}

/// `A_d(x, I, n-r) = Σ_s C_s B_{d-s}(x, I^c, -(n-r))`.
pub fn verify_upper_boundary<F: Field>(case: &DualityCase<F>) -> Result<Verdict<F>> {
    expect_regime(case, Regime::UpperBoundary)?;
    let l = case.level.l;
    let lhs = a_sum(&case.point, &case.subset, case.d, l)?;
    let comp = case.subset.complement();
    let mut rhs = case.point.q().zero_like();
    for s in 0..=case.d {
        let c = boundary_c(&case.point, &case.subset, case.d, s)?;
        let b = b_sum(&case.point, &comp, case.d - s, -l)?;
        rhs = rhs.add(&c.mul(&b));
    }
    Ok(Verdict::compare(lhs, rhs))
}

/// `B_d(x, I^c, r) = Σ_s D_s A_{d-s}(x, I, -r)`.
pub fn verify_lower_boundary<F: Field>(case: &DualityCase<F>) -> Result<Verdict<F>> {
    expect_regime(case, Regime::LowerBoundary)?;
    let l = case.level.l;
    let lhs = b_sum(&case.point, &case.subset.complement(), case.d, -l)?;
    let mut rhs = case.point.q().zero_like();
    for s in 0..=case.d {
        let coeff = boundary_d(&case.point, &case.subset, case.d, s)?;
        let a = a_sum(&case.point, &case.subset, case.d - s, l)?;
        rhs = rhs.add(&coeff.mul(&a));
    }
    Ok(Verdict::compare(lhs, rhs))
}

/// Dispatch to the checker matching the case's regime.
pub fn verify_case<F: Field>(case: &DualityCase<F>) -> Result<Verdict<F>> {
    match case.level.regime {
        Regime::Interior => verify_interior(case),
        Regime::UpperBoundary => verify_upper_boundary(case),
        Regime::LowerBoundary => verify_lower_boundary(case),
        Regime::OutOfRange => Err(Error::InvalidArgument(format!(
            "level {} is out of range; {}",
            case.level.l,
            level_window_message(case.n(), case.r())
        ))),
    }
}

/// Evaluate the `n = 3` unity sum
/// `Σ_{d1+d2=d} (q;q)_d / ((q;q)_{d1} (q;q)_{d2})
///   Π_{i≠j} (q^{d_i+1} x_i3; q)_{d-d_i} / (q^{d_i-d_j+1} x_ij; q)_{d_j}`
/// and compare it with 1.
pub fn corollary_unity<F: Field>(point: &ParameterPoint<F>, d: u32) -> Result<Verdict<F>> {
    if point.n() != 3 {
        return Err(Error::InvalidArgument(format!(
            "the unity sum is defined for n = 3, got n = {}",
            point.n()
        )));
    }
    let sum = unity_sum(point, d)?;
    let one = sum.one_like();
    Ok(Verdict::compare(sum, one))
}

fn unity_sum<F: Field>(point: &ParameterPoint<F>, d: u32) -> Result<F> {
    let q = point.q();
    let qd = qfactorial(q, d)?;
    let mut total = q.zero_like();
    for c in weak_compositions(d, 2) {
        let parts = c.parts();
        let mut term = qd
            .mul(&qfactorial(q, parts[0])?.inv().expect("nonzero"))
            .mul(&qfactorial(q, parts[1])?.inv().expect("nonzero"));
        for (i, j) in [(0usize, 1usize), (1, 0)] {
            let (di, dj) = (parts[i] as i64, parts[j] as i64);
            let num_arg = q.pow(di + 1)?.mul(&point.ratio(i, 2));
            let num = crate::qseries::qpochhammer(&num_arg, q, d as i64 - di)?;
            let den_arg = q.pow(di - dj + 1)?.mul(&point.ratio(i, j));
            term = term.mul(&num).mul(&qpochhammer_inv(&den_arg, q, dj)?);
        }
        total = total.add(&term);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldSpec, Fp, Rational};

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn point(q: Rational, x: &[Rational], depth: u32) -> ParameterPoint<Rational> {
        ParameterPoint::new(q, x.to_vec(), depth).unwrap()
    }

    fn one_minus(a: &Rational) -> Rational {
        a.one_like().sub(a)
    }

    #[test]
    fn subset_complement_is_involutive() {
        let s = IndexSubset::one_based(4, &[1, 3]).unwrap();
        assert_eq!(s.complement().to_string(), "{2,4}");
        assert_eq!(s.complement().complement(), s);
        assert!(IndexSubset::new(3, &[]).is_err());
        assert!(IndexSubset::new(3, &[0, 1, 2]).is_err());
        assert!(IndexSubset::new(3, &[0, 3]).is_err());
        assert!(IndexSubset::new(3, &[1, 1]).is_err());
    }

    #[test]
    fn regime_classification() {
        // n = 3, r = 2: window -1..=0, upper 1, lower -2
        assert_eq!(classify_level(3, 2, -1), Regime::Interior);
        assert_eq!(classify_level(3, 2, 0), Regime::Interior);
        assert_eq!(classify_level(3, 2, 1), Regime::UpperBoundary);
        assert_eq!(classify_level(3, 2, -2), Regime::LowerBoundary);
        assert_eq!(classify_level(3, 2, 5), Regime::OutOfRange);
        assert_eq!(classify_level(3, 2, -3), Regime::OutOfRange);
        // n = 2, r = 1: window is {0}
        assert_eq!(classify_level(2, 1, 0), Regime::Interior);
        assert_eq!(classify_level(2, 1, 1), Regime::UpperBoundary);
        assert_eq!(classify_level(2, 1, -1), Regime::LowerBoundary);
    }

    #[test]
    fn degree_zero_is_one() {
        let pt: ParameterPoint<Rational> =
            crate::field::sample_parameter_point(4, 3, 5, FieldSpec::Rational).unwrap();
        let s = IndexSubset::one_based(4, &[2, 4]).unwrap();
        let one = Rational::from_int(1);
        for l in -3..=3 {
            assert_eq!(a_sum(&pt, &s, 0, l).unwrap(), one);
            assert_eq!(b_sum(&pt, &s, 0, l).unwrap(), one);
        }
        assert_eq!(boundary_c(&pt, &s, 0, 0).unwrap(), one);
        assert_eq!(boundary_d(&pt, &s, 0, 0).unwrap(), one);
    }

    #[test]
    fn a_sum_degree_one_hand_expansion() {
        let q = rat(1, 2);
        let x = [rat(2, 1), rat(3, 1), rat(5, 7)];
        let pt = point(q.clone(), &x, 3);
        let s = IndexSubset::one_based(3, &[1, 2]).unwrap();
        let x12 = x[0].div(&x[1]).unwrap();
        let x21 = x[1].div(&x[0]).unwrap();
        let x13 = x[0].div(&x[2]).unwrap();
        let x23 = x[1].div(&x[2]).unwrap();
        let t1 = one_minus(&q)
            .mul(&one_minus(&x21))
            .mul(&one_minus(&q.mul(&x13)))
            .inv()
            .unwrap();
        let t2 = one_minus(&q)
            .mul(&one_minus(&x12))
            .mul(&one_minus(&q.mul(&x23)))
            .inv()
            .unwrap();
        assert_eq!(a_sum(&pt, &s, 1, 0).unwrap(), t1.add(&t2));

        let closed = one_minus(&q)
            .mul(&one_minus(&q.mul(&x13)))
            .mul(&one_minus(&q.mul(&x23)))
            .inv()
            .unwrap();
        let comp = IndexSubset::one_based(3, &[3]).unwrap();
        assert_eq!(b_sum(&pt, &comp, 1, 0).unwrap(), closed);
        assert_eq!(t1.add(&t2), closed);
    }

    #[test]
    fn single_composition_forms() {
        // n = 2, I = {1}
        let q = rat(1, 2);
        let x = [rat(2, 1), rat(3, 1)];
        let pt = point(q.clone(), &x, 3);
        let i1 = IndexSubset::one_based(2, &[1]).unwrap();
        let i2 = IndexSubset::one_based(2, &[2]).unwrap();
        let x12 = x[0].div(&x[1]).unwrap();
        let den = one_minus(&q).mul(&one_minus(&q.mul(&x12)));
        // A_1(I={1}, l=1) = x1 / ((1-q)(1-q x12))
        assert_eq!(a_sum(&pt, &i1, 1, 1).unwrap(), x[0].div(&den).unwrap());
        // B_1({2}, l=-1) = x2 / (q (1-q)(1-q x12))
        assert_eq!(
            b_sum(&pt, &i2, 1, -1).unwrap(),
            x[1].div(&q.mul(&den)).unwrap()
        );
    }

    #[test]
    fn boundary_coefficients_hand_values() {
        let q = rat(1, 2);
        let x = [rat(2, 1), rat(3, 1)];
        let pt = point(q.clone(), &x, 3);
        let i1 = IndexSubset::one_based(2, &[1]).unwrap();
        // C_1 = -x2 / ((1-q) q)
        assert_eq!(
            boundary_c(&pt, &i1, 1, 1).unwrap(),
            x[1].neg().div(&one_minus(&q).mul(&q)).unwrap()
        );
        // D_1 = -1 / (x1 (1-q))
        assert_eq!(
            boundary_d(&pt, &i1, 1, 1).unwrap(),
            x[0].mul(&one_minus(&q)).inv().unwrap().neg()
        );

        let x3 = [rat(2, 1), rat(3, 1), rat(7, 5)];
        let pt3 = point(q.clone(), &x3, 3);
        let i12 = IndexSubset::one_based(3, &[1, 2]).unwrap();
        assert_eq!(
            boundary_c(&pt3, &i12, 1, 1).unwrap(),
            x3[2].neg().div(&one_minus(&q).mul(&q)).unwrap()
        );

        let x4 = [rat(2, 1), rat(3, 1), rat(7, 5), rat(-4, 3)];
        let pt4 = point(q.clone(), &x4, 3);
        let i12 = IndexSubset::one_based(4, &[1, 2]).unwrap();
        let expect = x4[0]
            .mul(&x4[1])
            .mul(&one_minus(&q))
            .mul(&q)
            .inv()
            .unwrap();
        assert_eq!(boundary_d(&pt4, &i12, 2, 1).unwrap(), expect);
        assert!(boundary_d(&pt4, &i12, 2, 3).is_err());
    }

    #[test]
    fn interior_small_cases() {
        let q = rat(1, 2);
        let pt2 = point(q.clone(), &[rat(2, 1), rat(3, 1)], 3);
        let case = DualityCase::new(pt2, IndexSubset::one_based(2, &[1]).unwrap(), 1, 0).unwrap();
        let v = verify_interior(&case).unwrap();
        assert!(v.holds);
        let x12 = rat(2, 3);
        let closed = one_minus(&q)
            .mul(&one_minus(&q.mul(&x12)))
            .inv()
            .unwrap();
        assert_eq!(v.lhs, closed);

        let pt3 = point(q.clone(), &[rat(2, 1), rat(3, 1), rat(-5, 7)], 4);
        for d in 1..=2 {
            let case =
                DualityCase::new(pt3.clone(), IndexSubset::one_based(3, &[1, 2]).unwrap(), d, 0)
                    .unwrap();
            assert!(verify_interior(&case).unwrap().holds, "d = {d}");
        }
    }

    #[test]
    fn boundary_hand_cases() {
        let q = rat(1, 2);
        let x = [rat(2, 1), rat(3, 1)];
        let pt = point(q.clone(), &x, 3);
        let i1 = IndexSubset::one_based(2, &[1]).unwrap();

        let up = DualityCase::new(pt.clone(), i1.clone(), 1, 1).unwrap();
        let v = verify_upper_boundary(&up).unwrap();
        assert!(v.holds);
        // A_1 - B_1 = -x2 / (q (1-q))
        let b1 = b_sum(&pt, &i1.complement(), 1, -1).unwrap();
        assert_eq!(
            v.lhs.sub(&b1),
            x[1].neg().div(&q.mul(&one_minus(&q))).unwrap()
        );

        let low = DualityCase::new(pt.clone(), i1.clone(), 1, -1).unwrap();
        let v = verify_lower_boundary(&low).unwrap();
        assert!(v.holds);
        let a1 = a_sum(&pt, &i1, 1, -1).unwrap();
        assert_eq!(
            v.lhs.sub(&a1),
            x[0].mul(&one_minus(&q)).inv().unwrap().neg()
        );
    }

    #[test]
    fn regime_mismatch_is_rejected() {
        let pt = point(rat(1, 2), &[rat(2, 1), rat(3, 1)], 3);
        let up = DualityCase::new(pt, IndexSubset::one_based(2, &[1]).unwrap(), 1, 1).unwrap();
        assert!(matches!(
            verify_interior(&up),
            Err(Error::RegimeMismatch { .. })
        ));
        assert!(verify_lower_boundary(&up).is_err());
    }

    #[test]
    fn uncorrected_upper_level_fails() {
        let pt = point(rat(1, 2), &[rat(2, 1), rat(3, 1)], 3);
        let i1 = IndexSubset::one_based(2, &[1]).unwrap();
        let a = a_sum(&pt, &i1, 1, 1).unwrap();
        let b = b_sum(&pt, &i1.complement(), 1, -1).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn case_rejects_shallow_guards() {
        let pt = point(rat(1, 2), &[rat(2, 1), rat(3, 1)], 2);
        assert!(DualityCase::new(pt, IndexSubset::one_based(2, &[1]).unwrap(), 2, 0).is_err());
    }

    #[test]
    fn unity_low_degrees_prime_field() {
        let spec = FieldSpec::fp61();
        for seed in 0..5 {
            let pt: ParameterPoint<Fp> =
                crate::field::sample_parameter_point(3, 6, seed, spec).unwrap();
            for d in 0..=4 {
                assert!(corollary_unity(&pt, d).unwrap().holds);
            }
        }
    }
}
