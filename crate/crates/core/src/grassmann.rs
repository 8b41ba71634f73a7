//! Torus fixed points of `Gr(r, n)` and the level correspondence of
//! restricted I-function coefficients under Grassmann duality
//! `Gr(r, n) ≅ Gr(n - r, n)`.
//!
//! The coefficient of `Q^d` in the I-function of `Gr(r, n)` with level `l`
//! for the standard representation is
//!
//! ```text
//! Σ_{|d| = d} Π_{i,j} ratio(d_i - d_j, L_i/L_j) Π_i (L_i^{d_i} q^{d_i(d_i-1)/2})^l
//!             / Π_i Π_{k=1}^{d_i} Π_m (1 - q^k L_i / Λ_m)
//! ```
//!
//! where `ratio(e, x) = (x;q)_∞ / (q^{e+1} x;q)_∞`, a finite product. At a
//! fixed point `I` the Chern roots `L_i` restrict to the torus characters
//! `Λ_i`, `i ∈ I`. The dual Grassmannian sees the characters `Λ_m^{-1}`, and
//! its dual-representation level weight carries `q^{d_i(d_i+1)/2}`.

use std::fmt;

use serde::Serialize;

use crate::compositions::{binomial, weak_compositions};
use crate::duality::{classify_level, level_window_message, IndexSubset, LevelSpec, Regime, Verdict};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::field::{Field, ParameterPoint};
use crate::qseries::{qfactorial, qpochhammer_inv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Primal,
    Dual,
}

/// A torus fixed point: `r` coordinate vectors on the primal side, or their
/// annihilator's `n - r` coordinates on the dual side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedPoint {
    pub subset: IndexSubset,
    pub side: Side,
}

impl FixedPoint {
    pub fn primal(subset: IndexSubset) -> Self {
        FixedPoint {
            subset,
            side: Side::Primal,
        }
    }

    pub fn dual(subset: IndexSubset) -> Self {
        FixedPoint {
            subset,
            side: Side::Dual,
        }
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.side {
            Side::Primal => "primal",
            Side::Dual => "dual",
        };
        write!(f, "{}{}", tag, self.subset)
    }
}

/// All `r`-subsets of `[n]` in lexicographic order, as primal fixed points.
pub fn fixed_points(n: usize, r: usize) -> Result<Vec<FixedPoint>> {
    if r == 0 || r >= n {
        return Err(Error::InvalidArgument(format!(
            "need 0 < r < n, got r = {r}, n = {n}"
        )));
    }
    let mut out = Vec::with_capacity(binomial(n as u128, r as u128) as usize);
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(FixedPoint::primal(IndexSubset::new(n, &idx)?));
        // advance to the next combination
        let mut k = r;
        while k > 0 && idx[k - 1] == n - r + k - 1 {
            k -= 1;
        }
        if k == 0 {
            return Ok(out);
        }
        idx[k - 1] += 1;
        for m in k..r {
            idx[m] = idx[m - 1] + 1;
        }
    }
}

/// The duality bijection: complement subset, side swapped.
pub fn dual_fixed_point(fp: &FixedPoint) -> FixedPoint {
    FixedPoint {
        subset: fp.subset.complement(),
        side: match fp.side {
            Side::Primal => Side::Dual,
            Side::Dual => Side::Primal,
        },
    }
}

/// Degree-`d` correspondence instance on `Gr(r, n)` with torus weights `Λ`.
#[derive(Clone, Debug)]
pub struct GrassmannCase<F> {
    pub weights: ParameterPoint<F>,
    pub r: usize,
    pub d: u32,
    pub level: LevelSpec,
}

impl<F: Field> GrassmannCase<F> {
    pub fn new(weights: ParameterPoint<F>, r: usize, d: u32, l: i64) -> Result<Self> {
        let n = weights.n();
        if r == 0 || r >= n {
            return Err(Error::InvalidArgument(format!(
                "need 0 < r < n, got r = {r}, n = {n}"
            )));
        }
        if weights.guard_depth() < d + 1 {
            return Err(Error::InvalidArgument(format!(
                "guard depth {} is below d + 1 = {}",
                weights.guard_depth(),
                d + 1
            )));
        }
        Ok(GrassmannCase {
            weights,
            r,
            d,
            level: LevelSpec::new(n, r, l),
        })
    }

    pub fn n(&self) -> usize {
        self.weights.n()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Representation {
    Standard,
    Dual,
}

/// `ratio(e, x) = Π_{k ≤ e} (1 - q^k x) / Π_{k ≤ 0} (1 - q^k x)`.
fn ratio<F: Field>(e: i64, x: &F, q: &F) -> Result<F> {
    let one = q.one_like();
    let mut acc = one.clone();
    let range = if e >= 0 { 1..=e } else { e + 1..=0 };
    for k in range {
        acc = acc.mul(&one.sub(&q.pow(k)?.mul(x)));
    }
    if e >= 0 {
        Ok(acc)
    } else {
        acc.inv()
            .ok_or_else(|| Error::DivisionByZero(format!("ratio({e}, {x}) has a vanishing factor")))
    }
}

/// I-function coefficient restricted to the fixed point `subset`, where the
/// Grassmannian sees the torus characters `chars`.
fn restricted_coefficient<F: Field>(
    chars: &[F],
    q: &F,
    subset: &IndexSubset,
    d: u32,
    l: i64,
    rep: Representation,
) -> Result<F> {
    let one = q.one_like();
    let roots: Vec<F> = subset.members().iter().map(|&i| chars[i].clone()).collect();
    let mut total = q.zero_like();
    for c in weak_compositions(d, roots.len()) {
        let mut num = one.clone();
        let mut den = one.clone();
        for (a, la) in roots.iter().enumerate() {
            let da = c.part(a) as i64;
            for (b, lb) in roots.iter().enumerate() {
                num = num.mul(&ratio(da - c.part(b) as i64, &la.div(lb)?, q)?);
            }
            let q_exp = match rep {
                Representation::Standard => da * (da - 1) / 2,
                Representation::Dual => da * (da + 1) / 2,
            };
            num = num.mul(&la.pow(da * l)?.mul(&q.pow(q_exp * l)?));
            for k in 1..=da {
                let qk = q.pow(k)?;
                for ch in chars {
                    den = den.mul(&one.sub(&qk.mul(la).div(ch)?));
                }
            }
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!(
                "restricted coefficient at {subset}, composition {c}"
            )));
        }
        total = total.add(&num.div(&den)?);
    }
    Ok(total)
}

fn expect_side(fp: &FixedPoint, side: Side, size: usize) -> Result<()> {
    if fp.side != side || fp.subset.len() != size {
        return Err(Error::InvalidArgument(format!(
            "expected a {side:?} fixed point with {size} members, got {fp}"
        )));
    }
    Ok(())
}

/// `i_I^*` of the degree-`d` coefficient on `Gr(r, n)` with level `l`.
pub fn restricted_i_primal_at<F: Field>(
    weights: &ParameterPoint<F>,
    fp: &FixedPoint,
    d: u32,
    l: i64,
) -> Result<F> {
    expect_side(fp, Side::Primal, fp.subset.len())?;
    restricted_coefficient(weights.x(), weights.q(), &fp.subset, d, l, Representation::Standard)
}

/// `i_J^*` of the degree-`d` coefficient on `Gr(n - r, n)` for the dual
/// representation with level `l`.
pub fn restricted_i_dual_at<F: Field>(
    weights: &ParameterPoint<F>,
    fp: &FixedPoint,
    d: u32,
    l: i64,
) -> Result<F> {
    expect_side(fp, Side::Dual, fp.subset.len())?;
    let inv: Vec<F> = weights
        .x()
        .iter()
        .map(|v| v.inv().ok_or_else(|| Error::DivisionByZero("zero torus weight".into())))
        .collect::<Result<_>>()?;
    restricted_coefficient(&inv, weights.q(), &fp.subset, d, l, Representation::Dual)
}

pub fn restricted_i_primal<F: Field>(case: &GrassmannCase<F>, fp: &FixedPoint) -> Result<F> {
    expect_side(fp, Side::Primal, case.r)?;
    restricted_i_primal_at(&case.weights, fp, case.d, case.level.l)
}

/// The dual side of the pairing, taken at level `-l`.
pub fn restricted_i_dual<F: Field>(case: &GrassmannCase<F>, fp: &FixedPoint) -> Result<F> {
    expect_side(fp, Side::Dual, case.n() - case.r)?;
    restricted_i_dual_at(&case.weights, fp, case.d, -case.level.l)
}

/// Restriction of the top exterior power of the tautological bundle.
pub fn det_weight<F: Field>(weights: &ParameterPoint<F>, fp: &FixedPoint) -> Result<F> {
    let mut acc = weights.q().one_like();
    for &i in fp.subset.members() {
        acc = acc.mul(weights.x_at(i));
    }
    match fp.side {
        Side::Primal => Ok(acc),
        Side::Dual => acc
            .inv()
            .ok_or_else(|| Error::DivisionByZero("zero torus weight".into())),
    }
}

/// The three telescoped forms of `ratio(d_ij, x) / Π_{k=1}^{d_i} (1 - q^k x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TelescopeCheck<F> {
    pub from_definition: F,
    pub case_form: F,
    pub pochhammer_form: F,
    pub holds: bool,
}

pub fn telescope_lemma_check<F: Field>(x: &F, q: &F, d_i: u32, d_j: u32) -> Result<TelescopeCheck<F>> {
    let one = q.one_like();
    let (di, dj) = (d_i as i64, d_j as i64);
    let dij = di - dj;
    let mut start = one.clone();
    for k in 1..=di {
        start = start.mul(&one.sub(&q.pow(k)?.mul(x)));
    }
    let from_definition = ratio(dij, x, q)?.div(&start)?;
    // d_i >= d_j: 1/Π_{k=d_ij+1}^{d_i}; otherwise the same range with the
    // factors dividing out of the numerator of ratio(d_ij, x).
    let mut prod = one.clone();
    for k in dij + 1..=di {
        prod = prod.mul(&one.sub(&q.pow(k)?.mul(x)));
    }
    let case_form = prod
        .inv()
        .ok_or_else(|| Error::DivisionByZero("telescoped product vanishes".into()))?;
    let pochhammer_form = qpochhammer_inv(&q.pow(dij + 1)?.mul(x), q, dj)?;
    let holds = from_definition == case_form && case_form == pochhammer_form;
    Ok(TelescopeCheck {
        from_definition,
        case_form,
        pochhammer_form,
        holds,
    })
}

/// Verdict at one primal fixed point.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointVerdict<F> {
    pub fixed_point: FixedPoint,
    pub verdict: Verdict<F>,
}

fn sign<F: Field>(one: &F, odd: bool) -> F {
    if odd {
        one.neg()
    } else {
        one.clone()
    }
}

fn check_fixed_point<F: Field>(case: &GrassmannCase<F>, fp: &FixedPoint) -> Result<Verdict<F>> {
    let (n, r, d, l) = (case.n() as i64, case.r as i64, case.d, case.level.l);
    let w = &case.weights;
    let q = w.q();
    let one = q.one_like();
    let psi = dual_fixed_point(fp);
    match case.level.regime {
        Regime::Interior => Ok(Verdict::compare(
            restricted_i_primal_at(w, fp, d, l)?,
            restricted_i_dual_at(w, &psi, d, -l)?,
        )),
        Regime::UpperBoundary => {
            let lhs = restricted_i_primal_at(w, fp, d, l)?;
            let det = det_weight(w, &psi)?;
            let mut rhs = q.zero_like();
            for s in 0..=d as i64 {
                let den = qfactorial(q, s as u32)?.mul(&q.pow(s * (d as i64 - s + n - r))?);
                let c_hat = sign(&one, ((n - r) * s) % 2 == 1).div(&den)?.mul(&det.pow(-s)?);
                rhs = rhs.add(&c_hat.mul(&restricted_i_dual_at(w, &psi, d - s as u32, -l)?));
            }
            Ok(Verdict::compare(lhs, rhs))
        }
        Regime::LowerBoundary => {
            let lhs = restricted_i_dual_at(w, &psi, d, -l)?;
            let det = det_weight(w, fp)?;
            let mut rhs = q.zero_like();
            for s in 0..=d as i64 {
                let den = qfactorial(q, s as u32)?.mul(&q.pow(s * (d as i64 - s))?);
                let d_hat = sign(&one, (r * s) % 2 == 1).div(&den)?.mul(&det.pow(-s)?);
                rhs = rhs.add(&d_hat.mul(&restricted_i_primal_at(w, fp, d - s as u32, l)?));
            }
            Ok(Verdict::compare(lhs, rhs))
        }
        Regime::OutOfRange => unreachable!("rejected by the caller"),
    }
}

/// Check the correspondence at every primal fixed point.
pub fn verify_level_correspondence<F: Field>(case: &GrassmannCase<F>) -> Result<Vec<FixedPointVerdict<F>>> {
    verify_level_correspondence_with(case, ExecMode::Sequential)
}

pub fn verify_level_correspondence_with<F: Field>(
    case: &GrassmannCase<F>,
    mode: ExecMode,
) -> Result<Vec<FixedPointVerdict<F>>> {
    if case.level.regime == Regime::OutOfRange {
        return Err(Error::InvalidArgument(format!(
            "level {} is out of range; {}",
            case.level.l,
            level_window_message(case.n(), case.r)
        )));
    }
    debug_assert_eq!(classify_level(case.n(), case.r, case.level.l), case.level.regime);
    let fps = fixed_points(case.n(), case.r)?;
    exec::map(fps, mode, |fp| {
        check_fixed_point(case, &fp).map(|verdict| FixedPointVerdict {
            fixed_point: fp,
            verdict,
        })
    })
    .into_iter()
    .collect()
}
