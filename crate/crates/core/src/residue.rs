//! Integral-side oracle for the duality sums.
//!
//! The symmetric integrand
//!
//! ```text
//! f(w) = 1/((1-q)^d d!) Π_{i≠j} (w_i - w_j)/(w_i - q w_j)
//!        Π_i w_i^{l-1} / ( Π_{j<r} (1 - x_j/w_i) Π_{j>=r} (1 - q w_i/x_j) )
//! ```
//!
//! integrated over `d` copies of `|w| = rho` picks up iterated residues at
//! `w = x_i q^k` inside the circle (one term per composition of `d` over the
//! first `r` indices) and, clockwise, at `w = x_j q^{-k}` outside it. The
//! residue products here are evaluated in their raw, pre-telescoping form so
//! that they check the closed-form sums in [`crate::duality`] rather than
//! restate them. [`contour_integral_numeric`] evaluates the same integral by
//! the trapezoid rule in complex floating point.

use std::fmt;

use num_complex::Complex64;

use crate::compositions::{weak_compositions, Composition};
use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::field::{Field, ParameterPoint};

/// Complex double, used only by the quadrature oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx(pub Complex64);

impl Cx {
    pub fn new(re: f64, im: f64) -> Self {
        Cx(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Cx(Complex64::new(re, 0.0))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}

impl Field for Cx {
    fn zero_like(&self) -> Self {
        Cx::real(0.0)
    }

    fn one_like(&self) -> Self {
        Cx::real(1.0)
    }

    fn from_i64_like(&self, n: i64) -> Self {
        Cx::real(n as f64)
    }

    fn is_zero(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    fn add(&self, rhs: &Self) -> Self {
        Cx(self.0 + rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Cx(self.0 - rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Cx(self.0 * rhs.0)
    }

    fn neg(&self) -> Self {
        Cx(-self.0)
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Cx(self.0.inv()))
        }
    }
}

/// Integrand data: the point, the split `{0..r} | {r..n}`, degree and level.
#[derive(Clone, Debug)]
pub struct IntegrandSpec<F> {
    pub point: ParameterPoint<F>,
    pub r: usize,
    pub d: u32,
    pub l: i64,
}

impl<F: Field> IntegrandSpec<F> {
    pub fn new(point: ParameterPoint<F>, r: usize, d: u32, l: i64) -> Result<Self> {
        if r == 0 || r >= point.n() {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= r <= n - 1, got r = {r}, n = {}",
                point.n()
            )));
        }
        Ok(IntegrandSpec { point, r, d, l })
    }

    pub fn n(&self) -> usize {
        self.point.n()
    }

    fn q(&self) -> &F {
        self.point.q()
    }
}

fn factorial<F: Field>(one: &F, d: u32) -> F {
    (2..=d as i64).fold(one.clone(), |acc, k| acc.mul(&one.from_i64_like(k)))
}

fn nonzero<F: Field>(v: F, what: impl FnOnce() -> String) -> Result<F> {
    if v.is_zero() {
        Err(Error::IntegrandPole(what()))
    } else {
        Ok(v)
    }
}

/// Evaluate the integrand at `w` (`w.len()` must equal `spec.d`).
pub fn integrand_f<F: Field>(spec: &IntegrandSpec<F>, w: &[F]) -> Result<F> {
    if w.len() != spec.d as usize {
        return Err(Error::InvalidArgument(format!(
            "integrand takes {} variables, got {}",
            spec.d,
            w.len()
        )));
    }
    let q = spec.q();
    let one = q.one_like();
    let x = spec.point.x();
    let mut num = one.clone();
    let mut den = one.sub(q).pow(spec.d as i64)?.mul(&factorial(&one, spec.d));
    for (i, wi) in w.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            if i != j {
                num = num.mul(&wi.sub(wj));
                den = den.mul(&wi.sub(&q.mul(wj)));
            }
        }
        let wi_inv = wi
            .inv()
            .ok_or_else(|| Error::IntegrandPole(format!("w_{} = 0", i + 1)))?;
        num = num.mul(&wi.pow(spec.l - 1)?);
        for xj in &x[..spec.r] {
            den = den.mul(&one.sub(&xj.mul(&wi_inv)));
        }
        for xj in &x[spec.r..] {
            den = den.mul(&one.sub(&q.mul(wi).div(xj)?));
        }
    }
    let den = nonzero(den, || "denominator vanishes".to_string())?;
    num.div(&den)
}

/// The within-block normalisation
/// `P_d = Π_{i≠j, i-j≠-1} (1-q^{i-j})/(1-q^{i-j+1}) · Π_{i=2}^{d} (1-q^{-1})/(1-q^{1-i})`
/// for `d > 1`, and `1` for `d = 0, 1`.
pub fn p_norm<F: Field>(d: u32, q: &F) -> Result<F> {
    let one = q.one_like();
    if d <= 1 {
        return Ok(one);
    }
    let d = d as i64;
    let one_minus_qpow = |k: i64| -> Result<F> { Ok(one.sub(&q.pow(k)?)) };
    let mut num = one.clone();
    let mut den = one.clone();
    for i in 1..=d {
        for j in 1..=d {
            if i == j || i - j == -1 {
                continue;
            }
            num = num.mul(&one_minus_qpow(i - j)?);
            den = den.mul(&one_minus_qpow(i - j + 1)?);
        }
    }
    for i in 2..=d {
        num = num.mul(&one_minus_qpow(-1)?);
        den = den.mul(&one_minus_qpow(1 - i)?);
    }
    let den = nonzero(den, || "P_d denominator vanishes".to_string())?;
    num.div(&den)
}

/// Accumulates a ratio of products, reporting a pole if the denominator dies.
struct Ratio<F> {
    num: F,
    den: F,
}

impl<F: Field> Ratio<F> {
    fn new(one: &F) -> Self {
        Ratio {
            num: one.clone(),
            den: one.clone(),
        }
    }

    fn times(&mut self, v: &F) {
        self.num = self.num.mul(v);
    }

    fn over(&mut self, v: &F) {
        self.den = self.den.mul(v);
    }

    fn finish(self, label: &str) -> Result<F> {
        let den = nonzero(self.den, || format!("{label}: residue denominator vanishes"))?;
        self.num.div(&den)
    }
}

fn check_parts<F>(spec: &IntegrandSpec<F>, c: &Composition, expected_len: usize) -> Result<()> {
    if c.len() != expected_len || c.degree() != spec.d {
        return Err(Error::InvalidArgument(format!(
            "composition {c} does not match {expected_len} parts of degree {}",
            spec.d
        )));
    }
    Ok(())
}

/// Residue of the integrand at the pole configuration
/// `w = (x_1, q x_1, ..., q^{d_1-1} x_1, x_2, ...)` of type `c` (over the
/// first `r` indices), including the `1/d!` of the integrand.
///
/// Built as the product of the three groups of factors: those coupling an
/// inside index with an outside one, the pure-`q` normalisation through
/// [`p_norm`], and the remaining inside-inside and level factors. Each group
/// is taken over the individual pole positions `n_i = 1..d_i` before any
/// telescoping.
pub fn residue_summand_e<F: Field>(spec: &IntegrandSpec<F>, c: &Composition) -> Result<F> {
    check_parts(spec, c, spec.r)?;
    let q = spec.q();
    let one = q.one_like();
    let pt = &spec.point;
    let (r, n) = (spec.r, spec.n());
    let qp = |k: i64| q.pow(k);
    let mut acc = Ratio::new(&one);

    // inside-outside: 1 / (1 - x_ij q^{n_i})
    for i in 0..r {
        for j in r..n {
            for ni in 1..=c.part(i) as i64 {
                acc.over(&one.sub(&pt.ratio(i, j).mul(&qp(ni)?)));
            }
        }
    }
    // pure-q normalisation: P_{d_i} / (1-q)^{d_i}
    for i in 0..r {
        acc.times(&p_norm(c.part(i), q)?);
        acc.over(&one.sub(q).pow(c.part(i) as i64)?);
    }
    // inside-inside and level factors
    for i in 0..r {
        for ni in 1..=c.part(i) as i64 {
            acc.times(&pt.x_at(i).mul(&qp(ni - 1)?).pow(spec.l)?);
        }
        for j in 0..r {
            if i == j {
                continue;
            }
            let xij = pt.ratio(i, j);
            for ni in 1..=c.part(i) as i64 {
                for nj in 1..=c.part(j) as i64 {
                    acc.times(&one.sub(&qp(ni - nj)?.mul(&xij)));
                    acc.over(&one.sub(&qp(ni - nj + 1)?.mul(&xij)));
                }
                acc.over(&one.sub(&pt.ratio(j, i).mul(&qp(1 - ni)?)));
            }
        }
    }
    acc.over(&factorial(&one, spec.d));
    acc.finish("E")
}

/// Residue at the outside configuration
/// `w = (x_{r+1} q^{-1}, ..., x_{r+1} q^{-d_{r+1}}, ..., x_n q^{-d_n})`
/// of type `c` (over the last `n - r` indices), with the `(-1)^d` that the
/// clockwise orientation contributes and the `1/d!` of the integrand.
pub fn residue_summand_f<F: Field>(spec: &IntegrandSpec<F>, c: &Composition) -> Result<F> {
    let (r, n) = (spec.r, spec.n());
    check_parts(spec, c, n - r)?;
    let q = spec.q();
    let one = q.one_like();
    let pt = &spec.point;
    let qp = |k: i64| q.pow(k);
    let part = |i: usize| c.part(i - r) as i64;
    let mut acc = Ratio::new(&one);

    if spec.d % 2 == 1 {
        acc.times(&one.neg());
    }
    // outside-inside: 1 / (1 - x_ji q^{n_i})
    for i in r..n {
        for j in 0..r {
            for ni in 1..=part(i) {
                acc.over(&one.sub(&pt.ratio(j, i).mul(&qp(ni)?)));
            }
        }
    }
    for i in r..n {
        acc.times(&p_norm(part(i) as u32, q)?);
        acc.over(&one.sub(q).pow(part(i))?);
    }
    for i in r..n {
        for ni in 1..=part(i) {
            acc.times(&pt.x_at(i).mul(&qp(-ni)?).pow(spec.l)?);
        }
        for j in r..n {
            if i == j {
                continue;
            }
            let xij = pt.ratio(i, j);
            for ni in 1..=part(i) {
                for nj in 1..=part(j) {
                    acc.times(&one.sub(&qp(nj - ni)?.mul(&xij)));
                    acc.over(&one.sub(&qp(nj - ni + 1)?.mul(&xij)));
                }
                acc.over(&one.sub(&xij.mul(&qp(1 - ni)?)));
            }
        }
    }
    acc.over(&factorial(&one, spec.d));
    acc.finish("F")
}

/// `E_d = Σ_{|c| = d} d! E_c` over compositions of the inside indices.
pub fn assemble_e<F: Field>(spec: &IntegrandSpec<F>) -> Result<F> {
    let d_fact = factorial(&spec.q().one_like(), spec.d);
    let mut total = spec.q().zero_like();
    for c in weak_compositions(spec.d, spec.r) {
        total = total.add(&d_fact.mul(&residue_summand_e(spec, &c)?));
    }
    Ok(total)
}

/// `F_d = Σ_{|c| = d} d! F_c` over compositions of the outside indices.
pub fn assemble_f<F: Field>(spec: &IntegrandSpec<F>) -> Result<F> {
    let d_fact = factorial(&spec.q().one_like(), spec.d);
    let mut total = spec.q().zero_like();
    for c in weak_compositions(spec.d, spec.n() - spec.r) {
        total = total.add(&d_fact.mul(&residue_summand_f(spec, &c)?));
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Quadrature

pub const MAX_NUMERIC_DEGREE: u32 = 3;
pub const DEFAULT_GRID: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourConfig {
    pub rho: f64,
    pub grid: usize,
    pub orientation: Orientation,
}

impl ContourConfig {
    /// Radius at the geometric mean of `max |x_i|` and `min |x_i| / |q|`.
    pub fn default_for(point: &ParameterPoint<Cx>) -> Self {
        let (inner, outer) = pole_radii(point);
        ContourConfig {
            rho: (inner * outer).sqrt(),
            grid: DEFAULT_GRID,
            orientation: Orientation::CounterClockwise,
        }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn clockwise(mut self) -> Self {
        self.orientation = Orientation::Clockwise;
        self
    }
}

/// `(max |x_i|, min |x_i| / |q|)`: the circle must separate these radii.
fn pole_radii(point: &ParameterPoint<Cx>) -> (f64, f64) {
    let norms: Vec<f64> = point.x().iter().map(Cx::norm).collect();
    let max = norms.iter().cloned().fold(0.0, f64::max);
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    (max, min / point.q().norm())
}

fn validate(spec: &IntegrandSpec<Cx>, cfg: &ContourConfig) -> Result<()> {
    let qn = spec.point.q().norm();
    if !(qn < 1.0) {
        return Err(Error::Contour(format!("|q| = {qn} must be < 1")));
    }
    let (inner, outer) = pole_radii(&spec.point);
    if !(inner < cfg.rho && cfg.rho < outer) {
        return Err(Error::Contour(format!(
            "rho = {} must satisfy max|x_i| = {inner} < rho < min|x_i|/|q| = {outer}",
            cfg.rho
        )));
    }
    if cfg.grid < 64 || !cfg.grid.is_power_of_two() {
        return Err(Error::Contour(format!(
            "grid size {} must be a power of two >= 64",
            cfg.grid
        )));
    }
    if spec.d > MAX_NUMERIC_DEGREE {
        return Err(Error::Contour(format!(
            "numeric quadrature is limited to d <= {MAX_NUMERIC_DEGREE} (cost grows as N^d), got d = {}",
            spec.d
        )));
    }
    if spec.l < 1 - spec.r as i64 {
        return Err(Error::Contour(format!(
            "level {} < 1 - r puts a pole at w = 0 inside the contour",
            spec.l
        )));
    }
    Ok(())
}

/// Nested trapezoid rule for `∮...∮ f dw_1/(2πi) ... dw_d/(2πi)` over
/// `|w_i| = rho`.
///
/// With `w = rho e^{iθ}` each integral becomes `(1/N) Σ_k f(w_k) w_k`; the
/// outermost angle is distributed over workers.
pub fn contour_integral_numeric(spec: &IntegrandSpec<Cx>, cfg: &ContourConfig) -> Result<Complex64> {
    contour_integral_numeric_with(spec, cfg, ExecMode::Auto)
}

pub fn contour_integral_numeric_with(
    spec: &IntegrandSpec<Cx>,
    cfg: &ContourConfig,
    mode: ExecMode,
) -> Result<Complex64> {
    validate(spec, cfg)?;
    let d = spec.d as usize;
    if d == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let n = cfg.grid;
    let nodes: Vec<Cx> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Cx(Complex64::from_polar(cfg.rho, theta))
        })
        .collect();
    let inner_count = n.pow(d as u32 - 1);

    let outer = |k0: usize| -> Result<Complex64> {
        let mut w = vec![nodes[k0]; d];
        let mut acc = Complex64::new(0.0, 0.0);
        for flat in 0..inner_count {
            let mut rest = flat;
            for slot in w.iter_mut().skip(1) {
                *slot = nodes[rest % n];
                rest /= n;
            }
            let jac: Complex64 = w.iter().map(|v| v.0).product();
            acc += integrand_f(spec, &w)?.0 * jac;
        }
        Ok(acc)
    };
    let total = exec::map_reduce(
        n,
        mode,
        Ok(Complex64::new(0.0, 0.0)),
        outer,
        |a: Result<Complex64>, b: Result<Complex64>| Ok(a? + b?),
    )?;
    let mut value = total / (n as f64).powi(d as i32);
    if cfg.orientation == Orientation::Clockwise && d % 2 == 1 {
        value = -value;
    }
    Ok(value)
}

/// `|a - b| / |b|`.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
