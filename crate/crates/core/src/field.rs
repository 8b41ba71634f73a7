//! Exact scalar arithmetic and generic evaluation points.
//!
//! Two exact backends are provided: arbitrary-precision rationals and
//! residues modulo a word-size prime. Both implement [`Field`]; the
//! complex-float backend used by the quadrature oracle lives in
//! [`crate::residue`] and implements the same trait.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mersenne prime 2^61 - 1, the default prime modulus.
pub const FP61_MODULUS: u64 = (1 << 61) - 1;

/// Arithmetic shared by every scalar backend.
///
/// Constants are produced "like" an existing element so that prime-field
/// elements can carry their modulus without a separate context argument.
pub trait Field: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_i64_like(&self, n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    /// `self / rhs`; fails on a zero divisor.
    fn div(&self, rhs: &Self) -> Result<Self> {
        rhs.inv()
            .map(|r| self.mul(&r))
            .ok_or_else(|| Error::DivisionByZero(format!("{self} / 0")))
    }

    /// Integer power by square-and-multiply.
    fn pow(&self, k: i64) -> Result<Self> {
        let base = if k < 0 {
            self.inv().ok_or(Error::ZeroNegativePower { exponent: k })?
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut acc = self.one_like();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }
}

/// Exact backends that can be sampled and constructed from a field selector.
pub trait ExactField: Field + Eq + std::hash::Hash {
    fn zero_in(spec: FieldSpec) -> Self;
    fn from_i64_in(spec: FieldSpec, n: i64) -> Self;
    /// Uniformly random nonzero-ish element (may be zero; callers apply guards).
    fn random_in<R: Rng>(spec: FieldSpec, rng: &mut R) -> Self;
}

/// `field_pow` as a free function.
pub fn field_pow<F: Field>(a: &F, k: i64) -> Result<F> {
    a.pow(k)
}

// ---------------------------------------------------------------------------
// Field selector

/// Which exact field to evaluate in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    Rational,
    Prime(u64),
}

impl FieldSpec {
    pub fn fp61() -> Self {
        FieldSpec::Prime(FP61_MODULUS)
    }

    pub fn modulus(&self) -> Option<u64> {
        match self {
            FieldSpec::Rational => None,
            FieldSpec::Prime(p) => Some(*p),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rational => f.write_str("rational"),
            FieldSpec::Prime(p) if *p == FP61_MODULUS => f.write_str("fp61"),
            FieldSpec::Prime(p) => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rational" => Ok(FieldSpec::Rational),
            "fp61" => Ok(FieldSpec::fp61()),
            other => {
                let digits = other.strip_prefix("fp:").ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "unknown field selector {other:?} (expected rational, fp61 or fp:<prime>)"
                    ))
                })?;
                let p: u64 = digits.parse().map_err(|_| {
                    Error::InvalidArgument(format!("invalid prime modulus {digits:?}"))
                })?;
                if !is_prime_u64(p) {
                    return Err(Error::InvalidArgument(format!("modulus {p} is not prime")));
                }
                Ok(FieldSpec::Prime(p))
            }
        }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// ---------------------------------------------------------------------------
// Prime field

/// Residue modulo a prime `p < 2^64`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    modulus: u64,
}

impl Fp {
    pub fn new(value: u64, modulus: u64) -> Self {
        Fp {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_i64(n: i64, modulus: u64) -> Self {
        let m = modulus as i128;
        Fp {
            value: (n as i128).rem_euclid(m) as u64,
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn same(&self, rhs: &Self) {
        debug_assert_eq!(self.modulus, rhs.modulus, "mixed prime moduli");
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

impl Field for Fp {
    fn zero_like(&self) -> Self {
        Fp::new(0, self.modulus)
    }

    fn one_like(&self) -> Self {
        Fp::new(1, self.modulus)
    }

    fn from_i64_like(&self, n: i64) -> Self {
        Fp::from_i64(n, self.modulus)
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn add(&self, rhs: &Self) -> Self {
        self.same(rhs);
        let s = self.value as u128 + rhs.value as u128;
        Fp::new((s % self.modulus as u128) as u64, self.modulus)
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.same(rhs);
        let v = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.modulus - (rhs.value - self.value)
        };
        Fp::new(v, self.modulus)
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.same(rhs);
        Fp::new(mul_mod(self.value, rhs.value, self.modulus), self.modulus)
    }

    fn neg(&self) -> Self {
        if self.value == 0 {
            *self
        } else {
            Fp::new(self.modulus - self.value, self.modulus)
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        // extended Euclid over i128
        let (mut r0, mut r1) = (self.modulus as i128, self.value as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quo = r0 / r1;
            (r0, r1) = (r1, r0 - quo * r1);
            (t0, t1) = (t1, t0 - quo * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(Fp::new(
            t0.rem_euclid(self.modulus as i128) as u64,
            self.modulus,
        ))
    }
}

impl ExactField for Fp {
    fn zero_in(spec: FieldSpec) -> Self {
        Fp::new(0, prime_of(spec))
    }

    fn from_i64_in(spec: FieldSpec, n: i64) -> Self {
        Fp::from_i64(n, prime_of(spec))
    }

    fn random_in<R: Rng>(spec: FieldSpec, rng: &mut R) -> Self {
        let p = prime_of(spec);
        Fp::new(rng.gen_range(0..p), p)
    }
}

fn prime_of(spec: FieldSpec) -> u64 {
    match spec {
        FieldSpec::Prime(p) => p,
        FieldSpec::Rational => panic!("prime-field element requested for the rational selector"),
    }
}

// ---------------------------------------------------------------------------
// Rationals

/// Arbitrary-precision rational number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Reduce into `F_p`; `None` when `p` divides the denominator.
    pub fn reduce_mod(&self, p: u64) -> Option<Fp> {
        let m = BigInt::from(p);
        let to_fp = |b: &BigInt| {
            let r = b.mod_floor(&m);
            Fp::new(r.to_u64().expect("residue fits u64"), p)
        };
        to_fp(self.denom()).inv().map(|d| to_fp(self.numer()).mul(&d))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Field for Rational {
    fn zero_like(&self) -> Self {
        Rational(BigRational::zero())
    }

    fn one_like(&self) -> Self {
        Rational(BigRational::one())
    }

    fn from_i64_like(&self, n: i64) -> Self {
        Rational::from_int(n)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_one(&self) -> bool {
        self.0.is_one()
    }

    fn add(&self, rhs: &Self) -> Self {
        Rational(&self.0 + &rhs.0)
    }

    fn sub(&self, rhs: &Self) -> Self {
        Rational(&self.0 - &rhs.0)
    }

    fn mul(&self, rhs: &Self) -> Self {
        Rational(&self.0 * &rhs.0)
    }

    fn neg(&self) -> Self {
        Rational(-&self.0)
    }

    fn inv(&self) -> Option<Self> {
        if self.0.is_zero() {
            None
        } else {
            Some(Rational(self.0.recip()))
        }
    }
}

impl ExactField for Rational {
    fn zero_in(_spec: FieldSpec) -> Self {
        Rational(BigRational::zero())
    }

    fn from_i64_in(_spec: FieldSpec, n: i64) -> Self {
        Rational::from_int(n)
    }

    /// Random rational of small height: numerator in `[-999, 999]`,
    /// denominator in `[1, 999]`.
    fn random_in<R: Rng>(_spec: FieldSpec, rng: &mut R) -> Self {
        let num: i64 = rng.gen_range(-999..=999);
        let den: i64 = rng.gen_range(1..=999);
        Rational::new(num, den)
    }
}

// ---------------------------------------------------------------------------
// Parameter points

/// One generic evaluation point: `q` together with `x_1..x_n`.
///
/// The `x` coordinates double as the torus weights `Λ_1..Λ_n` in the
/// Grassmannian layer. Construction checks every algebraic guard, so a
/// `ParameterPoint` in hand never has `q^k = 1` or `x_i / x_j = q^k` within
/// the guard depth.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPoint<F> {
    q: F,
    x: Vec<F>,
    guard_depth: u32,
}

impl<F: Field> ParameterPoint<F> {
    pub fn new(q: F, x: Vec<F>, guard_depth: u32) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a parameter point needs n >= 2 coordinates, got {}",
                x.len()
            )));
        }
        if guard_depth == 0 {
            return Err(Error::InvalidArgument("guard depth must be positive".into()));
        }
        check_q(&q, guard_depth)?;
        let q_powers = signed_powers(&q, guard_depth);
        for i in 0..x.len() {
            if x[i].is_zero() {
                return Err(Error::GuardViolation(format!("x_{} = 0", i + 1)));
            }
            for j in 0..i {
                if let Some(k) = ratio_hits_power(&x[i], &x[j], &q_powers, guard_depth) {
                    return Err(Error::GuardViolation(format!(
                        "x_{}/x_{} = q^{k}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(ParameterPoint { q, x, guard_depth })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn q(&self) -> &F {
        &self.q
    }

    pub fn x(&self) -> &[F] {
        &self.x
    }

    pub fn x_at(&self, i: usize) -> &F {
        &self.x[i]
    }

    pub fn guard_depth(&self) -> u32 {
        self.guard_depth
    }

    /// `x_i / x_j` (0-based indices).
    pub fn ratio(&self, i: usize, j: usize) -> F {
        self.x[i]
            .div(&self.x[j])
            .expect("coordinates are nonzero by construction")
    }

    /// Same point with coordinates permuted: entry `k` of the result is
    /// `x[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        ParameterPoint {
            q: self.q.clone(),
            x: perm.iter().map(|&k| self.x[k].clone()).collect(),
            guard_depth: self.guard_depth,
        }
    }
}

fn check_q<F: Field>(q: &F, depth: u32) -> Result<()> {
    if q.is_zero() {
        return Err(Error::GuardViolation("q = 0".into()));
    }
    let mut acc = q.clone();
    for k in 1..=depth {
        if acc.is_one() {
            return Err(Error::GuardViolation(format!("q^{k} = 1")));
        }
        acc = acc.mul(q);
    }
    Ok(())
}

/// `q^k` for `k = -depth..=depth`, indexed by `k + depth`.
fn signed_powers<F: Field>(q: &F, depth: u32) -> Vec<F> {
    let d = depth as i64;
    (-d..=d)
        .map(|k| q.pow(k).expect("q is nonzero"))
        .collect()
}

/// Returns the exponent `k` with `a / b = q^k`, if one lies in the window.
/// Checked as `a - q^k b = 0` so no division is needed.
fn ratio_hits_power<F: Field>(a: &F, b: &F, q_powers: &[F], depth: u32) -> Option<i64> {
    q_powers
        .iter()
        .position(|qk| a.sub(&qk.mul(b)).is_zero())
        .map(|idx| idx as i64 - depth as i64)
}

const DRAWS_PER_COORDINATE: usize = 512;
const RESTARTS: usize = 32;

/// Draw a generic point deterministically from `seed`.
///
/// Coordinates violating a guard are redrawn. Tiny prime fields where no
/// valid point can be found produce [`Error::FieldTooSmall`].
pub fn sample_parameter_point<F: ExactField>(
    n: usize,
    guard_depth: u32,
    seed: u64,
    field: FieldSpec,
) -> Result<ParameterPoint<F>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n must be >= 2, got {n}")));
    }
    if guard_depth == 0 {
        return Err(Error::InvalidArgument("guard depth must be positive".into()));
    }
    if let FieldSpec::Prime(p) = field {
        if p <= 2 * guard_depth as u64 {
            return Err(Error::FieldTooSmall {
                modulus: p,
                n,
                guard_depth,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESTARTS {
        if let Some(point) = try_sample(n, guard_depth, field, &mut rng) {
            return Ok(point);
        }
    }
    Err(Error::FieldTooSmall {
        modulus: field.modulus().unwrap_or(0),
        n,
        guard_depth,
    })
}

fn try_sample<F: ExactField, R: Rng>(
    n: usize,
    depth: u32,
    field: FieldSpec,
    rng: &mut R,
) -> Option<ParameterPoint<F>> {
    let q = (0..DRAWS_PER_COORDINATE)
        .map(|_| F::random_in(field, rng))
        .find(|q| check_q(q, depth).is_ok())?;
    let powers = signed_powers(&q, depth);
    let mut x: Vec<F> = Vec::with_capacity(n);
    for _ in 0..n {
        let xi = (0..DRAWS_PER_COORDINATE)
            .map(|_| F::random_in(field, rng))
            .find(|c| {
                !c.is_zero()
                    && x
                        .iter()
                        .all(|prev| ratio_hits_power(c, prev, &powers, depth).is_none())
            })?;
        x.push(xi);
    }
    Some(ParameterPoint {
        q,
        x,
        guard_depth: depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_round_trip() {
        for s in ["rational", "fp61", "fp:61"] {
            let spec: FieldSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("fp:60".parse::<FieldSpec>().is_err());
        assert!("real".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn fp61_is_prime() {
        assert!(is_prime_u64(FP61_MODULUS));
        assert!(!is_prime_u64(FP61_MODULUS - 2));
        assert!(is_prime_u64(61));
        assert!(!is_prime_u64(1));
    }

    #[test]
    fn pow_negative_rational() {
        let two = Rational::from_int(2);
        assert_eq!(field_pow(&two, -2).unwrap(), Rational::new(1, 4));
        assert_eq!(field_pow(&two, 0).unwrap(), Rational::from_int(1));
    }

    #[test]
    fn pow_fermat() {
        let a = Fp::new(3, 61);
        // brute multiply
        let mut acc = Fp::new(1, 61);
        for _ in 0..60 {
            acc = acc.mul(&a);
        }
        assert_eq!(acc, Fp::new(1, 61));
        assert_eq!(field_pow(&a, 60).unwrap(), acc);
    }

    #[test]
    fn pow_zero_negative_exponent() {
        let z = Rational::from_int(0);
        assert!(matches!(
            field_pow(&z, -1),
            Err(Error::ZeroNegativePower { exponent: -1 })
        ));
        assert!(matches!(
            field_pow(&Fp::new(0, 61), -3),
            Err(Error::ZeroNegativePower { .. })
        ));
    }

    #[test]
    fn fp_inverse() {
        let p = FP61_MODULUS;
        for v in [1u64, 2, 3, 12345, p - 1] {
            let a = Fp::new(v, p);
            assert!(a.mul(&a.inv().unwrap()).is_one());
        }
        assert!(Fp::new(0, p).inv().is_none());
    }

    #[test]
    fn sampled_point_rational() {
        let pt: ParameterPoint<Rational> =
            sample_parameter_point(3, 5, 1, FieldSpec::Rational).unwrap();
        assert_eq!(pt.n(), 3);
        assert_ne!(pt.x()[0], pt.x()[1]);
        assert_ne!(pt.x()[1], pt.x()[2]);
        let mut acc = pt.q().clone();
        for _ in 1..=5 {
            assert!(!acc.is_one());
            acc = acc.mul(pt.q());
        }
    }

    #[test]
    fn sampled_point_is_deterministic() {
        let spec = FieldSpec::Prime(61);
        let a: ParameterPoint<Fp> = sample_parameter_point(2, 2, 7, spec).unwrap();
        let b: ParameterPoint<Fp> = sample_parameter_point(2, 2, 7, spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constructor_rejects_guard_violation() {
        let q = Rational::new(1, 2);
        let x = vec![Rational::from_int(4), Rational::from_int(1)];
        // 4 / 1 = q^{-2}
        assert!(matches!(
            ParameterPoint::new(q.clone(), x.clone(), 2),
            Err(Error::GuardViolation(_))
        ));
        assert!(ParameterPoint::new(q, x, 1).is_ok());
        assert!(ParameterPoint::new(
            Rational::from_int(1),
            vec![Rational::from_int(2), Rational::from_int(3)],
            1
        )
        .is_err());
    }

    #[test]
    fn rational_reduces_mod_p() {
        let r = Rational::new(3, 4);
        let fp = r.reduce_mod(61).unwrap();
        assert_eq!(fp.mul(&Fp::new(4, 61)), Fp::new(3, 61));
        assert!(Rational::new(1, 61).reduce_mod(61).is_none());
    }

    #[test]
    fn display_is_exact() {
        assert_eq!(Rational::new(-6, 4).to_string(), "-3/2");
        assert_eq!(Rational::from_int(5).to_string(), "5");
        assert_eq!(Fp::new(7, 61).to_string(), "7 mod 61");
    }

    #[test]
    fn tiny_field_has_no_valid_point() {
        // exhaustive: no (q, x1, x2) in F_5 passes the depth-3 guards
        let p = 5;
        let mut valid = 0;
        for q in 0..p {
            for a in 0..p {
                for b in 0..p {
                    let x = vec![Fp::new(a, p), Fp::new(b, p)];
                    valid += usize::from(ParameterPoint::new(Fp::new(q, p), x, 3).is_ok());
                }
            }
        }
        assert_eq!(valid, 0);
        assert!(matches!(
            sample_parameter_point::<Fp>(2, 3, 3, FieldSpec::Prime(5)),
            Err(Error::FieldTooSmall { modulus: 5, .. })
        ));
    }
}
