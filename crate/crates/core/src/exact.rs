//! Exact arithmetic support: big rationals, a certified enclosure of π²,
//! and the small symbolic field ℚ + ℚ·π² that every closed-form constant
//! of the built-in partitions lives in.

use std::cmp::Ordering;
use std::sync::LazyLock;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// π² truncated (lower bound). 60 decimal digits.
const PI2_LO_STR: &str = "9.86960440108935861883449099987615113531369940724079062641334";
/// π² rounded up (upper bound).
const PI2_HI_STR: &str = "9.86960440108935861883449099987615113531369940724079062641335";

static PI2_LO: LazyLock<BigRational> =
    LazyLock::new(|| parse_rational(PI2_LO_STR).expect("pi^2 lower bound literal"));
static PI2_HI: LazyLock<BigRational> =
    LazyLock::new(|| parse_rational(PI2_HI_STR).expect("pi^2 upper bound literal"));

/// Rational enclosure of π², width 1e-59.
pub fn pi2_bounds() -> (&'static BigRational, &'static BigRational) {
    (&PI2_LO, &PI2_HI)
}

/// Parses "3/5", "-2", "0.4", "1e-3" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("cannot read `{s}` as a rational"));
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let e: i32 = exp.parse().map_err(|_| bad())?;
        let base = parse_rational(mant)?;
        let scale = BigRational::from_integer(BigInt::from(10u32).pow(e.unsigned_abs()));
        return Ok(if e >= 0 { base * scale } else { base / scale });
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int = if int.is_empty() || int == "-" { "0" } else { int };
        let i: BigInt = int.parse().map_err(|_| bad())?;
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(bad());
        }
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let mag = i.abs() * &scale + f;
        let num = if neg { -mag } else { mag };
        return Ok(BigRational::new(num, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Exact conversion of a finite f64 (every finite f64 is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Writes `r = m · 2^e` with `|m| ∈ [1, 2)`; returns `(0.0, 0)` for zero.
/// Robust for magnitudes far outside the f64 range.
pub fn rat_mantissa_exp(r: &BigRational) -> (f64, i64) {
    if r.is_zero() {
        return (0.0, 0);
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().clone();
    // Quotient with ~80 significant bits, then rescale.
    let shift = 80 - (n.bits() as i64 - d.bits() as i64);
    let q: BigInt = if shift >= 0 { (n << shift as u64) / d } else { n / (d << (-shift) as u64) };
    let qf = q.to_f64().expect("80-bit quotient fits f64");
    let e2 = qf.log2().floor() as i64;
    let mut m = qf / f64::exp2(e2 as f64);
    if m >= 2.0 {
        // boundary rounding
        m /= 2.0;
        return finish(neg, m, e2 + 1 - shift);
    }
    finish(neg, m, e2 - shift)
}

fn finish(neg: bool, m: f64, e: i64) -> (f64, i64) {
    (if neg { -m } else { m }, e)
}

/// f64 value of a rational, correct even when numerator/denominator exceed
/// the f64 range (overflow saturates, underflow flushes toward zero).
pub fn rat_to_f64(r: &BigRational) -> f64 {
    let (m, e) = rat_mantissa_exp(r);
    if m == 0.0 {
        return 0.0;
    }
    if e > 1024 {
        return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    if e < -1100 {
        return if m > 0.0 { 0.0 } else { -0.0 };
    }
    m * f64::exp2(e as f64)
}

/// Natural log of a positive rational, stable for tiny/huge magnitudes.
pub fn rat_ln(r: &BigRational) -> f64 {
    let (m, e) = rat_mantissa_exp(r);
    assert!(m > 0.0, "rat_ln needs a positive rational");
    m.ln() + (e as f64) * std::f64::consts::LN_2
}

/// An element of ℚ + ℚ·π², written `rat + pi2 · π²`.
///
/// Every closed-form tail the built-in partitions produce lands here: the
/// eventually-geometric families stay purely rational and the harmonic-type
/// family contributes ζ(2) = π²/6 tails. Signs are decided through the
/// rational enclosure of π², so comparisons are certified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymReal {
    rat: BigRational,
    pi2: BigRational,
}

impl SymReal {
    pub fn zero() -> Self {
        SymReal { rat: BigRational::zero(), pi2: BigRational::zero() }
    }

    pub fn from_rational(rat: BigRational) -> Self {
        SymReal { rat, pi2: BigRational::zero() }
    }

    pub fn from_parts(rat: BigRational, pi2: BigRational) -> Self {
        SymReal { rat, pi2 }
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn pi2_coeff(&self) -> &BigRational {
        &self.pi2
    }

    /// Some(&q) iff the value is exactly the rational q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.pi2.is_zero().then_some(&self.rat)
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.pi2.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        SymReal { rat: &self.rat + &other.rat, pi2: &self.pi2 + &other.pi2 }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SymReal { rat: &self.rat - &other.rat, pi2: &self.pi2 - &other.pi2 }
    }

    pub fn neg(&self) -> Self {
        SymReal { rat: -self.rat.clone(), pi2: -self.pi2.clone() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        SymReal { rat: &self.rat * c, pi2: &self.pi2 * c }
    }

    /// Rational lower/upper bounds of the value.
    pub fn bounds(&self) -> (BigRational, BigRational) {
        let (lo, hi) = pi2_bounds();
        if self.pi2.is_zero() {
            (self.rat.clone(), self.rat.clone())
        } else if self.pi2.is_positive() {
            (&self.rat + &self.pi2 * lo, &self.rat + &self.pi2 * hi)
        } else {
            (&self.rat + &self.pi2 * hi, &self.rat + &self.pi2 * lo)
        }
    }

    /// Certified sign; `None` only if the π² enclosure is too coarse to decide
    /// (width 1e-59 — no quantity in this crate gets near that).
    pub fn sign(&self) -> Option<Ordering> {
        if self.pi2.is_zero() {
            return Some(self.rat.cmp(&BigRational::zero()));
        }
        let (lo, hi) = self.bounds();
        if lo.is_positive() {
            Some(Ordering::Greater)
        } else if hi.is_negative() {
            Some(Ordering::Less)
        } else if lo.is_zero() && hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison with another value.
    pub fn cmp_certified(&self, other: &Self) -> Option<Ordering> {
        self.sub(other).sign()
    }

    pub fn to_f64(&self) -> f64 {
        if self.pi2.is_zero() {
            return rat_to_f64(&self.rat);
        }
        let (lo, _) = pi2_bounds();
        rat_to_f64(&(&self.rat + &self.pi2 * lo))
    }
}

/// Σ_{i=1..n} 1/i² as an exact rational (partial sum of ζ(2)).
pub fn h2_partial(n: u64) -> BigRational {
    let mut acc = BigRational::zero();
    for i in 1..=n {
        let ii = BigInt::from(i) * BigInt::from(i);
        acc += BigRational::new(BigInt::one(), ii);
    }
    acc
}

/// Σ_{k≥m} 1/k² = π²/6 − Σ_{i<m} 1/i², as an element of ℚ + ℚ·π².
pub fn inv_square_tail(m: u64) -> SymReal {
    assert!(m >= 1);
    SymReal::from_parts(-h2_partial(m - 1), BigRational::new(BigInt::one(), BigInt::from(6)))
}

pub fn big_rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// r^e by binary exponentiation.
pub(crate) fn rat_pow(r: &BigRational, e: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut base = r.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}
