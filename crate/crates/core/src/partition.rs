//! α-Lüroth partitions: the strictly decreasing sequence (t_n) with t_1 = 1
//! and t_n → 0, the interval lengths a_n = t_n − t_{n+1}, and the ratios
//! ρ_n = t_{n+1}/t_n together with certified tail information.
//!
//! Built-in generators evaluate t_n as exact rationals; every series
//! truncation elsewhere in the crate leans on the tail bound tail(K) = t_{K+1}
//! and on certified enclosures of the ratio tail.

use std::fmt;
use std::sync::Arc;

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::exact::{parse_rational, rat_pow, rat_to_f64};

/// How t_n is produced.
#[derive(Clone)]
pub enum Generator {
    /// t_n = 1/n.
    Luroth,
    /// t_n = 2^(1−n).
    Dyadic,
    /// t_n = ρ^(n−1) for a fixed ρ ∈ (0,1).
    Geometric { ratio: BigRational },
    /// t_1 = 1, t_2 = `second`, and t_{n+2} = `ratio`·t_n; the ratio sequence
    /// alternates between `second` and `ratio/second`.
    TwoPeriodic { second: BigRational, ratio: BigRational },
    /// Explicit leading entries (t_1 = 1 first) continued geometrically with
    /// `tail_ratio` beyond the last entry.
    Table { entries: Vec<BigRational>, tail_ratio: BigRational },
    /// Opaque closed form; no exact path and no certified tail information.
    ClosedForm(Arc<dyn Fn(u64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Luroth => write!(f, "Luroth"),
            Generator::Dyadic => write!(f, "Dyadic"),
            Generator::Geometric { ratio } => write!(f, "Geometric({ratio})"),
            Generator::TwoPeriodic { second, ratio } => {
                write!(f, "TwoPeriodic(t2={second}, ratio={ratio})")
            }
            Generator::Table { entries, tail_ratio } => {
                write!(f, "Table({} entries, tail_ratio={tail_ratio})", entries.len())
            }
            Generator::ClosedForm(_) => write!(f, "ClosedForm(..)"),
        }
    }
}

/// Certified extremes of the ratio tail (ρ_n for n > k).
#[derive(Clone, Debug, PartialEq)]
pub struct TailStats {
    pub k: u64,
    /// sup of ρ_n over n > k (sampled up to the horizon when uncertified).
    pub s: f64,
    /// inf of ρ_n over n > k.
    pub m: f64,
    /// Whether s and m are exact consequences of the generator rather than
    /// extremes over a finite horizon.
    pub certified: bool,
    pub note: Option<String>,
}

/// Internal certified enclosure of the ratio tail. Unlike [`TailStats`], the
/// upper bound may equal 1 (valid for ρ_n ↑ 1 even though the sup is not
/// attained), which is what the series bounds need.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RhoEnclosure {
    pub lo: f64,
    pub hi: f64,
    pub certified: bool,
}

/// Eventually-periodic geometric scaling: t_{n+period} = ratio · t_n for all
/// n ≥ start. Drives every exact closed-form tail sum.
#[derive(Clone, Debug)]
pub(crate) struct GeoTail {
    pub start: u64,
    pub period: u64,
    pub ratio: BigRational,
}

#[derive(Clone, Debug)]
pub struct Partition {
    gen: Generator,
    precision_digits: u32,
}

impl Partition {
    pub fn luroth() -> Self {
        Partition { gen: Generator::Luroth, precision_digits: 15 }
    }

    pub fn dyadic() -> Self {
        Partition { gen: Generator::Dyadic, precision_digits: 15 }
    }

    pub fn geometric(ratio: BigRational) -> Result<Self> {
        if ratio <= BigRational::zero() || ratio >= BigRational::one() {
            return Err(Error::InvalidPartition(format!(
                "geometric ratio must lie in (0,1), got {ratio}"
            )));
        }
        Ok(Partition { gen: Generator::Geometric { ratio }, precision_digits: 15 })
    }

    pub fn two_periodic(second: BigRational, ratio: BigRational) -> Result<Self> {
        if ratio <= BigRational::zero() || ratio >= BigRational::one() {
            return Err(Error::InvalidPartition(format!(
                "two-periodic ratio must lie in (0,1), got {ratio}"
            )));
        }
        if second <= ratio || second >= BigRational::one() {
            return Err(Error::InvalidPartition(format!(
                "two-periodic t_2 must lie strictly between ratio and 1, got {second}"
            )));
        }
        Ok(Partition { gen: Generator::TwoPeriodic { second, ratio }, precision_digits: 15 })
    }

    pub fn from_table(entries: Vec<BigRational>, tail_ratio: BigRational) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidPartition("table needs at least t_1".into()));
        }
        if !entries[0].is_one() {
            return Err(Error::InvalidPartition(format!("t_1 must be 1, got {}", entries[0])));
        }
        for w in entries.windows(2) {
            if w[1] >= w[0] || !w[1].is_positive() {
                return Err(Error::InvalidPartition(format!(
                    "table must be strictly decreasing and positive, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if tail_ratio <= BigRational::zero() || tail_ratio >= BigRational::one() {
            return Err(Error::InvalidPartition(format!(
                "tail ratio must lie in (0,1), got {tail_ratio}"
            )));
        }
        Ok(Partition { gen: Generator::Table { entries, tail_ratio }, precision_digits: 15 })
    }

    /// Opaque generator. The caller is responsible for t(1) = 1, strict
    /// decrease and decay to zero; nothing about it can be certified here.
    pub fn closed_form(f: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Partition { gen: Generator::ClosedForm(Arc::new(f)), precision_digits: 15 }
    }

    pub fn with_precision_digits(mut self, digits: u32) -> Result<Self> {
        if digits < 15 {
            return Err(Error::InvalidPartition(format!(
                "precision must guarantee at least 15 significant digits, got {digits}"
            )));
        }
        self.precision_digits = digits;
        Ok(self)
    }

    pub fn generator(&self) -> &Generator {
        &self.gen
    }

    /// Target relative precision of evaluated values (10^-digits).
    pub fn precision(&self) -> f64 {
        10f64.powi(-(self.precision_digits as i32))
    }

    /// Whether t_n is available as an exact rational.
    pub fn is_exact(&self) -> bool {
        !matches!(self.gen, Generator::ClosedForm(_))
    }

    pub fn describe(&self) -> String {
        match &self.gen {
            Generator::Luroth => "luroth".into(),
            Generator::Dyadic => "dyadic".into(),
            Generator::Geometric { ratio } => format!("geometric({ratio})"),
            Generator::TwoPeriodic { second, ratio } => {
                format!("two-periodic(t2={second}, ratio={ratio})")
            }
            Generator::Table { entries, tail_ratio } => {
                format!("table({} entries, tail_ratio={tail_ratio})", entries.len())
            }
            Generator::ClosedForm(_) => "closed-form".into(),
        }
    }

    /// t_n as an exact rational; `None` for closed-form generators.
    pub fn t_exact(&self, n: u64) -> Option<BigRational> {
        assert!(n >= 1, "partition indices are 1-based");
        match &self.gen {
            Generator::Luroth => Some(BigRational::new(BigInt::one(), BigInt::from(n))),
            Generator::Dyadic => Some(BigRational::new(BigInt::one(), BigInt::one() << (n - 1))),
            Generator::Geometric { ratio } => Some(rat_pow(ratio, n - 1)),
            Generator::TwoPeriodic { second, ratio } => {
                let m = (n - 1) / 2;
                let base = rat_pow(ratio, m);
                Some(if n % 2 == 1 { base } else { base * second })
            }
            Generator::Table { entries, tail_ratio } => {
                let k = entries.len() as u64;
                if n <= k {
                    Some(entries[(n - 1) as usize].clone())
                } else {
                    Some(entries[(k - 1) as usize].clone() * rat_pow(tail_ratio, n - k))
                }
            }
            Generator::ClosedForm(_) => None,
        }
    }

    /// t_n as f64.
    pub fn t(&self, n: u64) -> f64 {
        assert!(n >= 1, "partition indices are 1-based");
        match &self.gen {
            Generator::Luroth => 1.0 / n as f64,
            Generator::Dyadic => f64::exp2(1.0 - n as f64),
            Generator::Geometric { ratio } => pow_f64(rat_to_f64(ratio), n - 1),
            Generator::TwoPeriodic { second, ratio } => {
                let m = (n - 1) / 2;
                let base = pow_f64(rat_to_f64(ratio), m);
                if n % 2 == 1 {
                    base
                } else {
                    base * rat_to_f64(second)
                }
            }
            Generator::Table { entries, tail_ratio } => {
                let k = entries.len() as u64;
                if n <= k {
                    rat_to_f64(&entries[(n - 1) as usize])
                } else {
                    rat_to_f64(&entries[(k - 1) as usize]) * pow_f64(rat_to_f64(tail_ratio), n - k)
                }
            }
            Generator::ClosedForm(f) => f(n),
        }
    }

    /// a_n = t_n − t_{n+1}, the Lebesgue measure of the n-th interval.
    pub fn a(&self, n: u64) -> f64 {
        match &self.gen {
            // 1/(n(n+1)) avoids the cancellation in t_n − t_{n+1} at large n
            Generator::Luroth => 1.0 / (n as f64 * (n as f64 + 1.0)),
            _ => self.t(n) - self.t(n + 1),
        }
    }

    pub fn a_exact(&self, n: u64) -> Option<BigRational> {
        Some(self.t_exact(n)? - self.t_exact(n + 1)?)
    }

    /// ρ_n = t_{n+1}/t_n ∈ (0,1).
    pub fn rho(&self, n: u64) -> f64 {
        match &self.gen {
            Generator::Luroth => n as f64 / (n as f64 + 1.0),
            _ => self.t(n + 1) / self.t(n),
        }
    }

    pub fn rho_exact(&self, n: u64) -> Option<BigRational> {
        Some(self.t_exact(n + 1)? / self.t_exact(n)?)
    }

    /// Certified (or horizon-sampled) extremes of ρ_n over k < n ≤ horizon.
    pub fn tail_stats(&self, k: u64, horizon: u64) -> TailStats {
        assert!(horizon > k, "horizon must exceed k");
        match &self.gen {
            Generator::Luroth => {
                // ρ_n = n/(n+1) increases to 1; the sup is a limit, not attained,
                // so only horizon extremes are reported and certified stays false.
                TailStats {
                    k,
                    s: self.rho(horizon),
                    m: self.rho(k + 1),
                    certified: false,
                    note: Some(
                        "rho_n increases to 1; sup over any horizon is rho at the horizon".into(),
                    ),
                }
            }
            Generator::Dyadic => TailStats { k, s: 0.5, m: 0.5, certified: true, note: None },
            Generator::Geometric { ratio } => {
                let r = rat_to_f64(ratio);
                TailStats { k, s: r, m: r, certified: true, note: None }
            }
            Generator::TwoPeriodic { second, ratio } => {
                let odd = rat_to_f64(second);
                let even = rat_to_f64(&(ratio / second));
                TailStats { k, s: odd.max(even), m: odd.min(even), certified: true, note: None }
            }
            Generator::Table { entries, tail_ratio } => {
                let kk = entries.len() as u64;
                let mut s = rat_to_f64(tail_ratio);
                let mut m = s;
                for n in (k + 1)..kk.max(k + 1) {
                    let r = self.rho(n);
                    s = s.max(r);
                    m = m.min(r);
                }
                TailStats { k, s, m, certified: true, note: None }
            }
            Generator::ClosedForm(_) => {
                let mut s = f64::NEG_INFINITY;
                let mut m = f64::INFINITY;
                for n in (k + 1)..=horizon {
                    let r = self.rho(n);
                    s = s.max(r);
                    m = m.min(r);
                }
                TailStats {
                    k,
                    s,
                    m,
                    certified: false,
                    note: Some(format!("sampled over ({k}, {horizon}]")),
                }
            }
        }
    }

    /// Certified enclosure of {ρ_n : n > k}; uncertified extremes are sampled
    /// over a fixed horizon. The upper bound may equal 1.
    pub(crate) fn rho_enclosure(&self, k: u64) -> RhoEnclosure {
        match &self.gen {
            Generator::Luroth => RhoEnclosure { lo: self.rho(k + 1), hi: 1.0, certified: true },
            Generator::ClosedForm(_) => {
                let st = self.tail_stats(k, k + 1024);
                RhoEnclosure { lo: st.m, hi: st.s, certified: false }
            }
            _ => {
                let st = self.tail_stats(k, k + 1);
                RhoEnclosure { lo: st.m, hi: st.s, certified: true }
            }
        }
    }

    /// Exact rational enclosure of the ratio tail, when available. The upper
    /// bound is `None` for ρ_n ↑ 1.
    pub(crate) fn rho_enclosure_exact(&self, k: u64) -> Option<(BigRational, Option<BigRational>)> {
        match &self.gen {
            Generator::Luroth => Some((self.rho_exact(k + 1)?, None)),
            Generator::Dyadic | Generator::Geometric { .. } => {
                let r = self.rho_exact(k + 1)?;
                Some((r.clone(), Some(r)))
            }
            Generator::TwoPeriodic { second, ratio } => {
                let odd = second.clone();
                let even = ratio / second;
                Some((odd.clone().min(even.clone()), Some(odd.max(even))))
            }
            Generator::Table { entries, tail_ratio } => {
                let kk = entries.len() as u64;
                let mut lo = tail_ratio.clone();
                let mut hi = tail_ratio.clone();
                for n in (k + 1)..kk.max(k + 1) {
                    let r = self.rho_exact(n)?;
                    if r < lo {
                        lo = r.clone();
                    }
                    if r > hi {
                        hi = r;
                    }
                }
                Some((lo, Some(hi)))
            }
            Generator::ClosedForm(_) => None,
        }
    }

    /// lim ρ_n when the generator pins it down exactly.
    pub(crate) fn known_rho_limit(&self) -> Option<BigRational> {
        match &self.gen {
            Generator::Luroth => Some(BigRational::one()),
            Generator::Dyadic => Some(BigRational::new(BigInt::one(), BigInt::from(2))),
            Generator::Geometric { ratio } => Some(ratio.clone()),
            Generator::Table { tail_ratio, .. } => Some(tail_ratio.clone()),
            Generator::TwoPeriodic { second, ratio } => {
                // the two alternating ratios coincide iff second² = ratio
                (&(second * second) == ratio).then(|| second.clone())
            }
            Generator::ClosedForm(_) => None,
        }
    }

    /// The eventually-periodic geometric scaling of t_n, when the generator
    /// has one. This is what makes tail sums exactly summable.
    pub(crate) fn geo_tail(&self) -> Option<GeoTail> {
        match &self.gen {
            Generator::Dyadic => Some(GeoTail {
                start: 1,
                period: 1,
                ratio: BigRational::new(BigInt::one(), BigInt::from(2)),
            }),
            Generator::Geometric { ratio } => {
                Some(GeoTail { start: 1, period: 1, ratio: ratio.clone() })
            }
            Generator::TwoPeriodic { ratio, .. } => {
                Some(GeoTail { start: 1, period: 2, ratio: ratio.clone() })
            }
            Generator::Table { entries, tail_ratio } => {
                Some(GeoTail { start: entries.len() as u64, period: 1, ratio: tail_ratio.clone() })
            }
            Generator::Luroth | Generator::ClosedForm(_) => None,
        }
    }

    /// Index of the interval (t_{d+1}, t_d] containing x; `None` iff x = 0.
    /// Membership is decided on the represented value with the half-open rule;
    /// x = t_d belongs to interval d.
    pub fn digit_of(&self, x: f64) -> Option<u64> {
        if x == 0.0 {
            return None;
        }
        debug_assert!(x > 0.0 && x <= 1.0);
        let mut d = self.digit_candidate(x);
        while d > 1 && self.t(d) < x {
            d -= 1;
        }
        while self.t(d + 1) >= x {
            d += 1;
        }
        Some(d)
    }

    /// Exact-membership version of [`Partition::digit_of`]; requires a rational generator.
    pub fn digit_of_exact(&self, x: &BigRational) -> Option<u64> {
        if x.is_zero() {
            return None;
        }
        let mut d = self.digit_candidate(rat_to_f64(x)).max(1);
        while d > 1 && &self.t_exact(d).expect("rational generator") < x {
            d -= 1;
        }
        while &self.t_exact(d + 1).expect("rational generator") >= x {
            d += 1;
        }
        Some(d)
    }

    fn digit_candidate(&self, x: f64) -> u64 {
        let guess = match &self.gen {
            Generator::Luroth => (1.0 / x).floor(),
            Generator::Dyadic => (-x.log2()).floor() + 1.0,
            Generator::Geometric { ratio } => (x.ln() / rat_to_f64(ratio).ln()).floor() + 1.0,
            Generator::TwoPeriodic { ratio, .. } => {
                let m = (x.ln() / rat_to_f64(ratio).ln()).floor();
                2.0 * m + 1.0
            }
            Generator::Table { entries, tail_ratio } => {
                let tk = rat_to_f64(entries.last().expect("nonempty table"));
                if x > tk {
                    // binary search among the explicit entries
                    let mut lo = 1u64;
                    let mut hi = entries.len() as u64;
                    while lo < hi {
                        let mid = (lo + hi).div_ceil(2);
                        if rat_to_f64(&entries[(mid - 1) as usize]) >= x {
                            lo = mid;
                        } else {
                            hi = mid - 1;
                        }
                    }
                    lo as f64
                } else {
                    entries.len() as f64 + ((x / tk).ln() / rat_to_f64(tail_ratio).ln()).floor()
                }
            }
            Generator::ClosedForm(f) => {
                // doubling then binary search for the last n with t_n ≥ x
                let mut hi = 2u64;
                while f(hi) >= x {
                    hi *= 2;
                }
                let mut lo = hi / 2;
                while lo < hi - 1 {
                    let mid = lo + (hi - lo) / 2;
                    if f(mid) >= x {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo as f64
            }
        };
        if guess.is_finite() && guess >= 1.0 {
            guess as u64
        } else {
            1
        }
    }
}

fn pow_f64(b: f64, e: u64) -> f64 {
    if e <= i32::MAX as u64 {
        b.powi(e as i32)
    } else {
        0.0 // decays below the subnormal range long before this
    }
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

/// On-disk partition description:
/// `{"generator": "luroth" | "dyadic" | {"geometric": r} |
///   {"two_periodic": {"t2": r, "ratio": r}} | {"table": [..], "tail_ratio": r}}`.
/// Rationals may be JSON numbers or strings like "3/5" / "0.4".
#[derive(Debug, Deserialize)]
pub struct PartitionConfig {
    pub generator: GeneratorConfig,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum GeneratorConfig {
    Name(String),
    Composite(CompositeConfig),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeConfig {
    #[serde(default)]
    pub geometric: Option<RationalConfig>,
    #[serde(default)]
    pub two_periodic: Option<TwoPeriodicConfig>,
    #[serde(default)]
    pub table: Option<Vec<RationalConfig>>,
    #[serde(default)]
    pub tail_ratio: Option<RationalConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPeriodicConfig {
    pub t2: RationalConfig,
    pub ratio: RationalConfig,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RationalConfig {
    Num(f64),
    Str(String),
}

impl RationalConfig {
    pub fn to_rational(&self) -> Result<BigRational> {
        match self {
            // shortest-roundtrip display recovers the decimal literal the
            // config author wrote, so 0.4 becomes 2/5 and not the f64 bits
            RationalConfig::Num(x) => parse_rational(&format!("{x}")),
            RationalConfig::Str(s) => parse_rational(s),
        }
    }
}

impl Partition {
    pub fn from_config(cfg: &PartitionConfig) -> Result<Self> {
        match &cfg.generator {
            GeneratorConfig::Name(name) => match name.to_ascii_lowercase().as_str() {
                "luroth" => Ok(Partition::luroth()),
                "dyadic" => Ok(Partition::dyadic()),
                other => Err(Error::Parse(format!("unknown generator `{other}`"))),
            },
            GeneratorConfig::Composite(c) => match (&c.geometric, &c.two_periodic, &c.table) {
                (Some(r), None, None) => Partition::geometric(r.to_rational()?),
                (None, Some(tp), None) => {
                    Partition::two_periodic(tp.t2.to_rational()?, tp.ratio.to_rational()?)
                }
                (None, None, Some(entries)) => {
                    let tail = c.tail_ratio.as_ref().ok_or_else(|| {
                        Error::Parse("table generator requires tail_ratio".into())
                    })?;
                    let entries =
                        entries.iter().map(|r| r.to_rational()).collect::<Result<Vec<_>>>()?;
                    Partition::from_table(entries, tail.to_rational()?)
                }
                _ => Err(Error::Parse(
                    "generator object must set exactly one of geometric | two_periodic | table"
                        .into(),
                )),
            },
        }
    }

    pub fn from_config_str(json: &str) -> Result<Self> {
        let cfg: PartitionConfig =
            serde_json::from_str(json).map_err(|e| Error::Parse(format!("config: {e}")))?;
        Partition::from_config(&cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::big_rat;

    #[test]
    fn luroth_values() {
        let p = Partition::luroth();
        assert_eq!(p.t(4), 0.25);
        assert_eq!(p.t_exact(4).unwrap(), big_rat(1, 4));
        assert_eq!(p.a_exact(1).unwrap(), big_rat(1, 2));
        assert_eq!(p.rho_exact(2).unwrap(), big_rat(2, 3));
    }

    #[test]
    fn dyadic_values() {
        let p = Partition::dyadic();
        assert_eq!(p.t(3), 0.25);
        assert_eq!(p.rho(7), 0.5);
        assert_eq!(p.a_exact(3).unwrap(), big_rat(1, 8));
    }

    #[test]
    fn geometric_values() {
        let p = Partition::geometric(big_rat(2, 5)).unwrap();
        assert_eq!(p.t_exact(3).unwrap(), big_rat(4, 25));
        assert!((p.t(3) - 0.16).abs() < 1e-15);
        assert!((p.a(2) - 0.24).abs() < 1e-15);
        assert!(Partition::geometric(big_rat(7, 5)).is_err());
        assert!(Partition::geometric(big_rat(0, 5)).is_err());
    }

    #[test]
    fn two_periodic_alternating_ratios() {
        // t_{2m+1} = 1/2^m, t_{2m+2} = 3/(5·2^m)
        let p = Partition::two_periodic(big_rat(3, 5), big_rat(1, 2)).unwrap();
        assert_eq!(p.t_exact(1).unwrap(), big_rat(1, 1));
        assert_eq!(p.t_exact(2).unwrap(), big_rat(3, 5));
        assert_eq!(p.t_exact(3).unwrap(), big_rat(1, 2));
        assert_eq!(p.t_exact(4).unwrap(), big_rat(3, 10));
        assert_eq!(p.rho_exact(3).unwrap(), big_rat(3, 5));
        assert_eq!(p.rho_exact(4).unwrap(), big_rat(5, 6));
        // t_2 must keep the sequence strictly decreasing
        assert!(Partition::two_periodic(big_rat(1, 2), big_rat(1, 2)).is_err());
        assert!(Partition::two_periodic(big_rat(6, 5), big_rat(1, 2)).is_err());
    }

    #[test]
    fn table_validation_and_tail() {
        let p =
            Partition::from_table(vec![big_rat(1, 1), big_rat(1, 2), big_rat(1, 3)], big_rat(2, 5))
                .unwrap();
        assert_eq!(p.t_exact(3).unwrap(), big_rat(1, 3));
        assert_eq!(p.t_exact(5).unwrap(), big_rat(4, 75)); // (1/3)·(2/5)²
        assert!(Partition::from_table(vec![big_rat(1, 2)], big_rat(1, 2)).is_err());
        assert!(Partition::from_table(
            vec![big_rat(1, 1), big_rat(1, 2), big_rat(3, 4)],
            big_rat(1, 2)
        )
        .is_err());
    }

    #[test]
    fn partial_sums_close_at_every_depth() {
        let parts = [
            Partition::luroth(),
            Partition::dyadic(),
            Partition::geometric(big_rat(2, 5)).unwrap(),
            Partition::two_periodic(big_rat(3, 5), big_rat(1, 2)).unwrap(),
        ];
        for p in &parts {
            for k in [1u64, 7, 100, 10_000] {
                let mut sum = 0.0;
                for n in 1..=k {
                    sum += p.a(n);
                }
                let gap = (sum + p.t(k + 1) - 1.0).abs();
                assert!(gap < 1e-12, "{}: sum identity off by {gap} at K={k}", p.describe());
            }
        }
    }

    #[test]
    fn tail_stats_shapes() {
        let lur = Partition::luroth();
        let st = lur.tail_stats(5, 100);
        assert!(!st.certified);
        assert_eq!(st.m, 6.0 / 7.0);
        assert_eq!(st.s, 100.0 / 101.0);

        let geo = Partition::geometric(big_rat(2, 5)).unwrap();
        let st = geo.tail_stats(0, 10);
        assert!(st.certified);
        assert_eq!((st.m, st.s), (0.4, 0.4));

        let ex1 = Partition::two_periodic(big_rat(3, 5), big_rat(1, 2)).unwrap();
        let st = ex1.tail_stats(0, 10);
        assert!(st.certified);
        assert_eq!(st.m, 0.6);
        assert_eq!(st.s, 5.0 / 6.0);
    }

    #[test]
    fn digit_lookup_half_open() {
        let lur = Partition::luroth();
        assert_eq!(lur.digit_of(0.7), Some(1));
        assert_eq!(lur.digit_of(0.5), Some(2)); // x = t_2 belongs to A_2
        assert_eq!(lur.digit_of(1.0), Some(1));
        assert_eq!(lur.digit_of(0.0), None);
        let dy = Partition::dyadic();
        assert_eq!(dy.digit_of(0.3), Some(2));
        assert_eq!(dy.digit_of(0.25), Some(3));
        assert_eq!(dy.digit_of_exact(&big_rat(1, 4)), Some(3));
        // tiny values stay cheap
        assert_eq!(dy.digit_of(f64::exp2(-40.0) * 1.5), Some(40));
    }

    #[test]
    fn config_parsing() {
        let p = Partition::from_config_str(r#"{"generator": "luroth"}"#).unwrap();
        assert!(matches!(p.generator(), Generator::Luroth));
        let p = Partition::from_config_str(r#"{"generator": {"geometric": 0.4}}"#).unwrap();
        assert_eq!(p.rho_exact(1).unwrap(), big_rat(2, 5));
        let p = Partition::from_config_str(
            r#"{"generator": {"two_periodic": {"t2": "21/40", "ratio": "1/3"}}}"#,
        )
        .unwrap();
        assert_eq!(p.t_exact(2).unwrap(), big_rat(21, 40));
        let p = Partition::from_config_str(
            r#"{"generator": {"table": [1, 0.5, "1/3"], "tail_ratio": "2/5"}}"#,
        )
        .unwrap();
        assert_eq!(p.t_exact(4).unwrap(), big_rat(2, 15));
        assert!(Partition::from_config_str(r#"{"generator": "cantor"}"#).is_err());
        assert!(Partition::from_config_str(r#"{"generator": {"table": [1, 0.5]}}"#).is_err());
    }
}
