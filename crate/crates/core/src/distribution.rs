//! The limit distribution F_ε of the approximation coefficients, the expected
//! average M_ε, the building blocks g(k), G(n), I(n), and the Monte Carlo
//! counterpart of F.
//!
//! F_ε(z) = Σ_n f_n^{ε_n}(z) with f_n^b(z) = a_n when a_n/t_{n+1−b} < z and
//! t_{n+1−b}·z otherwise; M_ε = ∫(1 − F_ε)dλ. Every series is truncated
//! against a certified tail bound (each omitted f-term is at most a_n, and
//! g(k) ≤ a_k/2), so results carry a guaranteed enclosure. For the built-in
//! generators the tails are summed in closed form instead and the enclosure
//! collapses to a point of ℚ + ℚ·π².

use num::rational::BigRational;
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounded::{Bounded, SignClass};
use crate::error::{Error, Result};
use crate::exact::{big_rat, inv_square_tail, rat_from_f64, rat_pow, SymReal};
use crate::partition::{Generator, Partition};
use crate::signs::{SignSpec, SignTail};

/// Hard cap on adaptive truncation indices for the generic float path.
const INDEX_CAP: u64 = 1 << 26;

// ---------------------------------------------------------------------------
// per-index terms
// ---------------------------------------------------------------------------

/// f_n^b(z): the n-th summand of F_ε. Continuous across its threshold
/// (both branches equal a_n at z = a_n/t_{n+1−b}); ties go to the linear branch.
pub fn f_term(p: &Partition, n: u64, b: bool, z: f64) -> Result<f64> {
    check_z(z)?;
    Ok(f_term_unchecked(p, n, b, z))
}

fn f_term_unchecked(p: &Partition, n: u64, b: bool, z: f64) -> f64 {
    let t_ref = if b { p.t(n) } else { p.t(n + 1) };
    let a = p.a(n);
    if a / t_ref < z {
        a
    } else {
        t_ref * z
    }
}

fn f_term_exact(p: &Partition, n: u64, b: bool, z: &BigRational) -> Option<BigRational> {
    let t_ref = if b { p.t_exact(n)? } else { p.t_exact(n + 1)? };
    let a = p.a_exact(n)?;
    Some(if a < z * &t_ref { a } else { t_ref * z })
}

/// ∫₀¹ f_n^b dλ in closed form: a_n − a_n²/(2 t_{n+1−b}) when a_n ≤ t_{n+1−b},
/// else t_{n+1−b}/2.
pub fn m_term(p: &Partition, n: u64, b: bool) -> f64 {
    let t_ref = if b { p.t(n) } else { p.t(n + 1) };
    let a = p.a(n);
    if t_ref == 0.0 || a == 0.0 {
        // t_n underflowed f64; the true value sits below the subnormal range
        return 0.0;
    }
    // scale-invariant form: a²/(2t) underflows long before a does
    let r = a / t_ref;
    if r <= 1.0 {
        a * (1.0 - r / 2.0)
    } else {
        t_ref / 2.0
    }
}

pub fn m_term_exact(p: &Partition, n: u64, b: bool) -> Option<BigRational> {
    let t_ref = if b { p.t_exact(n)? } else { p.t_exact(n + 1)? };
    let a = p.a_exact(n)?;
    Some(if a <= t_ref {
        &a - &a * &a / (BigRational::from_integer(2.into()) * t_ref)
    } else {
        t_ref / BigRational::from_integer(2.into())
    })
}

/// g(k) = ∫₀¹ (f_k¹ − f_k⁰) dλ, branch on ρ_k ≤ 1/2. Algebraically equal to
/// the textbook forms t_k/2 − t_{k+1}/2 − t_{k+1}²/(2t_k) resp.
/// t_k²/(2t_{k+1}) − t_{k+1}²/(2t_k) + 3t_{k+1}/2 − 3t_k/2, rearranged to
/// avoid the cancellation that kills the second branch in floats.
pub fn g_term(p: &Partition, k: u64) -> f64 {
    let t = p.t(k);
    let t1 = p.t(k + 1);
    let a = p.a(k);
    if t == 0.0 || t1 == 0.0 || a == 0.0 {
        return 0.0; // below the f64 subnormal range
    }
    // scale-invariant forms of the two branch formulas
    let rho = t1 / t;
    if 2.0 * t1 <= t {
        (a - t1 * rho) / 2.0
    } else {
        a * (a / t) * (a / t1) / 2.0
    }
}

pub fn g_term_exact(p: &Partition, k: u64) -> Option<BigRational> {
    let t = p.t_exact(k)?;
    let t1 = p.t_exact(k + 1)?;
    let a = &t - &t1;
    let two = BigRational::from_integer(2.into());
    Some(if &two * &t1 <= t {
        (&a * &t - &t1 * &t1) / (&two * &t)
    } else {
        &a * &a * &a / (&two * &t * &t1)
    })
}

// ---------------------------------------------------------------------------
// exact tail sums
// ---------------------------------------------------------------------------

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Σ_{n≥from} of a 1-homogeneous per-index term over an eventually-periodic
/// geometric generator, by summing one period block against the closed-form
/// geometric factor.
fn geo_tail_sum(
    p: &Partition,
    from: u64,
    extra_period: u64,
    stabilize_from: u64,
    term: impl Fn(u64) -> Option<BigRational>,
) -> Option<BigRational> {
    let gt = p.geo_tail()?;
    let s0 = from.max(gt.start).max(stabilize_from);
    let period = lcm(gt.period, extra_period);
    let block_ratio = rat_pow(&gt.ratio, period / gt.period);
    let mut finite = BigRational::zero();
    for n in from..s0 {
        finite += term(n)?;
    }
    let mut block = BigRational::zero();
    for j in 0..period {
        block += term(s0 + j)?;
    }
    Some(finite + block / (BigRational::one() - block_ratio))
}

/// Σ_{n≥from} m_term(n, ε_n) exactly, when the value lives in ℚ + ℚ·π².
pub(crate) fn m_tail_exact(p: &Partition, eps: &SignSpec, from: u64) -> Option<SymReal> {
    assert!(from >= 1);
    if p.geo_tail().is_some() {
        let sum = geo_tail_sum(p, from, eps.tail().period(), eps.periodic_from(), |n| {
            m_term_exact(p, n, eps.bit(n))
        })?;
        return Some(SymReal::from_rational(sum));
    }
    if matches!(p.generator(), Generator::Luroth) {
        // constant tail bit required; a genuinely mixed periodic tail leaves
        // ℚ + ℚ·π² (per-residue ζ(2,·) values appear)
        let bit = match eps.tail() {
            SignTail::AllZero => false,
            SignTail::AllOne => true,
            SignTail::Periodic(w) => {
                let b = w[0];
                if w.iter().any(|&x| x != b) {
                    return None;
                }
                b
            }
        };
        let s0 = from.max(eps.periodic_from());
        let mut finite = BigRational::zero();
        for n in from..s0 {
            finite += m_term_exact(p, n, eps.bit(n))?;
        }
        return Some(luroth_m_tail(s0, bit).add(&SymReal::from_rational(finite)));
    }
    None
}

/// Lüroth: Σ_{n≥m} m_term(n, b) through the partial-fraction telescoping
/// m(n,0) = 3/(2n(n+1)) − 1/(2n²) and m(n,1) = 1/(2n(n+1)) + 1/(2(n+1)²).
fn luroth_m_tail(m: u64, b: bool) -> SymReal {
    let m_i = i64::try_from(m).expect("index fits i64");
    if b {
        SymReal::from_rational(big_rat(1, 2 * m_i))
            .add(&inv_square_tail(m + 1).scale(&big_rat(1, 2)))
    } else {
        SymReal::from_rational(big_rat(3, 2 * m_i)).sub(&inv_square_tail(m).scale(&big_rat(1, 2)))
    }
}

/// Σ_{k≥from} g(k) exactly, when representable.
fn g_tail_exact(p: &Partition, from: u64) -> Option<SymReal> {
    assert!(from >= 1);
    if p.geo_tail().is_some() {
        let sum = geo_tail_sum(p, from, 1, 1, |k| g_term_exact(p, k))?;
        return Some(SymReal::from_rational(sum));
    }
    if matches!(p.generator(), Generator::Luroth) {
        // g(k) = 1/(2k²(k+1)²) for every k ≥ 1, and
        // Σ_{k≥m} = ½ Σ_{k≥m} 1/k² + ½ Σ_{k≥m+1} 1/k² − 1/m
        let m_i = i64::try_from(from).expect("index fits i64");
        let half = big_rat(1, 2);
        return Some(
            inv_square_tail(from)
                .scale(&half)
                .add(&inv_square_tail(from + 1).scale(&half))
                .sub(&SymReal::from_rational(big_rat(1, m_i))),
        );
    }
    None
}

// ---------------------------------------------------------------------------
// F: the limit CDF
// ---------------------------------------------------------------------------

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0 && z <= 1.0) {
        return Err(Error::Domain(format!("z must lie in (0,1], got {z}")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    Ok(())
}

/// F_ε(z) with certified truncation radius (≤ tol; 0 on the exact paths).
pub fn cdf(p: &Partition, eps: &SignSpec, z: f64, tol: f64) -> Result<Bounded> {
    check_z(z)?;
    check_tol(tol)?;

    if p.geo_tail().is_some() && p.is_exact() {
        let zr = rat_from_f64(z).expect("finite z");
        let sum = geo_tail_sum(p, 1, eps.tail().period(), eps.periodic_from(), |n| {
            f_term_exact(p, n, eps.bit(n), &zr)
        })
        .expect("rational generator");
        return Ok(Bounded::exact(crate::exact::rat_to_f64(&sum)));
    }

    if matches!(p.generator(), Generator::Luroth) {
        // ρ_n = n/(n+1) increases, so for n > 1/z both thresholds a_n/t_{n+1−b}
        // fall strictly below z: the whole tail sums to Σ a_n = t_{K+1} exactly.
        let k = (1.0 / z).ceil() as u64 + 1;
        if k > INDEX_CAP {
            return Err(Error::TolUnreachable {
                tol,
                detail: format!("z = {z} needs {k} explicit terms"),
            });
        }
        let mut sum = 0.0;
        for n in 1..=k {
            sum += f_term_unchecked(p, n, eps.bit(n), z);
        }
        return Ok(Bounded::exact(sum + p.t(k + 1)));
    }

    // generic fallback: every omitted term lies in [0, a_n]
    let mut sum = 0.0;
    let mut done = 1u64;
    let mut k = 64u64;
    loop {
        for n in done..=k {
            sum += f_term_unchecked(p, n, eps.bit(n), z);
        }
        done = k + 1;
        let tail = p.t(k + 1);
        if tail <= 2.0 * tol {
            return Ok(Bounded::new(sum + tail / 2.0, tail / 2.0));
        }
        if k >= INDEX_CAP {
            return Err(Error::TolUnreachable {
                tol,
                detail: format!("tail bound still {tail:e} at index {k}"),
            });
        }
        k *= 2;
    }
}

// ---------------------------------------------------------------------------
// M: expected average approximation coefficient
// ---------------------------------------------------------------------------

/// M_ε as an exact element of ℚ + ℚ·π², when the partition and sign tail
/// admit one (all built-in generators; for the harmonic family the sign tail
/// must be eventually constant).
pub fn mean_theta_exact(p: &Partition, eps: &SignSpec) -> Option<SymReal> {
    let tail = m_tail_exact(p, eps, 1)?;
    Some(SymReal::from_rational(BigRational::one()).sub(&tail))
}

/// m_term(n, b) = a_n · φ_b(ρ_n) with φ increasing in ρ; used to enclose
/// float tails via Σ_{n>K} a_n = t_{K+1}.
fn phi(b: bool, rho: f64) -> f64 {
    if b {
        (1.0 + rho) / 2.0
    } else if rho <= 0.5 {
        rho / (2.0 * (1.0 - rho))
    } else {
        (3.0 * rho - 1.0) / (2.0 * rho)
    }
}

/// Certified enclosure of Σ_{n≥from} m_term(n, ε_n); exact when possible,
/// otherwise truncated against the tail enclosure t_{K+1}·[φ(lo), φ(hi)].
pub(crate) fn m_tail_bounded(
    p: &Partition,
    eps: &SignSpec,
    from: u64,
    tol: f64,
) -> Result<Bounded> {
    if let Some(exact) = m_tail_exact(p, eps, from) {
        return Ok(Bounded::exact(exact.to_f64()));
    }

    let (has_zero, has_one) = eps.tail().bits_present();
    let mut sum = 0.0;
    let mut done = from;
    let mut k = (from.max(eps.prefix_len()) + 256).next_power_of_two();
    loop {
        for n in done..=k {
            sum += m_term(p, n, eps.bit(n));
        }
        done = k + 1;
        let t1 = p.t(k + 1);
        let enc = p.rho_enclosure(k);
        let (lo_f, hi_f) = if enc.certified {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (present, b) in [(has_zero, false), (has_one, true)] {
                if present {
                    lo = lo.min(phi(b, enc.lo));
                    hi = hi.max(phi(b, enc.hi));
                }
            }
            (lo, hi)
        } else {
            (0.0, 1.0)
        };
        let (tail_lo, tail_hi) = (t1 * lo_f, t1 * hi_f);
        let radius = (tail_hi - tail_lo) / 2.0;
        if radius <= tol {
            return Ok(Bounded::new(sum + (tail_lo + tail_hi) / 2.0, radius));
        }
        if k >= INDEX_CAP {
            return Err(Error::TolUnreachable {
                tol,
                detail: format!("tail radius still {radius:e} at index {k}"),
            });
        }
        k *= 2;
    }
}

/// M_ε = 1 − Σ_n m_term(n, ε_n) with certified radius ≤ tol.
pub fn mean_theta(p: &Partition, eps: &SignSpec, tol: f64) -> Result<Bounded> {
    check_tol(tol)?;
    let tail = m_tail_bounded(p, eps, 1, tol)?;
    Ok(Bounded::new(1.0 - tail.value, tail.radius))
}

// ---------------------------------------------------------------------------
// g-series: G(n) and I(n)
// ---------------------------------------------------------------------------

/// G(n) together with its certified sign.
#[derive(Clone, Debug)]
pub struct GapValue {
    pub n: u64,
    pub bounded: Bounded,
    pub sign: SignClass,
}

/// G(n) = g(n+1) − Σ_{k≥n+2} g(k) as an exact symbolic value, when available.
pub fn gap_exact(p: &Partition, n: u64) -> Option<SymReal> {
    let head = SymReal::from_rational(g_term_exact(p, n + 1)?);
    Some(head.sub(&g_tail_exact(p, n + 2)?))
}

/// I(n) = Σ_{k≥n+1} g(k), the common length of all depth-n intervals.
pub fn interval_length_exact(p: &Partition, n: u64) -> Option<SymReal> {
    g_tail_exact(p, n + 1)
}

/// g(k) = a_k · ψ(ρ_k) with ψ decreasing in ρ and ψ(1) = 0; encloses float
/// tails of the g-series.
fn psi(rho: f64) -> f64 {
    if rho <= 0.5 {
        (1.0 - rho - rho * rho) / (2.0 * (1.0 - rho))
    } else {
        let q = 1.0 - rho;
        q * q / (2.0 * rho)
    }
}

/// Certified enclosure of Σ_{k≥from} g(k) by the float fallback.
fn g_tail_bounded(p: &Partition, from: u64, tol: f64) -> Result<Bounded> {
    if let Some(exact) = g_tail_exact(p, from) {
        return Ok(Bounded::exact(exact.to_f64()));
    }
    let mut sum = 0.0;
    let mut done = from;
    let mut k = (from + 64).next_power_of_two();
    loop {
        for j in done..=k {
            sum += g_term(p, j);
        }
        done = k + 1;
        let t1 = p.t(k + 1);
        let enc = p.rho_enclosure(k);
        let (lo_f, hi_f) = if enc.certified { (psi(enc.hi), psi(enc.lo)) } else { (0.0, 0.5) };
        let (tail_lo, tail_hi) = (t1 * lo_f, t1 * hi_f);
        let radius = (tail_hi - tail_lo) / 2.0;
        if radius <= tol {
            return Ok(Bounded::new(sum + (tail_lo + tail_hi) / 2.0, radius));
        }
        if k >= INDEX_CAP {
            return Err(Error::TolUnreachable {
                tol,
                detail: format!("g-tail radius still {radius:e} at index {k}"),
            });
        }
        k *= 2;
    }
}

/// G(n) with a certified sign enclosure. A sign that cannot be decided is
/// reported as [`SignClass::Undecided`], never rounded away.
pub fn gap(p: &Partition, n: u64, tol: f64) -> Result<GapValue> {
    check_tol(tol)?;
    if let Some(exact) = gap_exact(p, n) {
        let sign = exact.sign().map(SignClass::from_ordering).unwrap_or(SignClass::Undecided);
        return Ok(GapValue { n, bounded: Bounded::exact(exact.to_f64()), sign });
    }
    let tail = g_tail_bounded(p, n + 2, tol)?;
    let bounded = Bounded::new(g_term(p, n + 1) - tail.value, tail.radius);
    Ok(GapValue { n, bounded, sign: bounded.sign() })
}

/// I(n) with certified radius; strictly positive for every partition.
pub fn interval_length(p: &Partition, n: u64, tol: f64) -> Result<Bounded> {
    check_tol(tol)?;
    g_tail_bounded(p, n + 1, tol)
}

// ---------------------------------------------------------------------------
// Monte Carlo: empirical distribution of θ along one orbit
// ---------------------------------------------------------------------------

/// Empirical counterpart of F: from a single orbit of length `n_iter`,
/// returns #{n ≤ N : θ_n < z}/N for each grid point. Deterministic in `seed`.
///
/// θ_n is evaluated through θ_n = (a_{d_n}/t_{d_n+1−s_n})·T^n(x). After each
/// affine expansion step the mantissa bits the map consumed are replenished
/// with fresh uniform bits (the orbit models an initial point with infinitely
/// many random bits, revealed lazily); without this, partitions with
/// power-of-two slopes collapse onto exact dyadic orbits in f64.
pub fn empirical_cdf(
    p: &Partition,
    eps: &SignSpec,
    x0: Option<f64>,
    z_grid: &[f64],
    n_iter: u64,
    seed: u64,
) -> Vec<f64> {
    assert!(n_iter >= 1, "need at least one orbit step");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = match x0 {
        Some(x) => {
            debug_assert!(x > 0.0 && x < 1.0, "x0 must lie in (0,1)");
            x
        }
        None => rng.gen_range(f64::EPSILON..1.0),
    };

    let mut thetas = Vec::with_capacity(n_iter as usize);
    for _ in 0..n_iter {
        let d = loop {
            match p.digit_of(y) {
                Some(d) => break d,
                // exact zero has measure zero for the true orbit
                None => y = rng.gen_range(f64::EPSILON..1.0),
            }
        };
        let s = eps.bit(d);
        let t_hi = p.t(d);
        let t_lo = p.t(d + 1);
        let a = p.a(d);
        let mut next = if s { (t_hi - y) / a } else { (y - t_lo) / a };
        next += rng.gen::<f64>() * (f64::EPSILON / a);
        next = next.clamp(0.0, 1.0 - f64::EPSILON);
        let t_ref = if s { t_hi } else { t_lo };
        thetas.push(a / t_ref * next);
        y = next;
    }

    thetas.sort_unstable_by(f64::total_cmp);
    let n = n_iter as f64;
    z_grid.iter().map(|&z| thetas.partition_point(|&th| th < z) as f64 / n).collect()
}

/// The interior grid {i/(n+1) : i = 1..=n}; `unit_grid(99)` is the canonical
/// 99-point grid on (0,1).
pub fn unit_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}
