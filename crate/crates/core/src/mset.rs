//! The set 𝓜 of attainable expected averages: the nested interval tree
//! I_ω = [M_{ω·1̄}, M_{ω·0̄}], depth-k renderings with certified merging,
//! structure classification driven by the sign of G, and the dimension
//! sequence for the Cantor regimes.

use std::cmp::Ordering;
use std::fmt;

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::bounded::{Bounded, SignClass};
use crate::distribution::{
    gap, gap_exact, interval_length, interval_length_exact, m_tail_bounded, m_tail_exact,
    m_term_exact, GapValue,
};
use crate::error::{Error, Result};
use crate::exact::{big_rat, rat_ln, SymReal};
use crate::partition::{Generator, Partition};
use crate::signs::{SignSpec, Word};
use crate::{distribution, exec};

/// An interval endpoint: certified f64 enclosure plus, for rational
/// generators, the exact value it rounds.
#[derive(Clone, Debug)]
pub struct Endpoint {
    pub value: Bounded,
    exact: Option<SymReal>,
}

impl Endpoint {
    fn from_exact(e: SymReal) -> Self {
        Endpoint { value: Bounded::exact(e.to_f64()), exact: Some(e) }
    }

    fn from_bounded(b: Bounded) -> Self {
        Endpoint { value: b, exact: None }
    }

    pub fn exact(&self) -> Option<&SymReal> {
        self.exact.as_ref()
    }

    /// Certified comparison; `None` when the enclosures overlap and no exact
    /// values are available.
    pub fn cmp_certified(&self, other: &Endpoint) -> Option<Ordering> {
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            return a.cmp_certified(b);
        }
        if self.value.upper() < other.value.lower() {
            Some(Ordering::Less)
        } else if self.value.lower() > other.value.upper() {
            Some(Ordering::Greater)
        } else if self.value.radius == 0.0
            && other.value.radius == 0.0
            && self.value.value == other.value.value
        {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

/// I_ω = [M_{ω·1̄}, M_{ω·0̄}] labeled by its word.
#[derive(Clone, Debug)]
pub struct LabeledInterval {
    pub word: Word,
    pub lo: Endpoint,
    pub hi: Endpoint,
}

/// A maximal run of certified-overlapping intervals in the merged rendering.
#[derive(Clone, Debug)]
pub struct MergedInterval {
    pub lo: Endpoint,
    pub hi: Endpoint,
    /// How many depth-k intervals the run absorbed.
    pub members: u64,
}

/// The interval I_ω with endpoints computed through M with the constant
/// tails appended to the word.
pub fn interval(p: &Partition, word: &Word, tol: f64) -> Result<LabeledInterval> {
    let lo = endpoint(p, &SignSpec::all_one().prepend(word), tol)?;
    let hi = endpoint(p, &SignSpec::all_zero().prepend(word), tol)?;
    Ok(LabeledInterval { word: word.clone(), lo, hi })
}

fn endpoint(p: &Partition, eps: &SignSpec, tol: f64) -> Result<Endpoint> {
    if let Some(e) = distribution::mean_theta_exact(p, eps) {
        return Ok(Endpoint::from_exact(e));
    }
    Ok(Endpoint::from_bounded(distribution::mean_theta(p, eps, tol)?))
}

// ---------------------------------------------------------------------------
// depth-k tree
// ---------------------------------------------------------------------------

/// All 2^depth intervals, built by sharing prefix sums along the tree; the
/// two constant m-tails beyond the leaf level are computed once.
fn build_level(p: &Partition, depth: u32, tol: f64) -> Result<Vec<LabeledInterval>> {
    if p.is_exact() {
        build_level_exact(p, depth)
            .ok_or_else(|| Error::NotApplicable("exact tree needs a rational generator".into()))
    } else {
        build_level_f64(p, depth, tol)
    }
}

fn build_level_exact(p: &Partition, depth: u32) -> Option<Vec<LabeledInterval>> {
    let one = SymReal::from_rational(BigRational::one());
    // m_term(level, bit) for level = 1..=depth
    let mut terms: Vec<[BigRational; 2]> = Vec::with_capacity(depth as usize);
    for n in 1..=depth as u64 {
        terms.push([m_term_exact(p, n, false)?, m_term_exact(p, n, true)?]);
    }
    let tail0 = m_tail_exact(p, &SignSpec::all_zero(), depth as u64 + 1)?;
    let tail1 = m_tail_exact(p, &SignSpec::all_one(), depth as u64 + 1)?;
    let hi_base = one.sub(&tail0); // minus the prefix sum at each leaf
    let lo_base = one.sub(&tail1);

    // parallel over the top split, sequential DFS below it
    let split = depth.min(6);
    let chunks = exec::map_indexed(1usize << split, |head| {
        let mut out = Vec::with_capacity(1 << (depth - split));
        let mut prefix = BigRational::zero();
        let head_bits: Vec<bool> = (0..split).map(|i| (head >> (split - 1 - i)) & 1 == 1).collect();
        for (lvl, &b) in head_bits.iter().enumerate() {
            prefix += &terms[lvl][b as usize];
        }
        let mut word = head_bits;
        descend(&terms, depth, &lo_base, &hi_base, &mut word, prefix, &mut out);
        out
    });
    Some(chunks.into_iter().flatten().collect())
}

fn descend(
    terms: &[[BigRational; 2]],
    depth: u32,
    lo_base: &SymReal,
    hi_base: &SymReal,
    word: &mut Vec<bool>,
    prefix: BigRational,
    out: &mut Vec<LabeledInterval>,
) {
    if word.len() == depth as usize {
        let p = SymReal::from_rational(prefix);
        out.push(LabeledInterval {
            word: Word(word.clone()),
            lo: Endpoint::from_exact(lo_base.sub(&p)),
            hi: Endpoint::from_exact(hi_base.sub(&p)),
        });
        return;
    }
    let lvl = word.len();
    for b in [false, true] {
        word.push(b);
        descend(terms, depth, lo_base, hi_base, word, &prefix + &terms[lvl][b as usize], out);
        word.pop();
    }
}

fn build_level_f64(p: &Partition, depth: u32, tol: f64) -> Result<Vec<LabeledInterval>> {
    let tail0 = m_tail_bounded(p, &SignSpec::all_zero(), depth as u64 + 1, tol)?;
    let tail1 = m_tail_bounded(p, &SignSpec::all_one(), depth as u64 + 1, tol)?;
    let terms: Vec<[f64; 2]> = (1..=depth as u64)
        .map(|n| [distribution::m_term(p, n, false), distribution::m_term(p, n, true)])
        .collect();
    let out = exec::map_indexed(1usize << depth, |code| {
        let bits: Vec<bool> = (0..depth).map(|i| (code >> (depth - 1 - i)) & 1 == 1).collect();
        let prefix: f64 = bits.iter().enumerate().map(|(l, &b)| terms[l][b as usize]).sum();
        LabeledInterval {
            word: Word(bits),
            lo: Endpoint::from_bounded(Bounded::new(1.0 - prefix - tail1.value, tail1.radius)),
            hi: Endpoint::from_bounded(Bounded::new(1.0 - prefix - tail0.value, tail0.radius)),
        }
    });
    Ok(out)
}

/// Merged union of a level: sorted by left endpoint, runs merged only under
/// certified overlap (touching closed intervals merge), split only under a
/// certified gap; undecidable adjacencies are reported, not resolved.
fn merge_level(intervals: &[LabeledInterval]) -> (Vec<MergedInterval>, Vec<(Word, Word)>) {
    let mut order: Vec<&LabeledInterval> = intervals.iter().collect();
    order.sort_by(|a, b| {
        a.lo.value
            .value
            .partial_cmp(&b.lo.value.value)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.lo.cmp_certified(&b.lo).unwrap_or(Ordering::Equal))
    });
    let mut merged: Vec<MergedInterval> = Vec::new();
    let mut ambiguous = Vec::new();
    let mut last_word: Option<&Word> = None;
    for iv in order {
        if let Some(cur) = merged.last_mut() {
            match iv.lo.cmp_certified(&cur.hi) {
                Some(Ordering::Less) | Some(Ordering::Equal) => {
                    if matches!(iv.hi.cmp_certified(&cur.hi), Some(Ordering::Greater)) {
                        cur.hi = iv.hi.clone();
                    }
                    cur.members += 1;
                    last_word = Some(&iv.word);
                    continue;
                }
                Some(Ordering::Greater) => {}
                None => {
                    ambiguous.push((last_word.expect("run has a member").clone(), iv.word.clone()));
                }
            }
        }
        merged.push(MergedInterval { lo: iv.lo.clone(), hi: iv.hi.clone(), members: 1 });
        last_word = Some(&iv.word);
    }
    (merged, ambiguous)
}

// ---------------------------------------------------------------------------
// classification
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// 𝓜 is exactly a finite union of closed intervals (count after merging).
    FiniteUnion {
        count: u64,
    },
    Cantor,
    HomogeneousCantor,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::FiniteUnion { count } => write!(f, "finite-union({count})"),
            Verdict::Cantor => write!(f, "cantor"),
            Verdict::HomogeneousCantor => write!(f, "homogeneous-cantor"),
            Verdict::Undetermined => write!(f, "undetermined"),
        }
    }
}

/// What is certified about the sign of G(n) for all large n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailCertificate {
    /// G(n) ≤ 0 for every n ≥ from (overlaps from that level on).
    NonpositiveFrom { from: u64, reason: String },
    /// G(n) > 0 for every n ≥ from (gaps from that level on).
    PositiveFrom { from: u64, reason: String },
    /// The sign pattern repeats periodically with both signs present.
    MixedPeriodic { period: u64, reason: String },
    /// Nothing certified.
    Unknown,
}

/// Outcome of one of the sufficient conditions, kept as supporting evidence.
#[derive(Clone, Debug)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub holds: Option<bool>,
    pub certified: bool,
    pub detail: String,
}

/// Whether I(n−1)/I(n) stays in (1, (1+√5)/2) over the probed range; this
/// supports (without proving) the uncountable-fibres property for interior
/// points in the overlap regime.
#[derive(Clone, Debug)]
pub struct GoldenRatioCheck {
    /// Smallest m with the ratio certified inside (1, φ) for every n in [m, checked_to].
    pub holds_from: Option<u64>,
    pub checked_to: u64,
}

#[derive(Clone, Debug)]
pub struct Evidence {
    pub gap_values: Vec<GapValue>,
    pub tail: TailCertificate,
    pub conditions: Vec<ConditionCheck>,
    pub golden_ratio: GoldenRatioCheck,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Depth-k approximation of 𝓜 with merged rendering and structure verdict.
#[derive(Clone, Debug)]
pub struct MsetApprox {
    pub depth: u32,
    pub intervals: Vec<LabeledInterval>,
    pub merged: Vec<MergedInterval>,
    /// Adjacent pairs whose gap/overlap could not be certified at this tol.
    pub ambiguous: Vec<(Word, Word)>,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

pub fn mset_approx(p: &Partition, depth: u32, tol: f64) -> Result<MsetApprox> {
    if depth > 20 {
        return Err(Error::Domain(format!("depth {depth} exceeds the 2^20-interval cap")));
    }
    let intervals = build_level(p, depth, tol)?;
    let (merged, ambiguous) = merge_level(&intervals);
    let cls = classify(p, depth.max(4) as u64, tol)?;
    Ok(MsetApprox {
        depth,
        intervals,
        merged,
        ambiguous,
        verdict: cls.verdict,
        evidence: cls.evidence,
    })
}

fn merged_count(p: &Partition, depth: u32, tol: f64) -> Result<u64> {
    let intervals = build_level(p, depth, tol)?;
    let (merged, ambiguous) = merge_level(&intervals);
    if !ambiguous.is_empty() {
        return Err(Error::TolUnreachable {
            tol,
            detail: format!("{} undecidable adjacencies at depth {depth}", ambiguous.len()),
        });
    }
    Ok(merged.len() as u64)
}

/// Exact sign of G(n), for rational generators.
fn exact_sign(p: &Partition, n: u64) -> Option<SignClass> {
    gap_exact(p, n).map(|e| e.sign().map(SignClass::from_ordering).unwrap_or(SignClass::Undecided))
}

/// Smallest level from which the given certified tail sign extends backwards
/// through the finite exact signs.
fn extend_back(p: &Partition, mut from: u64, want_nonpositive: bool) -> u64 {
    while from > 0 {
        let s = exact_sign(p, from - 1).expect("exact generator");
        let keeps = if want_nonpositive { s.nonpositive() } else { s == SignClass::Positive };
        if keeps {
            from -= 1;
        } else {
            break;
        }
    }
    from
}

/// Certified structure verdict with the full evidence trail. Finite sign
/// evidence is never upgraded: without a certified tail statement the
/// verdict stays `Undetermined`.
pub fn classify(p: &Partition, probe_depth: u64, tol: f64) -> Result<Classification> {
    if probe_depth == 0 {
        return Err(Error::Domain("probe depth must be at least 1".into()));
    }
    let mut gap_values = Vec::with_capacity(probe_depth as usize + 1);
    for n in 0..=probe_depth {
        gap_values.push(gap(p, n, tol)?);
    }

    let tail = tail_certificate(p);
    let conditions = condition_checks(p, probe_depth);
    let golden_ratio = golden_ratio_check(p, probe_depth, tol)?;

    let verdict = match &tail {
        TailCertificate::NonpositiveFrom { from, .. } => {
            Verdict::FiniteUnion { count: merged_count(p, *from as u32, tol)? }
        }
        TailCertificate::PositiveFrom { from, .. } => {
            if *from == 0 {
                Verdict::HomogeneousCantor
            } else {
                Verdict::Cantor
            }
        }
        TailCertificate::MixedPeriodic { .. } | TailCertificate::Unknown => Verdict::Undetermined,
    };

    Ok(Classification {
        verdict,
        evidence: Evidence { gap_values, tail, conditions, golden_ratio },
    })
}

fn tail_certificate(p: &Partition) -> TailCertificate {
    if let (Some(gt), true) = (p.geo_tail(), p.is_exact()) {
        // G(n + period) = ratio · G(n) once every index involved scales, so the
        // signs over one stabilised period decide the whole tail exactly.
        let n0 = gt.start.saturating_sub(1);
        let signs: Vec<SignClass> =
            (n0..n0 + gt.period).map(|n| exact_sign(p, n).expect("rational generator")).collect();
        if signs.iter().all(|s| s.nonpositive()) {
            let from = extend_back(p, n0, true);
            return TailCertificate::NonpositiveFrom {
                from,
                reason: format!(
                    "periodic scaling: G(n+{}) = {}·G(n) for n ≥ {n0}, one period nonpositive",
                    gt.period, gt.ratio
                ),
            };
        }
        if signs.iter().all(|s| *s == SignClass::Positive) {
            let from = extend_back(p, n0, false);
            return TailCertificate::PositiveFrom {
                from,
                reason: format!(
                    "periodic scaling: G(n+{}) = {}·G(n) for n ≥ {n0}, one period positive",
                    gt.period, gt.ratio
                ),
            };
        }
        return TailCertificate::MixedPeriodic {
            period: gt.period,
            reason: format!("one stabilised period carries signs {signs:?}"),
        };
    }

    if matches!(p.generator(), Generator::Luroth) {
        // G(n) = Q(n)/(2(n+1)²(n+2)²(n+3)²(n+4)²) − Σ_{k≥n+4} g(k) with
        // Q(n) = −n⁴−2n³+27n²+116n+124 < 0 for n ≥ 7 (37n² ≥ 116n+124 and
        // n⁴ ≥ 64n² from n ≥ 8; n = 7 checked exactly below), so G(n) < 0
        // from 7 on; the exact signs for n = 3..7 extend this down to 3.
        for n in 3..=7u64 {
            let s = exact_sign(p, n).expect("luroth is exact");
            assert_eq!(s, SignClass::Negative, "harmonic G({n}) sign");
        }
        return TailCertificate::NonpositiveFrom {
            from: extend_back(p, 3, true),
            reason: "quartic dominance certifies G(n) < 0 for n ≥ 7; exact signs cover 3..7".into(),
        };
    }

    TailCertificate::Unknown
}

fn condition_checks(p: &Partition, probe_depth: u64) -> Vec<ConditionCheck> {
    let mut out = Vec::new();
    let sqrt2m1 = |r: &BigRational| {
        // ρ ≤ √2 − 1 ⟺ (ρ+1)² ≤ 2
        let rp1 = r + BigRational::one();
        &rp1 * &rp1 <= big_rat(2, 1)
    };

    // gap condition: ratio tail entirely at or below √2 − 1
    match p.rho_enclosure_exact(0) {
        Some((_, Some(hi))) => {
            let holds = sqrt2m1(&hi);
            out.push(ConditionCheck {
                name: "rho-tail-below-sqrt2-minus-1",
                holds: Some(holds),
                certified: true,
                detail: format!("sup ρ_n = {hi} vs √2−1"),
            });
        }
        Some((lo, None)) => out.push(ConditionCheck {
            name: "rho-tail-below-sqrt2-minus-1",
            holds: Some(false),
            certified: true,
            detail: format!("ρ_n increases from {lo} towards 1"),
        }),
        None => {
            let enc = p.rho_enclosure(0);
            out.push(ConditionCheck {
                name: "rho-tail-below-sqrt2-minus-1",
                holds: Some(enc.hi <= 0.414_213_562_373_094_9),
                certified: false,
                detail: format!("sampled sup ρ_n ≈ {:.6}", enc.hi),
            });
        }
    }

    // overlap condition: 1/2 < ρ tail and s ≤ 1 − 7ρ²/(8ρ³+4), evaluated at
    // the worst point of the enclosure (the bound is decreasing in ρ)
    if let Some((lo, Some(hi))) = p.rho_enclosure_exact(0) {
        let half = big_rat(1, 2);
        let in_range = lo > half && hi < BigRational::one();
        let seven = big_rat(7, 1);
        let bound = BigRational::one()
            - &seven * &hi * &hi / (big_rat(8, 1) * &hi * &hi * &hi + big_rat(4, 1));
        let holds = in_range && hi <= bound;
        out.push(ConditionCheck {
            name: "sup-rho-overlap-bound",
            holds: Some(holds),
            certified: true,
            detail: format!("needs ρ ∈ (1/2,1) and sup ρ ≤ 1 − 7ρ²/(8ρ³+4); sup ρ = {hi}"),
        });
    }

    // limit of ρ_n, when the generator pins it down
    if let Some(limit) = p.known_rho_limit() {
        let half = big_rat(1, 2);
        let detail = format!("lim ρ_n = {limit}");
        let regime = if limit < half {
            "cantor (limit below 1/2)"
        } else if limit == BigRational::one() {
            "no conclusion (limit 1)"
        } else if limit > half {
            "finite union (limit in (1/2,1))"
        } else {
            "boundary 1/2"
        };
        out.push(ConditionCheck {
            name: "rho-limit-regime",
            holds: Some(limit != BigRational::one()),
            certified: true,
            detail: format!("{detail}: {regime}"),
        });
    }

    // oscillation diagnostic L_k = ρ_k²(1−ρ_{k+1}³)/(ρ_{k+1}(1−ρ_k³))
    let horizon = probe_depth.max(8);
    let mut lmin = f64::INFINITY;
    let mut lmax = f64::NEG_INFINITY;
    for k in 1..=horizon {
        let (r0, r1) = (p.rho(k), p.rho(k + 1));
        let l = r0 * r0 * (1.0 - r1 * r1 * r1) / (r1 * (1.0 - r0 * r0 * r0));
        lmin = lmin.min(l);
        lmax = lmax.max(l);
    }
    out.push(ConditionCheck {
        name: "ratio-diagnostic",
        holds: None,
        certified: false,
        detail: format!("L_k over k ≤ {horizon}: min {lmin:.6}, max {lmax:.6}"),
    });

    out
}

fn golden_ratio_check(p: &Partition, probe_depth: u64, tol: f64) -> Result<GoldenRatioCheck> {
    // I(n−1)/I(n) ∈ (1, (1+√5)/2): with x/y > 1 exact from monotonicity and
    // x/y < φ ⟺ (2x − y)² < 5y² when 2x ≥ y (trivially true otherwise)
    let mut holds_from: Option<u64> = None;
    for n in (1..=probe_depth).rev() {
        let ok = if p.is_exact() {
            let x = interval_length_exact(p, n - 1).expect("rational generator");
            let y = interval_length_exact(p, n).expect("rational generator");
            let (x_lo, x_hi) = x.bounds();
            let (y_lo, y_hi) = y.bounds();
            let above_one = x_lo > y_hi; // I decreasing strictly
            let lhs = big_rat(2, 1) * &x_hi - &y_lo;
            let below_phi = lhs.is_negative() || &lhs * &lhs < big_rat(5, 1) * &y_lo * &y_lo;
            above_one && below_phi
        } else {
            let x = interval_length(p, n - 1, tol)?;
            let y = interval_length(p, n, tol)?;
            let above_one = x.lower() > y.upper();
            let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
            let below_phi = x.upper() < (phi - 1e-12) * y.lower();
            above_one && below_phi
        };
        if ok {
            holds_from = Some(n);
        } else {
            break;
        }
    }
    Ok(GoldenRatioCheck { holds_from, checked_to: probe_depth })
}

// ---------------------------------------------------------------------------
// dimensions
// ---------------------------------------------------------------------------

/// One row of the dimension sequence: the level-k approximant
/// k·log2 / (log I(0) − log I(k)) together with the running inf/sup as
/// liminf/limsup proxies. The approximant is the finite-k truncation of the
/// homogeneous-Cantor dimension formula (level-k pieces number 2^k and have
/// relative size I(k)/I(0)), and is exact at every k for geometric tails.
#[derive(Clone, Debug)]
pub struct DimensionPoint {
    pub k: u64,
    pub interval_len: f64,
    pub ratio: f64,
    /// Running inf of the ratio sequence (Hausdorff proxy).
    pub dim_h: f64,
    /// Running sup of the ratio sequence (packing proxy).
    pub dim_p: f64,
}

/// The dimension sequence for k = 1..=k_max. Refused unless the certified
/// verdict is Cantor or homogeneous Cantor (an interval union has trivial
/// dimension 1, and an undetermined structure certifies nothing).
pub fn dimensions(p: &Partition, k_max: u64, tol: f64) -> Result<Vec<DimensionPoint>> {
    if !(2..=10_000).contains(&k_max) {
        return Err(Error::Domain(format!("k_max must lie in [2, 10000], got {k_max}")));
    }
    let cls = classify(p, 8, tol)?;
    match cls.verdict {
        Verdict::Cantor | Verdict::HomogeneousCantor => {}
        v => {
            return Err(Error::NotApplicable(format!(
                "dimension sequence requires a certified Cantor structure, verdict is {v}"
            )))
        }
    }

    let ln_len = |k: u64| -> Result<f64> {
        if let Some(e) = interval_length_exact(p, k) {
            return Ok(rat_ln(&e.bounds().0));
        }
        let b = interval_length(p, k, tol)?;
        Ok(b.value.ln())
    };

    let ln_i0 = ln_len(0)?;
    let rows = exec::map_indexed(k_max as usize, |i| {
        let k = i as u64 + 1;
        let ln_ik = ln_len(k)?;
        let ratio = k as f64 * std::f64::consts::LN_2 / (ln_i0 - ln_ik);
        Ok::<_, Error>((k, ln_ik.exp(), ratio))
    });

    let mut out = Vec::with_capacity(k_max as usize);
    let mut run_min = f64::INFINITY;
    let mut run_max = f64::NEG_INFINITY;
    for row in rows {
        let (k, interval_len, ratio) = row?;
        run_min = run_min.min(ratio);
        run_max = run_max.max(ratio);
        out.push(DimensionPoint { k, interval_len, ratio, dim_h: run_min, dim_p: run_max });
    }
    Ok(out)
}
