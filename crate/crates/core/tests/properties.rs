//! Cross-module invariants: digit statistics, reconstruction, ordering of
//! expected averages, interval-tree geometry and distribution consistency.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use luroth::exact::big_rat;
use luroth::{
    cdf, empirical_cdf, expand, f_term, g_term, interval, interval_length, m_term, mean_theta,
    mset_approx, unit_grid, Partition, SignSpec, SignTail, Word,
};

fn partitions() -> Vec<Partition> {
    vec![
        Partition::luroth(),
        Partition::dyadic(),
        Partition::geometric(big_rat(2, 5)).unwrap(),
        Partition::two_periodic(big_rat(3, 5), big_rat(1, 2)).unwrap(),
    ]
}

fn part(idx: usize) -> Partition {
    partitions().swap_remove(idx % 4)
}

fn sign_spec(kind: usize, prefix: &[bool]) -> SignSpec {
    let tail = match kind % 3 {
        0 => SignTail::AllZero,
        1 => SignTail::AllOne,
        _ => SignTail::Periodic(vec![false, true]),
    };
    SignSpec::new(prefix.to_vec(), tail).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn digit_brackets_the_point(pi in 0usize..4, x in 1e-9f64..=1.0) {
        let p = part(pi);
        let d = p.digit_of(x).unwrap();
        prop_assert!(p.t(d + 1) < x && x <= p.t(d), "x={x} d={d}");
    }

    #[test]
    fn f_term_below_interval_length(pi in 0usize..4, n in 1u64..60, b in any::<bool>(), z in 1e-6f64..=1.0) {
        let p = part(pi);
        let f = f_term(&p, n, b, z).unwrap();
        prop_assert!(f >= 0.0 && f <= p.a(n) * (1.0 + 1e-14));
    }

    #[test]
    fn g_stays_within_half_interval(pi in 0usize..4, k in 1u64..500) {
        let p = part(pi);
        let g = g_term(&p, k);
        prop_assert!((0.0..=p.a(k) / 2.0 + 1e-18).contains(&g));
        let diff = m_term(&p, k, true) - m_term(&p, k, false);
        prop_assert!((diff - g).abs() < 1e-15);
    }

    #[test]
    fn cdf_monotone_in_z(pi in 0usize..4, kind in 0usize..3, z1 in 0.01f64..=1.0, z2 in 0.01f64..=1.0) {
        let p = part(pi);
        let eps = sign_spec(kind, &[]);
        let (lo, hi) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
        let f1 = cdf(&p, &eps, lo, 1e-10).unwrap();
        let f2 = cdf(&p, &eps, hi, 1e-10).unwrap();
        prop_assert!(f1.lower() <= f2.upper() + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f1.value));
    }

    #[test]
    fn mean_ordering_between_constant_tails(
        pi in 0usize..4,
        word_bits in proptest::collection::vec(any::<bool>(), 0..8),
        kind in 0usize..3,
        eps_prefix in proptest::collection::vec(any::<bool>(), 0..5),
    ) {
        // M_{ω·1̄} ≤ M_{ω·ε} ≤ M_{ω·0̄}
        let p = part(pi);
        let word = Word(word_bits);
        let mid = sign_spec(kind, &eps_prefix).prepend(&word);
        let lo = SignSpec::all_one().prepend(&word);
        let hi = SignSpec::all_zero().prepend(&word);
        let tol = 1e-9;
        let m_lo = mean_theta(&p, &lo, tol).unwrap();
        let m_mid = mean_theta(&p, &mid, tol).unwrap();
        let m_hi = mean_theta(&p, &hi, tol).unwrap();
        let slack = 1e-12; // f64 conversion rounding sits outside the radii
        prop_assert!(m_lo.lower() <= m_mid.upper() + slack);
        prop_assert!(m_mid.lower() <= m_hi.upper() + slack);
    }

    #[test]
    fn interval_width_depends_only_on_depth(
        pi in 0usize..4,
        word_bits in proptest::collection::vec(any::<bool>(), 1..7),
    ) {
        let p = part(pi);
        let word = Word(word_bits);
        let iv = interval(&p, &word, 1e-10).unwrap();
        let width = iv.hi.value.value - iv.lo.value.value;
        let expect = interval_length(&p, word.len() as u64, 1e-10).unwrap();
        let slack = iv.lo.value.radius + iv.hi.value.radius + expect.radius + 1e-12;
        prop_assert!((width - expect.value).abs() <= slack);
    }

    #[test]
    fn children_nest_inside_parent(pi in 0usize..4, word_bits in proptest::collection::vec(any::<bool>(), 0..6)) {
        let p = part(pi);
        let word = Word(word_bits);
        let parent = interval(&p, &word, 1e-10).unwrap();
        for bit in [false, true] {
            let child = interval(&p, &word.child(bit), 1e-10).unwrap();
            prop_assert!(child.lo.value.lower() >= parent.lo.value.lower() - 1e-12);
            prop_assert!(child.hi.value.upper() <= parent.hi.value.upper() + 1e-12);
        }
    }

    #[test]
    fn trace_reconstruction_matches(pi in 0usize..4, kind in 0usize..3, x in 0.001f64..0.999) {
        // rebuild the convergent from (d_i, s_i) with an independent loop
        let p = part(pi);
        let eps = sign_spec(kind, &[]);
        let tr = expand(&p, &eps, x, 25).unwrap();
        let mut prod = 1.0f64;
        let mut parity = 0u32;
        let mut series = 0.0f64;
        for s in &tr.steps {
            let Some(d) = s.digit.finite() else { break };
            let t_ref = if s.sign { p.t(d) } else { p.t(d + 1) };
            series += if parity % 2 == 1 { -t_ref * prod } else { t_ref * prod };
            prop_assert!((series - s.approx).abs() < 1e-11, "step {}", s.n);
            prod *= p.a(d);
            parity += s.sign as u32;
            prop_assert!((x - s.approx).abs() <= prod * (1.0 + 1e-9) + 1e-15);
        }
    }
}

#[test]
fn t_strictly_decreasing_and_geometric_rho_constant() {
    for p in partitions() {
        for n in [1u64, 2, 9, 100, 999, 10_000] {
            // exact values decrease strictly at every index; the f64
            // projection can only saturate once t_n leaves the subnormal range
            assert!(p.t_exact(n + 1).unwrap() < p.t_exact(n).unwrap(), "{} n={n}", p.describe());
            if p.t(n + 1) > 0.0 {
                assert!(p.t(n + 1) < p.t(n), "{} at n={n}", p.describe());
                assert!(p.rho(n) > 0.0 && p.rho(n) < 1.0);
            }
        }
        assert_eq!(p.t(1), 1.0, "{}", p.describe());
    }
    let rho = big_rat(2, 5);
    let p = Partition::geometric(rho.clone()).unwrap();
    for n in [1u64, 7, 40, 300] {
        assert_eq!(p.rho_exact(n).unwrap(), rho, "n={n}");
    }
}

#[test]
fn digit_law_statistical() {
    // digits are i.i.d. with λ(d_n = k) = a_k; check the n = 3 marginal
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in partitions() {
        let eps = SignSpec::periodic(&[true, false, true]).unwrap();
        let samples = 10_000usize;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..samples {
            let x: f64 = rng.gen_range(1e-12..1.0);
            let tr = expand(&p, &eps, x, 3).unwrap();
            if let Some(d) = tr.steps[2].digit.finite() {
                *counts.entry(d).or_insert(0usize) += 1;
            }
        }
        let tol = 4.0 / (samples as f64).sqrt();
        for k in 1u64..=6 {
            let freq = *counts.get(&k).unwrap_or(&0) as f64 / samples as f64;
            assert!(
                (freq - p.a(k)).abs() < tol,
                "{}: digit {k} freq {freq} vs a_k {}",
                p.describe(),
                p.a(k)
            );
        }
    }
}

#[test]
fn empirical_cdf_tracks_analytic_for_all_builtin_pairs() {
    let grid = unit_grid(33);
    let n = 30_000u64;
    let tol = 5.0 / (n as f64).sqrt();
    for p in partitions() {
        for eps in [SignSpec::all_zero(), SignSpec::all_one()] {
            let emp = empirical_cdf(&p, &eps, None, &grid, n, 123);
            for (i, &z) in grid.iter().enumerate() {
                let f = cdf(&p, &eps, z, 1e-10).unwrap();
                assert!(
                    (emp[i] - f.value).abs() <= tol + f.radius,
                    "{} {:?} z={z}: emp {} vs {}",
                    p.describe(),
                    eps,
                    emp[i],
                    f.value
                );
            }
        }
    }
}

#[test]
fn merged_count_law() {
    // all G > 0 certified: 2^k disjoint pieces at depth k
    let p = Partition::geometric(big_rat(2, 5)).unwrap();
    for depth in 1u32..=6 {
        let ap = mset_approx(&p, depth, 1e-12).unwrap();
        assert_eq!(ap.merged.len(), 1 << depth, "depth {depth}");
        assert!(ap.ambiguous.is_empty());
    }
    // all G ≤ 0 certified from level 0: one piece at every depth
    let ex1 = Partition::two_periodic(big_rat(3, 5), big_rat(1, 2)).unwrap();
    for depth in 1u32..=6 {
        let ap = mset_approx(&ex1, depth, 1e-12).unwrap();
        assert_eq!(ap.merged.len(), 1, "depth {depth}");
    }
}

#[test]
fn merged_union_nests_with_depth() {
    for p in partitions() {
        let shallow = mset_approx(&p, 3, 1e-10).unwrap();
        let deep = mset_approx(&p, 4, 1e-10).unwrap();
        // every depth-4 merged piece sits inside some depth-3 piece
        for piece in &deep.merged {
            let inside = shallow.merged.iter().any(|big| {
                big.lo.value.lower() - 1e-10 <= piece.lo.value.value
                    && piece.hi.value.value <= big.hi.value.upper() + 1e-10
            });
            assert!(inside, "{}: piece not nested", p.describe());
        }
    }
}

#[test]
fn theta_below_one_off_boundary() {
    // θ_n ≤ a_{d_n}/t_{d_n+1−s_n}, so θ < 1 needs ρ_n ≥ 1/2 throughout
    // (for ρ < 1/2 the mass above 1 is real: F(1) = Σ t_{n+1} < 1)
    let halves = [
        Partition::luroth(),
        Partition::dyadic(),
        Partition::two_periodic(big_rat(3, 5), big_rat(1, 2)).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in halves {
        for _ in 0..50 {
            let x: f64 = rng.gen_range(1e-6..1.0 - 1e-6);
            let tr = expand(&p, &SignSpec::all_zero(), x, 30).unwrap();
            for s in &tr.steps {
                if s.orbit < 1.0 {
                    assert!(s.theta < 1.0, "{} x={x} n={}", p.describe(), s.n);
                }
                assert!(s.theta >= 0.0);
            }
        }
    }
}

#[test]
fn theta_mass_above_one_matches_cdf_deficit() {
    // for Geometric(2/5) with increasing branches, F(1) = ρ/(1−ρ) = 2/3:
    // a third of the coefficients genuinely exceed 1
    let p = Partition::geometric(big_rat(2, 5)).unwrap();
    let f1 = cdf(&p, &SignSpec::all_zero(), 1.0, 1e-12).unwrap();
    assert!((f1.value - 2.0 / 3.0).abs() < 1e-14);
    let emp = empirical_cdf(&p, &SignSpec::all_zero(), None, &[1.0], 30_000, 9);
    assert!((emp[0] - 2.0 / 3.0).abs() < 0.03, "empirical {}", emp[0]);
}

#[test]
fn g_series_chain_identities() {
    // I(n) = g(n+1) + I(n+1) and G(n) = g(n+1) − I(n+1), on both paths
    for p in partitions() {
        for n in [0u64, 1, 4, 9] {
            let g1 = luroth::g_term(&p, n + 1);
            let i_n = interval_length(&p, n, 1e-12).unwrap();
            let i_next = interval_length(&p, n + 1, 1e-12).unwrap();
            let gap_n = luroth::gap(&p, n, 1e-12).unwrap();
            assert!((i_n.value - (g1 + i_next.value)).abs() <= 1e-14, "{} I({n})", p.describe());
            assert!(
                (gap_n.bounded.value - (g1 - i_next.value)).abs() <= 1e-14,
                "{} G({n})",
                p.describe()
            );
        }
    }
}

#[test]
fn exact_tails_agree_with_brute_force_on_misaligned_periods() {
    // table generator stabilises at index 3 while the sign tail has period 3
    // after a 5-bit prefix; the geometric decay makes a 400-term brute force
    // sum exact to &gt; 30 digits in f64 terms
    let p = Partition::from_table(
        vec![big_rat(1, 1), big_rat(13, 25), big_rat(27, 100)],
        big_rat(3, 10),
    )
    .unwrap();
    let eps = SignSpec::new(
        vec![true, true, false, true, false],
        SignTail::Periodic(vec![true, false, false]),
    )
    .unwrap();
    let m = mean_theta(&p, &eps, 1e-13).unwrap();
    assert_eq!(m.radius, 0.0, "exact path expected");
    let brute: f64 = (1..400u64).map(|n| m_term(&p, n, eps.bit(n))).sum();
    assert!((m.value - (1.0 - brute)).abs() < 1e-13, "exact {} vs brute {}", m.value, 1.0 - brute);

    // same comparison for F at a few z values
    for z in [0.11, 0.47, 0.93] {
        let f = cdf(&p, &eps, z, 1e-13).unwrap();
        let brute: f64 = (1..400u64).map(|n| f_term(&p, n, eps.bit(n), z).unwrap()).sum();
        assert!((f.value - brute).abs() < 1e-13, "z={z}: {} vs {brute}", f.value);
    }
}

#[test]
fn table_partition_with_late_positive_tail_is_cantor() {
    // ratios 0.52, ~0.519 then a 0.3 geometric tail: G(0), G(1) < 0 but
    // G(n) > 0 for n ≥ 2, so the set is Cantor (not homogeneous) and the
    // dimension sequence is well-defined
    let p = Partition::from_table(
        vec![big_rat(1, 1), big_rat(13, 25), big_rat(27, 100)],
        big_rat(3, 10),
    )
    .unwrap();
    let cls = luroth::classify(&p, 6, 1e-12).unwrap();
    assert_eq!(cls.verdict, luroth::Verdict::Cantor);
    let signs: Vec<_> = cls.evidence.gap_values.iter().map(|g| g.sign).collect();
    assert_eq!(signs[0], luroth::SignClass::Negative);
    assert_eq!(signs[1], luroth::SignClass::Negative);
    assert!(signs[2..].iter().all(|s| *s == luroth::SignClass::Positive));
    // pre-asymptotic levels overlap (gaps only from level 2), so the early
    // ratios exceed 1 and only the tail of the sequence is descriptive:
    // it must descend towards log2/log(1/0.3)
    let rows = luroth::dimensions(&p, 40, 1e-12).unwrap();
    let want = std::f64::consts::LN_2 / (10.0f64 / 3.0).ln();
    for w in rows.windows(2).skip(4) {
        assert!(w[1].ratio < w[0].ratio, "descending from k={}", w[0].k);
        assert!(w[1].ratio > want, "stays above the limit at k={}", w[1].k);
    }
    let last = rows.last().unwrap();
    assert!((last.ratio - want).abs() < 0.03, "ratio {} vs limit {want}", last.ratio);
    assert_eq!(last.dim_h, last.ratio, "running inf of a descending tail");
}

#[test]
fn gap_identity_on_the_harmonic_partition() {
    // M_{ω0·1̄} − M_{ω1·0̄} equals G(|ω|) through the exact π² path
    let p = Partition::luroth();
    for word_bits in [vec![], vec![true], vec![false, true], vec![true, true, false]] {
        let word = Word(word_bits);
        let left = interval(&p, &word.child(true), 1e-12).unwrap();
        let right = interval(&p, &word.child(false), 1e-12).unwrap();
        let diff = right.lo.exact().unwrap().sub(left.hi.exact().unwrap());
        let g = luroth::gap_exact(&p, word.len() as u64).unwrap();
        assert_eq!(diff, g, "word {word}");
    }
}
