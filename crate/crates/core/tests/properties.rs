//! Invariants of the library, checked on generated inputs.

mod common;

use std::collections::BTreeSet;

use common::{example, sample_pairs, set, spec, standard, subsets_with_zero, sweep_pairs};
use num_complex::Complex64;
use proptest::prelude::*;
use spectral_tiles::classification::{classify_small, match_n4, N4Match, N4Params};
use spectral_tiles::continuum::{indicator, ContinuumGroup, SampledFunction};
use spectral_tiles::local::{
    local_group, local_group_exact, local_translation_matrix, spectrum_from_matrix,
    verify_local_translation,
};
use spectral_tiles::numeric::{is_unitary, AnyMatrix, Mode, Rational, RootTable, DEFAULT_TOL};
use spectral_tiles::spectra::{
    find_spectrum, fourier_matrix, is_spectrum, search_spectra, IntSet, Spectrum,
};
use spectral_tiles::tiling::{
    complements_avoiding, period_check, theta_by_congruence, theta_by_powers, theta_set,
    tiling_complements, verify_tiling, TilingCertificate,
};

fn pair_strategy() -> impl Strategy<Value = (IntSet, Spectrum)> {
    prop::sample::select(sample_pairs())
}

fn small_set() -> impl Strategy<Value = IntSet> {
    prop::collection::btree_set(1i64..12, 0..4).prop_map(|s| {
        let mut v: Vec<i64> = s.into_iter().collect();
        v.push(0);
        IntSet::new(v).unwrap()
    })
}

fn small_spectrum(n: usize) -> impl Strategy<Value = Spectrum> {
    (
        1i64..=24,
        prop::collection::btree_set(1i64..24, n.saturating_sub(1)..=n.saturating_sub(1)),
    )
        .prop_filter_map("distinct residues", move |(r, ks)| {
            let mut v: Vec<i64> = ks.into_iter().collect();
            v.push(0);
            Spectrum::from_numerators(&v, r)
                .ok()
                .filter(|g| g.len() == n)
        })
}

// --- numeric core -------------------------------------------------------

#[test]
fn exact_and_float_unitarity_agree_on_generated_tables() {
    let mut tables: Vec<RootTable> = Vec::new();
    for a in subsets_with_zero(7, 4) {
        for r in [2i64, 3, 4, 6, 8] {
            let n = a.len() as i64;
            for shift in 0..r {
                let ks: Vec<i64> = (0..n)
                    .map(|j| (j * shift) % r + j * (r / n.max(1)).max(1))
                    .collect();
                if let Ok(g) = Spectrum::from_numerators(&ks, r) {
                    if g.len() == a.len() {
                        tables.push(fourier_matrix(&a, &g).unwrap());
                    }
                }
            }
        }
    }
    assert!(tables.len() > 100);
    let mut unitary = 0;
    for t in &tables {
        let exact = is_unitary(&AnyMatrix::Exact(t.clone()), Mode::Exact);
        let float = is_unitary(
            &AnyMatrix::Exact(t.clone()),
            Mode::Float { tol: DEFAULT_TOL },
        );
        assert_eq!(exact, float);
        unitary += usize::from(exact);
    }
    assert!(unitary > 10 && unitary < tables.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn powers_add((a, g) in pair_strategy(), j in 0u32..6, k in 0u32..6) {
        let b = local_translation_matrix(&a, &g).unwrap();
        let t = b.table().unwrap();
        let lhs = t.pow(j + k).unwrap();
        let rhs = t.pow(j).unwrap().mul(&t.pow(k).unwrap()).unwrap();
        prop_assert!(lhs.exact_eq(&rhs).unwrap());
        let f = fourier_matrix(&a, &g).unwrap();
        let lhs = f.pow(j + k).unwrap();
        let rhs = f.pow(j).unwrap().mul(&f.pow(k).unwrap()).unwrap();
        prop_assert!(lhs.exact_eq(&rhs).unwrap());
    }
}

// --- spectra ------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn spectrum_test_matches_fourier_unitarity(
        (a, g) in small_set().prop_flat_map(|a| {
            let n = a.len();
            (Just(a), small_spectrum(n))
        }),
    ) {
        let f = fourier_matrix(&a, &g).unwrap();
        prop_assert_eq!(is_spectrum(&a, &g, Mode::Exact), f.is_unitary_exact());
    }

    #[test]
    fn spectrality_is_translation_invariant(
        (a, g) in pair_strategy(),
        c in -50i64..50,
        p in -20i64..20,
        q in 1i64..30,
    ) {
        let shift = Rational::new(p, q);
        prop_assert!(is_spectrum(&a.translate(c), &g, Mode::Exact));
        prop_assert!(is_spectrum(&a, &g.shift(shift), Mode::Exact));
        prop_assert!(is_spectrum(&a, &g.shift(shift).canonical(), Mode::Exact));
    }

    #[test]
    fn non_spectra_stay_non_spectra_under_translation(
        a in small_set(),
        g in small_spectrum(3),
        c in -50i64..50,
    ) {
        if a.len() == 3 {
            let base = is_spectrum(&a, &g, Mode::Exact);
            prop_assert_eq!(base, is_spectrum(&a.translate(c), &g, Mode::Exact));
            prop_assert_eq!(base, is_spectrum(&a, &g.shift(Rational::new(c, 7)), Mode::Exact));
        }
    }

    #[test]
    fn rescaling_preserves_spectrality((a, g) in pair_strategy(), d in 1i64..12) {
        prop_assert!(is_spectrum(&a.dilate(d).unwrap(), &g.shrink(d).unwrap(), Mode::Exact));
    }

    #[test]
    fn search_results_are_spectra(a in small_set(), r in 1u64..=24) {
        let found = search_spectra(&a, r);
        let mut sorted = found.clone();
        sorted.sort_by_key(|g| g.elements().iter().map(|q| (q * Rational::from_integer(r as i64)).to_integer()).collect::<Vec<_>>());
        prop_assert_eq!(&found, &sorted);
        for g in &found {
            prop_assert!(g.contains_zero());
            prop_assert!(is_spectrum(&a, g, Mode::Exact));
        }
    }
}

#[test]
fn search_is_exhaustive_on_small_cases() {
    // Brute force over all subsets of {k/R} containing 0.
    for a in subsets_with_zero(5, 3) {
        for r in 1u64..=10 {
            let n = a.len();
            let mut expected = Vec::new();
            for mask in 0u32..(1 << (r - 1)) {
                if mask.count_ones() as usize + 1 != n {
                    continue;
                }
                let mut ks = vec![0i64];
                ks.extend((1..r as i64).filter(|k| mask & (1 << (k - 1)) != 0));
                let g = Spectrum::from_numerators(&ks, r as i64).unwrap();
                if is_spectrum(&a, &g, Mode::Exact) {
                    expected.push(g);
                }
            }
            let mut got = search_spectra(&a, r);
            let key = |g: &Spectrum| g.to_string();
            expected.sort_by_key(key);
            got.sort_by_key(key);
            assert_eq!(got, expected, "{a} r = {r}");
        }
    }
}

// --- local translations -------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_law_and_adjoint((a, g) in pair_strategy(), s in -5.0f64..5.0, t in -5.0f64..5.0) {
        let us = local_group(&a, &g, s).unwrap();
        let ut = local_group(&a, &g, t).unwrap();
        let ust = local_group(&a, &g, s + t).unwrap();
        prop_assert!(us.mul(&ut).unwrap().max_abs_diff(&ust) < 1e-9);
        prop_assert!(ut.adjoint().max_abs_diff(&local_group(&a, &g, -t).unwrap()) < 1e-9);
        prop_assert!(ut.is_unitary(1e-9));
    }

    #[test]
    fn exact_group_law((a, g) in pair_strategy(), p in -12i64..12, q in 1i64..5, p2 in -12i64..12) {
        let s = Rational::new(p, q);
        let t = Rational::new(p2, q);
        let us = local_group_exact(&a, &g, &s).unwrap();
        let ut = local_group_exact(&a, &g, &t).unwrap();
        let ust = local_group_exact(&a, &g, &(s + t)).unwrap();
        prop_assert!(us.mul(&ut).unwrap().exact_eq(&ust).unwrap());
        prop_assert!(ut.adjoint().exact_eq(&local_group_exact(&a, &g, &-t).unwrap()).unwrap());
    }
}

#[test]
fn round_trip_and_translation_on_the_desk_sweep() {
    let pairs = sweep_pairs(7, 4, 16);
    assert!(pairs.len() > 50);
    for (a, g) in &pairs {
        let b = local_translation_matrix(a, g).unwrap();
        assert!(verify_local_translation(&b).holds, "{a} {g}");
        let back = spectrum_from_matrix(&AnyMatrix::Exact(b.table().unwrap().clone()), a).unwrap();
        assert_eq!(&back, g);
    }
}

#[test]
fn spectral_existence_matches_matrix_existence() {
    for a in subsets_with_zero(7, 4) {
        let found = find_spectrum(&a, 16);
        if let Some((_, g)) = found {
            let b = local_translation_matrix(&a, &g).unwrap();
            assert!(verify_local_translation(&b).holds);
        }
    }
}

// --- tiling -------------------------------------------------------------

#[test]
fn theta_formula_matches_power_scan() {
    for (a, g) in sweep_pairs(7, 4, 16) {
        if g.len() < 2 {
            continue;
        }
        let th = theta_set(&a, &g).unwrap();
        let d = th.modulus;
        assert_eq!(
            theta_by_congruence(&a, d),
            theta_by_powers(&a, &g, d).unwrap()
        );
    }
}

#[test]
fn complements_are_exactly_the_tilings() {
    for (a, g) in sweep_pairs(7, 4, 16) {
        if g.len() < 2 {
            continue;
        }
        let th = theta_set(&a, &g).unwrap();
        let d = th.modulus;
        if d > 24 || !d.is_multiple_of(a.len() as u64) {
            continue;
        }
        let size = (d / a.len() as u64) as usize;
        let got: BTreeSet<Vec<i64>> = tiling_complements(&a, &g, false)
            .unwrap()
            .into_iter()
            .map(|t| t.elements().to_vec())
            .collect();
        let mut expected = BTreeSet::new();
        for mask in 0u32..(1 << (d - 1)) {
            if mask.count_ones() as usize + 1 != size {
                continue;
            }
            let mut t = vec![0i64];
            t.extend((1..d as i64).filter(|k| mask & (1 << (k - 1)) != 0));
            let cert = TilingCertificate {
                a: a.clone(),
                t: IntSet::new(t.clone()).unwrap(),
                d,
            };
            if verify_tiling(&cert) {
                expected.insert(t);
            }
        }
        assert_eq!(got, expected, "{a} {g}");
    }
}

#[test]
fn all_translates_are_translates_of_normalized_complements() {
    let (a, g) = example();
    let normalized = tiling_complements(&a, &g, false).unwrap();
    let all = tiling_complements(&a, &g, true).unwrap();
    for t in &all {
        let m = t.elements()[0];
        let back = IntSet::new(t.elements().iter().map(|x| x - m).collect()).unwrap();
        assert!(normalized.contains(&back));
    }
    let th = theta_set(&a, &g).unwrap();
    assert_eq!(all, complements_avoiding(&th.residues, 2, 8, false));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn period_is_monotone_in_divisibility((a, g) in pair_strategy(), d in 1u64..20, k in 1u64..4) {
        if period_check(&a, &g, d).unwrap() {
            prop_assert!(period_check(&a, &g, d * k).unwrap());
        }
    }
}

#[test]
fn cyclic_shift_gives_trivial_complement() {
    for n in 2..=8 {
        let (a, g) = standard(n);
        let b = local_translation_matrix(&a, &g).unwrap();
        let perm: Vec<usize> = (0..n as usize).map(|i| (i + 1) % n as usize).collect();
        assert!(b
            .table()
            .unwrap()
            .exact_eq(&RootTable::permutation(&perm))
            .unwrap());
        assert!(tiling_complements(&a, &g, false)
            .unwrap()
            .contains(&set(&[0])));
    }
}

// --- continuum ----------------------------------------------------------

fn grid_time(m: usize) -> impl Strategy<Value = f64> {
    (-40i64 * m as i64..40 * m as i64).prop_map(move |k| k as f64 / m as f64)
}

fn random_function(a: &IntSet, m: usize, seed: u64) -> SampledFunction {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..a.len())
        .map(|_| {
            (0..m)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    SampledFunction::new(a.clone(), m, values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn continuum_isometry_group_law_and_period(
        (a, g) in pair_strategy(),
        s in grid_time(8),
        t in grid_time(8),
        seed in any::<u64>(),
    ) {
        let group = ContinuumGroup::new(&a, &g).unwrap();
        let f = random_function(&a, 8, seed);
        let ut = group.translate(&f, t).unwrap();
        prop_assert!((ut.norm_sq() - f.norm_sq()).abs() <= 1e-9 * f.norm_sq());
        let ust = group.translate(&ut, s).unwrap();
        prop_assert!(ust.max_abs_diff(&group.translate(&f, s + t).unwrap()) < 1e-9);
        let d = g.denominator_lcm() as f64;
        prop_assert!(group.translate(&f, t + d).unwrap().max_abs_diff(&ut) < 1e-9);
    }

    #[test]
    fn exponentials_are_eigenfunctions(
        (a, g) in pair_strategy(),
        idx in 0usize..8,
        n in -3i64..3,
        t in grid_time(16),
    ) {
        let lambda = g.elements()[idx % g.len()] + Rational::from_integer(n);
        let lf = *lambda.numer() as f64 / *lambda.denom() as f64;
        let e = SampledFunction::from_fn(a.clone(), 16, |x| Complex64::from_polar(1.0, std::f64::consts::TAU * lf * x)).unwrap();
        let out = ContinuumGroup::new(&a, &g).unwrap().translate(&e, t).unwrap();
        let expected = e.scale(Complex64::from_polar(1.0, std::f64::consts::TAU * lf * t));
        prop_assert!(out.max_abs_diff(&expected) < 1e-9);
    }

    #[test]
    fn indicators_translate_exactly_inside_the_set(
        (a, g) in pair_strategy(),
        from in 0usize..8,
        to in 0usize..8,
        lo in 0i64..8,
        len in 0i64..8,
        offset in 0i64..8,
    ) {
        // E = a_i + [lo, hi)/8, t₀ = (a_j − a_i) + shift keeping E + t₀ in branch j.
        let m = 8usize;
        let xs = a.elements();
        let (ai, aj) = (xs[from % xs.len()], xs[to % xs.len()]);
        let hi = (lo + len).min(8);
        let shift = offset.min(8 - hi);
        let e = indicator(&a, m, ai, Rational::new(lo, 8), Rational::new(hi, 8)).unwrap();
        let target = indicator(&a, m, aj, Rational::new(lo + shift, 8), Rational::new(hi + shift, 8)).unwrap();
        let t0 = (aj - ai) as f64 + shift as f64 / 8.0;
        let out = ContinuumGroup::new(&a, &g).unwrap().translate(&e, -t0).unwrap();
        prop_assert_eq!(out, target);
    }
}

// --- classification -----------------------------------------------------

#[test]
fn classify_small_agrees_with_the_sweep() {
    for a in subsets_with_zero(12, 5) {
        let n = a.len();
        if ![2, 3, 5].contains(&n) {
            continue;
        }
        let v = classify_small(&a).unwrap();
        let bound = if v.spectral {
            (n as u64).pow(v.k + 1)
        } else {
            v.sweep_bound
        };
        assert_eq!(find_spectrum(&a, bound).is_some(), v.spectral, "{a}");
    }
}

fn odd() -> impl Strategy<Value = i64> {
    (-7i64..=7).prop_map(|k| 2 * k + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parametrized_instances_are_pairs(
        c_exp in 0u32..3, m_exp in 0u32..3, alpha in 1u32..4,
        c in (odd(), odd(), odd()), n in (odd(), odd(), odd()),
        d_choice in 0usize..4,
    ) {
        let divisors = |x: i64| (1..=x.abs()).filter(|k| x % k == 0).collect::<Vec<_>>();
        let cg = num_integer::gcd(num_integer::gcd(c.0, c.1), c.2);
        let ng = num_integer::gcd(num_integer::gcd(n.0, n.1), n.2);
        let target = num_integer::gcd(num_integer::gcd(c.0 * ng, c.2 * ng), num_integer::gcd(n.1 * cg, n.2 * cg));
        let ds = divisors(target);
        let d = ds[d_choice % ds.len()];
        let p = N4Params { c_exp, m_exp, alpha, c1: c.0, c2: c.1, c3: c.2, n1: n.0, n2: n.1, n3: n.2, d };
        prop_assume!(p.satisfies_constraints());
        let Ok((a, l, r)) = p.realize() else { return Ok(()); };
        prop_assert!(matches!(match_n4(&a, &l, r).unwrap(), N4Match::Match(_)));
        let g = Spectrum::raw(l.elements().iter().map(|&x| Rational::new(x, r)).collect());
        prop_assert!(g.is_ok());
        prop_assert!(is_spectrum(&a, &g.unwrap().canonical(), Mode::Exact));
    }

    #[test]
    fn match_verdict_agrees_with_direct_check(
        a in prop::collection::btree_set(1i64..20, 3..=3),
        l in prop::collection::btree_set(1i64..20, 3..=3),
        r in 1i64..=64,
    ) {
        let a = IntSet::new(std::iter::once(0).chain(a).collect()).unwrap();
        let l = IntSet::new(std::iter::once(0).chain(l).collect()).unwrap();
        let direct = spectral_tiles::classification::is_hadamard_pair(&a, &l, r);
        let matched = matches!(match_n4(&a, &l, r).unwrap(), N4Match::Match(_));
        prop_assert_eq!(matched, direct, "{} {} {}", a, l, r);
    }
}

#[test]
fn spec_helper_parses() {
    assert_eq!(spec("0,1/2").len(), 2);
}
