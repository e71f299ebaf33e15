use proptest::prelude::*;
use rand::Rng as _;

use sievelab_core::bounds::{large_sieve_bound, larger_sieve_bound, LargerSieveInput};
use sievelab_core::energy::{
    additive_energy, additive_energy_mod, additive_energy_mod_set, intersecting_process,
    lift_inequality_check, pollard_profile, shift_set, threshold_select_capped,
};
use sievelab_core::fourier::{
    build_majorant, cosine_majorant, detect_large_frequency, majorant_coefficient, DetectorMode,
};
use sievelab_core::numtheory::{is_squarefree, jacobi, mertens_log_sum, multiplicative_partial_sum, primes_up_to};
use sievelab_core::quadratic::{
    image_mod_p, integer_values_in, membership_integer, quadratic_image_set, quasisquares,
    random_quadratic, tilde_contains, verify_appendix_lemma, CensusMode, RationalQuadratic,
};
use sievelab_core::residue::{
    greedy_progression_family, occupancy_ok, random_constrained_set, reduce_mod, squares_family,
    squares_set, IntegerSet, ResidueConstraintFamily, ResidueSet,
};
use sievelab_core::rng::rng_from_seed;

fn residue_set(p: u64) -> impl Strategy<Value = ResidueSet> {
    proptest::collection::vec(any::<bool>(), p as usize)
        .prop_map(move |bits| ResidueSet::from_members(p, (0..p).filter(|&r| bits[r as usize])))
}

fn integer_set(x: u64, max_len: usize) -> impl Strategy<Value = IntegerSet> {
    proptest::collection::btree_set(1..=x, 0..max_len)
        .prop_map(move |s| IntegerSet::new(x, s.into_iter().collect()).unwrap())
}

fn quartic_mod_energy(s: &ResidueSet) -> u128 {
    let p = s.modulus();
    let m = s.members();
    let mut count = 0u128;
    for &a in &m {
        for &b in &m {
            for &c in &m {
                for &d in &m {
                    if (a + b) % p == (c + d) % p {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Family on primes in `[3, 31]` keeping a random half-ish of each class set.
fn random_family(seed: u64) -> ResidueConstraintFamily {
    let mut rng = rng_from_seed(seed);
    let mut family = ResidueConstraintFamily::new();
    for &p in primes_up_to(31).unwrap().primes().iter().filter(|&&p| p >= 3) {
        let keep = rng.gen_range(p.div_ceil(2)..p);
        let mut members: Vec<u64> = (0..p).collect();
        for i in (1..members.len()).rev() {
            members.swap(i, rng.gen_range(0..=i));
        }
        family.insert(ResidueSet::from_members(p, members.into_iter().take(keep as usize))).unwrap();
    }
    family
}

#[test]
fn jacobi_detects_nonzero_squares() {
    for &p in primes_up_to(101).unwrap().primes().iter().filter(|&&p| p > 2) {
        let squares: Vec<bool> = {
            let mut v = vec![false; p as usize];
            for x in 1..p {
                v[(x * x % p) as usize] = true;
            }
            v
        };
        for a in 0..p {
            assert_eq!(jacobi(a as i64, p as i64).unwrap() == 1, squares[a as usize], "({a}|{p})");
        }
    }
}

proptest! {
    #[test]
    fn jacobi_is_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000, half in 0i64..5_000) {
        let n = 2 * half + 1;
        prop_assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
    }
}

#[test]
fn mertens_difference_stays_bounded() {
    let table = primes_up_to(1_000_000).unwrap();
    let mut q = 100u64;
    while q <= 1_000_000 {
        let diff = mertens_log_sum(&table, q, None).unwrap() - (q as f64).ln();
        assert!(diff.abs() <= 2.0, "Q = {q}: {diff}");
        q = q * 3 / 2;
    }
}

#[test]
fn constant_weight_partial_sums_grow_like_log_powers() {
    for k in [1u64, 2] {
        let w = move |p: u64| k.min(p - 1) as f64;
        let small = multiplicative_partial_sum(&w, 100).unwrap();
        let large = multiplicative_partial_sum(&w, 10_000).unwrap();
        let expected = (10_000f64.ln() / 100f64.ln()).powi(k as i32);
        let ratio = large / small;
        assert!(ratio <= 8.0 * expected && ratio >= expected / 8.0, "k = {k}: {ratio} vs {expected}");
    }
}

#[test]
fn reduce_mod_counts_distinct_residues_exhaustively() {
    for mask in 0u32..(1 << 12) {
        let elems: Vec<u64> = (1..=12).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let a = IntegerSet::new(12, elems.clone()).unwrap();
        for p in [2u64, 3, 5] {
            let (occupied, fibres) = reduce_mod(&a, p);
            let mut distinct: Vec<u64> = elems.iter().map(|x| x % p).collect();
            distinct.sort_unstable();
            distinct.dedup();
            assert_eq!(occupied.len(), distinct.len());
            assert_eq!(fibres.total(), elems.len() as u64);
        }
    }
}

#[test]
fn generators_obey_their_families() {
    let table = primes_up_to(100).unwrap();
    let squares = squares_set(10_000);
    assert!(occupancy_ok(&squares, &squares_family(&table, 100)).is_empty());
    for seed in 0..20 {
        let primes: Vec<u64> = table.window(3, 40).to_vec();
        let (family, survivors) =
            greedy_progression_family(2_000, &primes, |p| p.div_ceil(2) + 1, seed % 2 == 0, seed).unwrap();
        assert!(occupancy_ok(&survivors, &family).is_empty());
        let family = random_family(seed);
        if let Ok(a) = random_constrained_set(&family, 10_000, 20, seed) {
            assert!(occupancy_ok(&a, &family).is_empty());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sieve_bounds_are_valid(seed in any::<u64>(), x in 500u64..10_000, q in 5u64..60) {
        let family = random_family(seed);
        let admissible = (1..=x).filter(|&n| family.admits(n)).count();
        let a = random_constrained_set(&family, x, admissible.min(40), seed).unwrap();
        prop_assert!(occupancy_ok(&a, &family).is_empty());
        let ls = large_sieve_bound(&family, x, q).unwrap();
        if let Some(b) = ls.bound {
            prop_assert!(admissible as f64 <= b + 1e-9, "{} > {}", admissible, b);
        }
        let input = LargerSieveInput::from_family(&family, x, q, 1.0).unwrap();
        let gs = larger_sieve_bound(&input, None).unwrap();
        if let Some(b) = gs.bound {
            prop_assert!(admissible as f64 <= b + 1e-9, "{} > {}", admissible, b);
        }
    }

    #[test]
    fn enlarging_a_class_set_never_lowers_the_bound(seed in any::<u64>(), pick in 0usize..10, q in 5u64..60) {
        let family = random_family(seed);
        let (p, s) = family.iter().nth(pick % family.len()).unwrap();
        let mut bigger = s.clone();
        if let Some(r) = (0..p).find(|&r| !s.contains(r)) {
            bigger.insert(r);
        }
        let mut enlarged = family.clone();
        enlarged.insert(bigger).unwrap();
        let before = large_sieve_bound(&family, 10_000, q).unwrap();
        let after = large_sieve_bound(&enlarged, 10_000, q).unwrap();
        prop_assert!(after.denominator <= before.denominator + 1e-12);
        if let (Some(b0), Some(b1)) = (before.bound, after.bound) {
            prop_assert!(b1 >= b0 - 1e-9 * b0);
        }
    }
}

#[test]
fn mod_energy_matches_quadruple_count_exhaustively() {
    for p in [2u64, 3, 5, 7] {
        for mask in 0u64..(1 << p) {
            let s = ResidueSet::from_members(p, (0..p).filter(|r| mask >> r & 1 == 1));
            assert_eq!(additive_energy_mod_set(&s), quartic_mod_energy(&s));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mod_energy_matches_quadruple_count(s in (11u64..=23).prop_filter("prime", |p| [11, 13, 17, 19, 23].contains(p)).prop_flat_map(residue_set)) {
        prop_assert_eq!(additive_energy_mod_set(&s), quartic_mod_energy(&s));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mod_energy_is_at_least_the_average(a in integer_set(2_000, 200), p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 31, 97])) {
        let (_, fibres) = reduce_mod(&a, p);
        let n = a.len() as u128;
        prop_assert!(p as u128 * additive_energy_mod(&fibres) >= n.pow(4));
    }

    #[test]
    fn lift_inequality_holds(a in integer_set(3_000, 250)) {
        let report = lift_inequality_check(&a, 3_000).unwrap();
        prop_assert!(report.holds, "lhs {} > rhs {}", report.lift_lhs, report.lift_rhs);
    }

    #[test]
    fn shift_set_guarantee(a in integer_set(2_000, 150), k in 1.0f64..50.0) {
        prop_assume!(!a.is_empty());
        let s = shift_set(&a, k).unwrap();
        prop_assert_eq!(s.energy, additive_energy(&a));
        if s.guarantee_applies {
            prop_assert!(s.guarantee_holds);
            prop_assert!(s.shifts.len() as f64 >= a.len() as f64 / (2.0 * k));
        }
    }
}

proptest! {
    #[test]
    fn capped_selection_keeps_its_guaranteed_weight(
        items in prop::collection::vec((0.0f64..10.0, 0.0f64..=1.0), 1..40),
        p in prop::sample::select(vec![3u64, 5, 7, 11, 101]),
        extra in 0.01f64..0.5,
    ) {
        let cap = (p + 1) as f64 / p as f64;
        let weights: Vec<f64> = items.iter().map(|t| t.0).collect();
        let f: Vec<f64> = items.iter().map(|t| t.1 * cap).collect();
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 0.0);
        let mean = weights.iter().zip(&f).map(|(w, v)| w * v).sum::<f64>() / total;
        let eps = (1.0 - mean).max(1e-6) + 1e-9;
        prop_assume!(eps + extra < 1.0);
        let sel = threshold_select_capped(&weights, &f, cap, eps, eps + extra).unwrap();
        prop_assert!(sel.selected_weight >= sel.guaranteed_weight - 1e-9 * total);
    }
}

#[test]
fn pollard_has_no_violations() {
    for p in [2u64, 3, 5, 7] {
        for mask in 1u64..(1 << p) {
            let s = ResidueSet::from_members(p, (0..p).filter(|r| mask >> r & 1 == 1));
            assert!(pollard_profile(&s).unwrap().violations.is_empty(), "{s:?}");
        }
    }
    let mut rng = rng_from_seed(7);
    let primes = primes_up_to(101).unwrap();
    for _ in 0..2_000 {
        let p = primes.primes()[rng.gen_range(0..primes.len())];
        let s = ResidueSet::from_members(p, (0..p).filter(|_| rng.gen_bool(0.4)));
        if !s.is_empty() {
            assert!(pollard_profile(&s).unwrap().violations.is_empty());
        }
    }
}

#[test]
fn intersecting_process_shrinks_monotonically() {
    let primes: Vec<u64> = primes_up_to(100).unwrap().window(3, 100).to_vec();
    for seed in 0..10 {
        let (family, a) = greedy_progression_family(10_000, &primes, |p| p / 2 + 1, false, seed).unwrap();
        let trace = intersecting_process(&a, &family, 0.2, 0.1).unwrap();
        for w in trace.iterations.windows(2) {
            assert!(w[1].size <= w[0].size);
        }
        assert!(trace.final_bound_valid);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn majorant_coefficients_are_bounded(eps in 0.05f64..=0.5) {
        let f = build_majorant(eps).unwrap();
        for (k, c) in f.coefficient_table().into_iter().skip(1) {
            prop_assert!(c.abs() <= 8.0f64.min(1.0 / (eps * eps * (k * k) as f64)) + 1e-12);
            prop_assert_eq!(c, majorant_coefficient(eps, k as i64));
        }
    }
}

#[test]
fn cosine_majorant_identity() {
    let f = cosine_majorant();
    for i in 0..=10_000 {
        let t = 2.0 * std::f64::consts::PI * i as f64 / 10_000.0;
        assert!((f.eval(t) - 2.0 * t.cos() * (t.cos() - 1.0)).abs() <= 1e-12);
    }
}

#[test]
fn detector_meets_its_guarantee() {
    let primes: Vec<u64> = primes_up_to(499).unwrap().window(5, 499).to_vec();
    let mut rng = rng_from_seed(11);
    for i in 0..1_000 {
        let p = primes[rng.gen_range(0..primes.len())];
        let (mode, eps, max_len) = if i % 2 == 0 {
            let eps = if i % 4 == 0 { 0.1 } else { 0.25 };
            (DetectorMode::General, eps, ((1.0 - eps) * p as f64).floor() as u64)
        } else {
            (DetectorMode::HalfInterval, 0.25, p / 2)
        };
        let len = rng.gen_range(1..=max_len);
        let start = rng.gen_range(0..p);
        let a: Vec<u64> = (1..=5_000u64)
            .filter(|x| (x % p + p - start) % p < len && rng.gen_bool(0.3))
            .collect();
        if a.is_empty() {
            continue;
        }
        let a = IntegerSet::new(5_000, a).unwrap();
        let r = detect_large_frequency(&a, p, eps, mode).unwrap();
        assert!(r.guarantee_met, "p = {p}, mode {mode:?}: {} < {}", r.magnitude, r.guarantee);
        match mode {
            DetectorMode::General => assert!(r.k >= 1 && r.k <= (2.0 / (eps * eps)).ceil() as u64),
            DetectorMode::HalfInterval => assert!(r.k == 1 || r.k == 2),
        }
    }
}

fn quadratic_corpus() -> Vec<RationalQuadratic> {
    let mut rng = rng_from_seed(2024);
    (0..100).map(|_| random_quadratic(&mut rng, 10)).collect()
}

#[test]
fn membership_holds_at_integral_values() {
    for psi in quadratic_corpus() {
        for t in -1_000..=1_000 {
            let (num, den) = psi.eval_integer(t);
            if num % den == 0 {
                assert!(membership_integer(&psi, (num / den) as i64), "{psi} at {t}");
            }
        }
    }
}

/// Number of square roots `m >= 0` of `D` modulo `4|ad|` up to `M`, the
/// provable ceiling on the image size.
#[test]
fn image_size_is_bounded_by_admissible_roots() {
    for psi in quadratic_corpus() {
        let (a, _, _, d) = psi.coefficients();
        let m4 = 4 * (a as i128 * d as i128).abs();
        let disc = psi.discriminant();
        let roots = (0..m4).filter(|r| (r * r - disc).rem_euclid(m4) == 0).count() as f64;
        for x in [10u64, 1_000, 100_000] {
            let size = quadratic_image_set(&psi, x).unwrap().len() as f64;
            let top = ((m4 * x as i128 + disc.abs()) as f64).sqrt();
            assert!(size <= roots * (top / m4 as f64 + 1.0), "{psi}, X = {x}");
        }
    }
}

#[test]
fn stated_image_size_form_fails_on_triangular_numbers() {
    let tri: RationalQuadratic = "(x^2+x)/2".parse().unwrap();
    let size = quadratic_image_set(&tri, 30).unwrap().len() as f64;
    let form = 2.0 * (8.0 * 30.0 + 1.0f64).sqrt() / 8.0 + 2.0;
    assert_eq!(size, 7.0);
    assert!(size > form);
}

#[test]
fn tilde_containment_and_reduction_agreement() {
    for psi in quadratic_corpus() {
        for n in integer_values_in(&psi, -100_000, 100_000) {
            assert!(tilde_contains(&psi, n), "{psi}: {n}");
        }
        let (a, _, _, d) = psi.coefficients();
        let h = psi.height();
        for &p in primes_up_to(200).unwrap().primes().iter().filter(|&&p| p > 2 * h * h) {
            if (2 * a as i128 * d as i128) % p as i128 == 0 {
                continue;
            }
            let report = verify_appendix_lemma(&psi, p, None).unwrap();
            assert!(report.reductions_equal, "{psi} mod {p}");
            assert_eq!(report.integer_residues, image_mod_p(&psi, p));
        }
    }
}

#[test]
fn census_respects_its_bound() {
    for (lo, y) in [(11u64, 2_000u64), (23, 5_000), (50, 10_000)] {
        let primes = primes_up_to(2 * lo).unwrap().window(lo, 2 * lo).to_vec();
        let c = quasisquares(y, &primes, CensusMode::All).unwrap();
        assert!(c.bound_applies);
        assert!((c.count as f64) <= c.bound_value);
        for &q in &c.hits {
            assert!(is_squarefree(q).unwrap());
            assert!(primes.iter().all(|&p| jacobi(q as i64, p as i64).unwrap() == 1));
        }
    }
}

#[test]
fn fraction_census_pinned() {
    let primes = primes_up_to(100).unwrap().window(50, 100).to_vec();
    let c = quasisquares(10_000, &primes, CensusMode::Fraction { theta: 0.95 }).unwrap();
    assert_eq!(c.hits[0], 1);
    assert!(c.hits[1..].iter().all(|&q| q >= 2));
    assert_eq!(c.count, FRACTION_CENSUS_COUNT);
}

const FRACTION_CENSUS_COUNT: usize = 3;
