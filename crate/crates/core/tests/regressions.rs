//! Values measured once and pinned. Where an independent recomputation is
//! cheap it is checked as well, so a pin cannot drift along with the code.

use std::collections::BTreeMap;

use approx::assert_relative_eq;
use rand::Rng as _;
use sievelab_core::bounds::{large_sieve_bound, larger_sieve_bound, miss_count_bound, uniform_fibre_report, LargerSieveInput};
use sievelab_core::energy::{differenced_larger_sieve, intersecting_process, quadruple_threshold_check, StopReason};
use sievelab_core::fourier::{dense_subinterval, reciprocal_exponential_sum, sieve_weight, Bump};
use sievelab_core::numtheory::{isqrt, primes_up_to};
use sievelab_core::quadratic::{quasisquares, CensusMode};
use sievelab_core::residue::{
    greedy_progression_family, random_constrained_set, squares_family, squares_set, ResidueConstraintFamily,
    ResidueSet,
};
use sievelab_core::rng::rng_from_seed;

/// Odd prime factors of `q`, or `None` if `q` is even or not squarefree.
fn odd_squarefree_factors(mut q: u64) -> Option<Vec<u64>> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= q {
        if q.is_multiple_of(d) {
            q /= d;
            if q.is_multiple_of(d) || d == 2 {
                return None;
            }
            out.push(d);
        }
        d += 1;
    }
    if q > 1 {
        if q == 2 {
            return None;
        }
        out.push(q);
    }
    Some(out)
}

#[test]
fn squares_large_sieve_at_ten_thousand() {
    let table = primes_up_to(100).unwrap();
    let r = large_sieve_bound(&squares_family(&table, 100), 10_000, 100).unwrap();
    // Mod 2 the squares fill both classes, so only odd q contribute, each
    // prime with factor ((p-1)/2) / ((p+1)/2).
    let oracle: f64 = (1..=100u64)
        .filter_map(odd_squarefree_factors)
        .map(|ps| ps.iter().map(|&p| (p - 1) as f64 / (p + 1) as f64).product::<f64>())
        .sum();
    assert_relative_eq!(r.denominator, oracle, max_relative = 1e-12);
    assert_relative_eq!(r.bound.unwrap(), 20_000.0 / oracle, max_relative = 1e-12);
    assert_relative_eq!(r.bound.unwrap(), 652.5908321360884, max_relative = 1e-12);
    assert!(r.bound.unwrap() >= 100.0);
}

#[test]
fn larger_sieve_with_density_one_third() {
    let table = primes_up_to(100).unwrap();
    let densities: BTreeMap<u64, f64> = table.primes().iter().map(|&p| (p, 1.0 / 3.0)).collect();
    let r = larger_sieve_bound(&LargerSieveInput::new(densities, 100, 100, 1.0).unwrap(), None).unwrap();
    let mertens: f64 = table.primes().iter().map(|&p| (p as f64).ln() / p as f64).sum();
    let oracle = 3.0 * mertens - 100f64.ln();
    assert_relative_eq!(r.denominator, oracle, max_relative = 1e-12);
    assert_relative_eq!(r.bound.unwrap(), 18.171105690559077, max_relative = 1e-12);
}

#[test]
fn miss_one_class_everywhere() {
    let r = miss_count_bound(&|_| 1, 10_000).unwrap();
    let q = isqrt(20_000);
    assert_eq!(q, 141);
    let oracle: f64 = (1..=q)
        .filter_map(|n| {
            let odd = if n % 2 == 0 { n / 2 } else { n };
            if n % 4 == 0 {
                return None;
            }
            odd_squarefree_factors(odd).map(|ps| {
                let two = if n % 2 == 0 { 0.5 } else { 1.0 };
                two * ps.iter().map(|&p| 1.0 / p as f64).product::<f64>()
            })
        })
        .sum();
    assert_relative_eq!(r.denominator, oracle, max_relative = 1e-12);
    assert_relative_eq!(r.bound.unwrap(), 9835.392306670889, max_relative = 1e-12);
}

#[test]
fn squares_have_uniform_fibres() {
    let r = uniform_fibre_report(&squares_set(10_000), 0.5, 100).unwrap();
    assert_eq!(r.uniform.len(), 25);
    assert!(r.non_uniform.is_empty());
    assert_eq!(r.excluded_mass, 0.0);
    assert_eq!(r.kappa, Some(0.0));
}

#[test]
fn random_half_sets_mod_101_fall_short_of_the_threshold() {
    let expected = [68283u128, 68051, 68079, 68115];
    for (seed, &energy) in expected.iter().enumerate() {
        let mut rng = rng_from_seed(seed as u64);
        let mut v: Vec<u64> = (0..101).collect();
        for j in (1..101).rev() {
            v.swap(j, rng.gen_range(0..=j));
        }
        v.truncate(51);
        let q = quadruple_threshold_check(&ResidueSet::from_members(101, v), 0.05);
        assert_eq!(q.energy, energy, "seed {seed}");
        assert!(!q.passes);
        assert!(q.margin > 0.0 && q.margin < 0.005);
    }
}

#[test]
fn differenced_sieve_on_the_squares() {
    let table = primes_up_to(100).unwrap();
    let r = differenced_larger_sieve(&squares_set(10_000), &squares_family(&table, 100), 0.1).unwrap();
    assert_eq!(r.q, 63);
    assert_eq!(r.shift_count, 2203);
    let (h, w) = r.best_shift.unwrap();
    assert_eq!(h, 32);
    assert_relative_eq!(w, 1.0432514861021747, max_relative = 1e-12);
    // Overlaps of the squares with their shifts are close to p/4, below the
    // (1/2 - c) threshold, so a certificate exists; it is far above √X.
    let cert = r.certificate.unwrap();
    assert_relative_eq!(cert.implied_bound.unwrap(), 2853.75430815682, max_relative = 1e-9);
    assert!(!r.beats_sqrt);
}

#[test]
fn differenced_sieve_on_interval_families() {
    let x = 100_000;
    let primes = primes_up_to(isqrt(x)).unwrap().primes().to_vec();
    let expected = [(38780, 82.17966704745956), (6956, 124.54291627602694), (23786, 24.45654552930474)];
    for (seed, &(h, bound)) in expected.iter().enumerate() {
        let (family, a) = greedy_progression_family(x, &primes, |p| p.div_ceil(2), true, seed as u64).unwrap();
        let r = differenced_larger_sieve(&a, &family, 0.1).unwrap();
        let cert = r.certificate.unwrap();
        assert_eq!(cert.h, h, "seed {seed}");
        assert_relative_eq!(cert.implied_bound.unwrap(), bound, max_relative = 1e-9);
        assert!(r.beats_sqrt);
    }
}

#[test]
fn intersecting_process_trace() {
    let primes: Vec<u64> = primes_up_to(300).unwrap().primes().iter().copied().filter(|&p| p >= 3).collect();
    let (family, a) = greedy_progression_family(100_000, &primes, |p| p.div_ceil(2), true, 11).unwrap();
    let t = intersecting_process(&a, &family, 0.2, 0.1).unwrap();
    assert_eq!(a.len(), 4);
    assert_eq!(t.stop, StopReason::Threshold);
    assert_eq!(t.final_size, 1);
    let trace: Vec<(Option<i64>, usize)> = t.iterations.iter().map(|r| (r.h, r.size)).collect();
    assert_eq!(trace, [(Some(20541), 4), (None, 1)]);
    assert!(t.final_bound_valid);
}

#[test]
fn reciprocal_sum_at_ten_to_the_eighth() {
    let all = reciprocal_exponential_sum(1e8, 1000, false).unwrap();
    let primes = reciprocal_exponential_sum(1e8, 1000, true).unwrap();
    assert_relative_eq!(all.norm(), 70.50349005313164, max_relative = 1e-9);
    assert_relative_eq!(primes.norm(), 20.517024358310888, max_relative = 1e-9);
    // Below 0.1 Y, above 0.01 Y.
    assert!(all.norm() < 100.0 && all.norm() > 10.0);
}

#[test]
fn sieve_weight_constants() {
    let w = sieve_weight(10_000, Bump::default()).unwrap();
    assert_relative_eq!(w.audit.mass_ratio, 2.861472352186306, max_relative = 1e-9);
    assert_relative_eq!(w.audit.lambda_constant, 0.002908103619761448, max_relative = 1e-9);
    let w = sieve_weight(1_000, Bump::default()).unwrap();
    assert_relative_eq!(w.audit.mass_ratio, 2.3974445120333394, max_relative = 1e-9);
    assert_relative_eq!(w.audit.lambda_constant, 0.005695074951997019, max_relative = 1e-9);
}

#[test]
fn dense_window_of_a_random_set() {
    let a = random_constrained_set(&ResidueConstraintFamily::new(), 100_000, 1000, 7).unwrap();
    // Expected count about |A| L / X = 10.
    assert_eq!(dense_subinterval(&a, 1000).unwrap(), (19946, 20));
}

#[test]
fn fraction_census_hits() {
    let primes = primes_up_to(100).unwrap().window(50, 100).to_vec();
    let all = quasisquares(10_000, &primes, CensusMode::All).unwrap();
    let most = quasisquares(10_000, &primes, CensusMode::Fraction { theta: 0.95 }).unwrap();
    assert_eq!(all.hits, [1, 7674, 9806]);
    assert_eq!(most.hits, [1, 7674, 9806]);
}
