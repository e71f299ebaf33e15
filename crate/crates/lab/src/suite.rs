//! The acceptance suite: twelve criteria, each with a time limit, each
//! checked against an oracle computed independently of the code under test
//! where one exists. `sievelab verify` and the `acceptance` test target both
//! run it.

use std::fmt;
use std::time::Instant;

use num_complex_free::phase_sum;
use rand::Rng as _;
use sievelab_core::bounds::{large_sieve_bound, larger_sieve_bound, LargerSieveInput};
use sievelab_core::energy::{additive_energy_mod_set, lift_inequality_check, near_invariant_shifts, pollard_profile};
use sievelab_core::exec;
use sievelab_core::fourier::{build_majorant, detect_large_frequency, sieve_weight, Bump, DetectorMode};
use sievelab_core::numtheory::primes_up_to;
use sievelab_core::quadratic::{quasisquares, random_quadratic, CensusMode};
use sievelab_core::residue::{
    primorial_set, random_constrained_set, squares_family, squares_set, GrowthRule, IntegerSet,
    ResidueConstraintFamily, ResidueSet,
};
use sievelab_core::rng::SeedStream;

use crate::config::LabConfig;
use crate::extremal::{extremal_search, Method};
use crate::scenario::{appendix_check, run_config};

/// Root seed of every randomized criterion.
pub const SUITE_SEED: u64 = 0x5EED_2024;

/// Large sieve bound over `|A|` for the squares up to `10⁶` with `Q = 1000`.
pub const SQUARES_RATIO: f64 = 6.533856800293;
/// Squarefree `q <= 10⁴` that are squares modulo every prime in `[50, 100]`.
pub const CENSUS_HITS: &[u64] = &[1, 7674, 9806];
/// Largest `A ⊆ [24]` with at most `(p+1)/2` classes mod 3, 5 and 7.
pub const EXTREMAL_24_OPTIMUM: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_secs: f64,
    pub limit_secs: f64,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} ({:.2} s, limit {} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed_secs,
            self.limit_secs
        )
    }
}

type Check = Result<String, String>;

struct Criterion {
    id: u8,
    title: &'static str,
    limit_secs: f64,
    run: fn() -> Check,
}

const CRITERIA: [Criterion; 12] = [
    Criterion { id: 1, title: "energy lifting inequality", limit_secs: 60.0, run: lift_inequality },
    Criterion { id: 2, title: "Pollard audit", limit_secs: 30.0, run: pollard_audit },
    Criterion { id: 3, title: "interval energy closed form", limit_secs: 5.0, run: interval_energy },
    Criterion { id: 4, title: "majorant suite", limit_secs: 10.0, run: majorant_suite },
    Criterion { id: 5, title: "frequency detector guarantee", limit_secs: 60.0, run: detector_guarantee },
    Criterion { id: 6, title: "sieve validity", limit_secs: 120.0, run: sieve_validity },
    Criterion { id: 7, title: "rational quadratic reductions", limit_secs: 60.0, run: appendix_corpus },
    Criterion { id: 8, title: "primorial construction", limit_secs: 30.0, run: primorial_intervals },
    Criterion { id: 9, title: "quasisquare census", limit_secs: 60.0, run: census_audit },
    Criterion { id: 10, title: "sieve weight audit", limit_secs: 30.0, run: weight_audit },
    Criterion { id: 11, title: "extremal search", limit_secs: 60.0, run: extremal_probe },
    Criterion { id: 12, title: "determinism", limit_secs: 120.0, run: determinism },
];

pub fn criterion_ids() -> impl Iterator<Item = u8> {
    CRITERIA.iter().map(|c| c.id)
}

pub fn run_criterion(id: u8) -> Option<CriterionReport> {
    let c = CRITERIA.iter().find(|c| c.id == id)?;
    let start = Instant::now();
    let outcome = (c.run)();
    let elapsed_secs = start.elapsed().as_secs_f64();
    let (ok, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    let in_time = elapsed_secs <= c.limit_secs;
    if !in_time {
        detail.push_str("; time limit exceeded");
    }
    Some(CriterionReport {
        id: c.id,
        title: c.title,
        passed: ok && in_time,
        detail,
        elapsed_secs,
        limit_secs: c.limit_secs,
    })
}

pub fn run_all() -> Vec<CriterionReport> {
    criterion_ids().filter_map(run_criterion).collect()
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn lift_inequality() -> Check {
    let seeds = SeedStream::new(SUITE_SEED).child("lift", 0);
    let empty = ResidueConstraintFamily::new();
    let idx: Vec<u64> = (0..100).collect();
    let reports = exec::map(&idx, |&i| {
        let size = seeds.rng("size", i).gen_range(50..=500);
        let a = random_constrained_set(&empty, 10_000, size, seeds.derive("set", i)).map_err(|e| e.to_string())?;
        lift_inequality_check(&a, 10_000).map_err(|e| e.to_string())
    });
    let mut failures = 0;
    let mut min_slack = i128::MAX;
    for r in reports {
        let r = r?;
        min_slack = min_slack.min(r.slack);
        if !r.holds {
            failures += 1;
        }
    }
    ensure(failures == 0, format!("100 sets, {failures} violations, min slack {min_slack}"))
}

const POLLARD_EPSILONS: [f64; 4] = [0.05, 0.1, 0.2, 0.25];

/// Pollard violations and near-invariant-shift violations for one set.
fn pollard_failures(s: &ResidueSet) -> (usize, usize) {
    let pollard = pollard_profile(s).map(|r| r.violations.len()).unwrap_or(1);
    let shifts = POLLARD_EPSILONS
        .iter()
        .map(|&e| near_invariant_shifts(s, e))
        .filter(|c| c.applies && !c.holds)
        .count();
    (pollard, shifts)
}

fn pollard_audit() -> Check {
    let mut sets = Vec::new();
    for p in [3u64, 5, 7] {
        for mask in 1u64..(1 << p) {
            sets.push(ResidueSet::from_members(p, (0..p).filter(|r| mask >> r & 1 == 1)));
        }
    }
    let exhaustive = sets.len();
    let seeds = SeedStream::new(SUITE_SEED).child("pollard", 0);
    for p in [31u64, 101] {
        let mut rng = seeds.rng("sets", p);
        let mut made = 0;
        while made < 10_000 {
            let density: f64 = rng.gen();
            let s = ResidueSet::from_members(p, (0..p).filter(|_| rng.gen_bool(density)));
            if !s.is_empty() {
                sets.push(s);
                made += 1;
            }
        }
    }
    let results = exec::map(&sets, pollard_failures);
    let pollard: usize = results.iter().map(|r| r.0).sum();
    let shifts: usize = results.iter().map(|r| r.1).sum();
    ensure(
        pollard == 0 && shifts == 0,
        format!(
            "{exhaustive} exhaustive + 20000 random sets; {pollard} Pollard violations, {shifts} near-invariant shift violations"
        ),
    )
}

fn interval_energy() -> Check {
    let mut checked = 0;
    for &p in primes_up_to(199).map_err(|e| e.to_string())?.primes().iter().filter(|&&p| p > 2) {
        let m = p.div_ceil(2);
        let s = ResidueSet::from_members(p, 0..m);
        let e = additive_energy_mod_set(&s);
        let closed = (m * m) as u128 + 2 * (1..=(p - 1) / 2).map(|h| ((m - h) * (m - h)) as u128).sum::<u128>();
        if e != closed {
            return Err(format!("p = {p}: E_p = {e}, closed form {closed}"));
        }
        if 12 * e < (p as u128).pow(3) {
            return Err(format!("p = {p}: E_p = {e} < p³/12"));
        }
        checked += 1;
    }
    Ok(format!("{checked} primes, all equal to the closed form and at least p³/12"))
}

/// Independent evaluation helpers that do not go through the core crate.
mod num_complex_free {
    use std::f64::consts::PI;

    /// `|sum_{a} e(k a / p)|` by direct summation.
    pub fn phase_sum(a: &[u64], p: u64, k: u64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for &x in a {
            let t = 2.0 * PI * ((k * (x % p)) % p) as f64 / p as f64;
            re += t.cos();
            im += t.sin();
        }
        re.hypot(im)
    }

    pub fn majorant_coefficient(eps: f64, k: usize) -> f64 {
        let s = (PI * k as f64 * eps / 2.0).sin() / (PI * k as f64);
        8.0 / (eps * eps) * s * s
    }

    pub fn majorant(coeffs: &[f64], theta: f64) -> f64 {
        1.0 + 2.0
            * coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c * (2.0 * PI * (i + 1) as f64 * theta).cos())
                .sum::<f64>()
    }
}

fn majorant_suite() -> Check {
    use num_complex_free::{majorant, majorant_coefficient};
    let mut parts = Vec::new();
    for eps in [0.5, 0.2, 0.1] {
        let f = build_majorant(eps).map_err(|e| e.to_string())?;
        let k_max = (2.0 / (eps * eps)).ceil() as usize;
        if f.k_max != k_max {
            return Err(format!("ε = {eps}: K = {} (expected {k_max})", f.k_max));
        }
        let oracle: Vec<f64> = (1..=k_max).map(|k| majorant_coefficient(eps, k)).collect();
        for (k, (&c, &o)) in f.coefficients.iter().zip(&oracle).enumerate() {
            let k = k + 1;
            if (c - o).abs() > 1e-12 * o.abs().max(1.0) {
                return Err(format!("ε = {eps}: c_{k} = {c}, oracle {o}"));
            }
            if c.abs() > 8f64.min(1.0 / (eps * eps * (k * k) as f64)) + 1e-12 {
                return Err(format!("ε = {eps}: |c_{k}| = {c} above min(8, 1/(ε²k²))"));
            }
        }
        let n = 100_000;
        let grid = (0..n as u64).collect::<Vec<_>>();
        let values = exec::map(&grid, |&i| {
            let theta = eps / 2.0 + (1.0 - eps) * i as f64 / (n - 1) as f64;
            majorant(&oracle, theta).max(f.eval(theta))
        });
        let grid_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if grid_max > 1e-9 {
            return Err(format!("ε = {eps}: max f on the grid is {grid_max:e}"));
        }
        let cert = f.certify_negativity(n);
        if !cert.holds {
            return Err(format!("ε = {eps}: interstitial certificate fails ({:e})", cert.certified_max));
        }
        parts.push(format!("ε = {eps}: grid max {grid_max:.3e}, certified {:.3e}", cert.certified_max));
    }
    let c1 = build_majorant(0.5).map_err(|e| e.to_string())?.coefficients[0];
    let closed = 16.0 / (std::f64::consts::PI * std::f64::consts::PI);
    ensure(
        (c1 - 1.6211).abs() <= 1e-4 && (c1 - closed).abs() <= 1e-12,
        format!("{}; c_1(1/2) = {c1:.6}", parts.join("; ")),
    )
}

fn detector_guarantee() -> Check {
    let primes: Vec<u64> = primes_up_to(499).map_err(|e| e.to_string())?.window(5, 499).to_vec();
    let seeds = SeedStream::new(SUITE_SEED).child("detector", 0);
    let mut instances = Vec::new();
    for mode in [DetectorMode::General, DetectorMode::HalfInterval] {
        let mut rng = seeds.rng(if mode == DetectorMode::General { "general" } else { "half" }, 0);
        let mut made = 0;
        while made < 1_000 {
            let p = primes[rng.gen_range(0..primes.len())];
            let eps = if rng.gen_bool(0.5) { 0.1 } else { 0.25 };
            let max_len = match mode {
                DetectorMode::General => ((1.0 - eps) * p as f64).floor() as u64,
                DetectorMode::HalfInterval => p / 2,
            };
            let len = rng.gen_range(1..=max_len);
            let start = rng.gen_range(0..p);
            let keep: f64 = rng.gen_range(0.05..1.0);
            let x = rng.gen_range(p..=20 * p);
            let a: Vec<u64> = (1..=x)
                .filter(|n| (n % p + p - start) % p < len && rng.gen_bool(keep))
                .collect();
            if !a.is_empty() {
                instances.push((IntegerSet::new(x, a).expect("sorted"), p, mode, eps));
                made += 1;
            }
        }
    }
    let failures: Vec<String> = exec::map(&instances, |(a, p, mode, eps)| {
        let r = match detect_large_frequency(a, *p, *eps, *mode) {
            Ok(r) => r,
            Err(e) => return Some(format!("p = {p}: {e}")),
        };
        let n = a.len() as f64;
        let (k_ok, guarantee) = match mode {
            DetectorMode::General => (r.k >= 1 && r.k <= (2.0 / (eps * eps)).ceil() as u64, eps * n / 32.0),
            DetectorMode::HalfInterval => (r.k == 1 || r.k == 2, n / 3.0),
        };
        let direct = phase_sum(a.elements(), *p, r.k);
        let agrees = (direct - r.magnitude).abs() <= 1e-9 * n.max(1.0);
        (!(k_ok && agrees && direct >= guarantee)).then(|| {
            format!("p = {p}, {mode:?}: k = {}, |sum| = {direct}, needed {guarantee}", r.k)
        })
    })
    .into_iter()
    .flatten()
    .collect();
    ensure(
        failures.is_empty(),
        match failures.first() {
            None => "1000 general + 1000 half-interval instances, all above their guarantee".into(),
            Some(f) => format!("{} failures, first: {f}", failures.len()),
        },
    )
}

/// Family on primes in `[3, 47]`: class sets of random size in `[lo(p), p-1]`.
fn seeded_family(seeds: &SeedStream, i: u64) -> ResidueConstraintFamily {
    let mut rng = seeds.rng("family", i);
    let small = i.is_multiple_of(2);
    let mut family = ResidueConstraintFamily::new();
    for &p in primes_up_to(47).expect("small").primes().iter().filter(|&&p| p >= 3) {
        let lo = if small { 1 } else { p.div_ceil(2) };
        let keep = rng.gen_range(lo..p) as usize;
        let mut members: Vec<u64> = (0..p).collect();
        for j in (1..members.len()).rev() {
            members.swap(j, rng.gen_range(0..=j));
        }
        members.truncate(keep);
        family.insert(ResidueSet::from_members(p, members)).expect("primes");
    }
    family
}

fn sieve_validity() -> Check {
    let seeds = SeedStream::new(SUITE_SEED).child("sieve", 0);
    let idx: Vec<u64> = (0..500).collect();
    let results = exec::map(&idx, |&i| -> Result<(bool, bool, Option<String>), String> {
        let family = seeded_family(&seeds, i);
        let mut rng = seeds.rng("params", i);
        let x = rng.gen_range(1_000..=10_000u64);
        let q = rng.gen_range(5..=100u64);
        let a: Vec<u64> = (1..=x).filter(|&n| family.admits(n)).collect();
        let size = a.len() as f64;
        let ls = large_sieve_bound(&family, x, q).map_err(|e| e.to_string())?;
        let gs = larger_sieve_bound(
            &LargerSieveInput::from_family(&family, x, q, 1.0).map_err(|e| e.to_string())?,
            None,
        )
        .map_err(|e| e.to_string())?;
        let mut bad = None;
        if let Some(b) = ls.bound {
            if size > b {
                bad = Some(format!("set {i}: |A| = {size} > large sieve {b}"));
            }
        }
        if let Some(b) = gs.bound {
            if size > b {
                bad = Some(format!("set {i}: |A| = {size} > larger sieve {b}"));
            }
        }
        Ok((ls.is_conclusive(), gs.is_conclusive(), bad))
    });
    let mut large = 0;
    let mut larger = 0;
    let mut failures = Vec::new();
    for r in results {
        let (l, g, bad) = r?;
        large += l as usize;
        larger += g as usize;
        failures.extend(bad);
    }
    let table = primes_up_to(1_000).map_err(|e| e.to_string())?;
    let squares = squares_set(1_000_000);
    let report = large_sieve_bound(&squares_family(&table, 1_000), 1_000_000, 1_000).map_err(|e| e.to_string())?;
    let ratio = report.bound.map_or(f64::NAN, |b| b / squares.len() as f64);
    let pinned = (ratio - SQUARES_RATIO).abs() <= 1e-9 * SQUARES_RATIO;
    ensure(
        failures.is_empty() && pinned,
        format!(
            "500 sets, {large} conclusive large sieve, {larger} conclusive larger sieve, {} violations; squares ratio {ratio:.12} (pinned {SQUARES_RATIO})",
            failures.len()
        ),
    )
}

fn appendix_corpus() -> Check {
    let mut rng = SeedStream::new(SUITE_SEED).rng("appendix", 0);
    let corpus: Vec<_> = (0..100).map(|i| (i, random_quadratic(&mut rng, 10))).collect();
    let rows = exec::map(&corpus, |(i, psi)| appendix_check(*i, psi, 100_000, 200));
    let mut values = 0;
    let mut prime_checks = 0;
    for row in rows {
        let row = row.map_err(|e| e.to_string())?;
        if !row.containment_failures.is_empty() || !row.reduction_failures.is_empty() {
            return Err(format!(
                "{}: containment failures {:?}, reduction failures {:?}",
                row.psi, row.containment_failures, row.reduction_failures
            ));
        }
        values += row.values_checked;
        prime_checks += row.primes_checked.len();
    }
    Ok(format!("100 quadratics, {values} values contained, {prime_checks} prime reductions equal"))
}

fn primorial_intervals() -> Check {
    let set = primorial_set(&GrowthRule::default(), 2, 100_000).map_err(|e| e.to_string())?;
    let table = primes_up_to(100_000).map_err(|e| e.to_string())?;
    if set.reductions.len() != table.len() {
        return Err(format!("{} reductions for {} primes", set.reductions.len(), table.len()));
    }
    for r in &set.reductions {
        let p = r.p;
        // Oracle: residues of each primorial from the product of primes mod p,
        // covering interval from the largest gap between occupied classes.
        let mut residues: Vec<u64> = set
            .cutoffs
            .iter()
            .map(|&cut| table.up_to(cut).iter().fold(1u64, |acc, &q| acc * (q % p) % p))
            .collect();
        residues.sort_unstable();
        residues.dedup();
        if residues != r.residues {
            return Err(format!("p = {p}: residues {:?}, oracle {residues:?}", r.residues));
        }
        let k = residues.len();
        let oracle_len = if k == 1 {
            1
        } else {
            let max_gap = (0..k).map(|i| (residues[(i + 1) % k] + p - residues[i] - 1) % p).max().unwrap_or(0);
            p - max_gap
        };
        if r.interval.len != oracle_len {
            return Err(format!("p = {p}: interval length {}, oracle {oracle_len}", r.interval.len));
        }
        if r.interval.len as f64 > 0.6 * p as f64 {
            return Err(format!("p = {p}: interval length {} > 0.6p", r.interval.len));
        }
    }
    Ok(format!(
        "cutoffs {:?}, {} primes, worst length/p {:.4}",
        set.cutoffs,
        set.reductions.len(),
        set.worst_interval_ratio()
    ))
}

/// Squarefree `q <= y` with `q^{(p-1)/2} ≡ 1 (mod p)` for every prime,
/// by trial division and Euler's criterion.
fn census_oracle(y: u64, primes: &[u64]) -> Vec<u64> {
    let pow_mod = |mut b: u64, mut e: u64, m: u64| {
        let mut r = 1u64;
        b %= m;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        r
    };
    (1..=y)
        .filter(|&q| (2..).take_while(|d| d * d <= q).all(|d| q % (d * d) != 0))
        .filter(|&q| primes.iter().all(|&p| pow_mod(q, (p - 1) / 2, p) == 1))
        .collect()
}

fn census_audit() -> Check {
    let primes = primes_up_to(100).map_err(|e| e.to_string())?.window(50, 100).to_vec();
    let c = quasisquares(10_000, &primes, CensusMode::All).map_err(|e| e.to_string())?;
    let oracle = census_oracle(10_000, &primes);
    ensure(
        c.bound_applies && (c.count as f64) <= c.bound_value && c.hits == oracle && c.hits == CENSUS_HITS,
        format!(
            "hits {:?} (oracle {oracle:?}, pinned {CENSUS_HITS:?}), count {} vs bound {:.6e}",
            c.hits, c.count, c.bound_value
        ),
    )
}

fn weight_audit() -> Check {
    let mut parts = Vec::new();
    for y in [1_000u64, 10_000] {
        let w = sieve_weight(y, Bump::default()).map_err(|e| e.to_string())?;
        let table = primes_up_to(2 * y).map_err(|e| e.to_string())?;
        let min_prime = table
            .window(y, 2 * y)
            .iter()
            .map(|&p| w.values[(p - y) as usize])
            .fold(f64::INFINITY, f64::min);
        let total: f64 = w.values.iter().sum();
        let pi_y = table.count_up_to(y) as f64;
        // Oracle: w(n) = (sum_{d|n} μ(d) ψ(log d / log Y))² by trial division.
        let bump = Bump::default();
        for n in (y..=2 * y).step_by(37) {
            let mut sum = 0.0;
            for d in (1..=n).filter(|d| n % d == 0) {
                let mu = mobius(d);
                if mu != 0 {
                    sum += mu as f64 * bump.eval((d as f64).ln() / (y as f64).ln());
                }
            }
            let expected = sum * sum;
            let got = w.values[(n - y) as usize];
            if (expected - got).abs() > 1e-9 * expected.abs().max(1.0) {
                return Err(format!("Y = {y}: w({n}) = {got}, oracle {expected}"));
            }
        }
        if min_prime < 1.0 - 1e-12 || total > 10.0 * pi_y || !w.audit.primes_ok || !w.audit.mass_ok {
            return Err(format!("Y = {y}: min w(p) = {min_prime}, sum w = {total} vs 10π(Y) = {}", 10.0 * pi_y));
        }
        parts.push(format!("Y = {y}: min w(p) = {min_prime:.6}, sum w / π(Y) = {:.4}", total / pi_y));
    }
    Ok(parts.join("; "))
}

fn mobius(mut n: u64) -> i8 {
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn extremal_probe() -> Check {
    let small = extremal_search(6, &[3], 1_000_000, Method::Exhaustive, SUITE_SEED).map_err(|e| e.to_string())?;
    if small.size != 4 || !small.certified_optimal {
        return Err(format!("X = 6, {{3}}: size {} (certified {})", small.size, small.certified_optimal));
    }
    let primes = [3, 5, 7];
    let bnb = extremal_search(24, &primes, 10_000_000, Method::BranchAndBound, SUITE_SEED).map_err(|e| e.to_string())?;
    let exhaustive = extremal_search(24, &primes, 100_000_000, Method::Exhaustive, SUITE_SEED).map_err(|e| e.to_string())?;
    let greedy = extremal_search(24, &primes, 1_000_000, Method::GreedyLocal, SUITE_SEED).map_err(|e| e.to_string())?;
    ensure(
        bnb.certified_optimal
            && exhaustive.certified_optimal
            && bnb.size == exhaustive.size
            && greedy.size == bnb.size
            && bnb.size == EXTREMAL_24_OPTIMUM,
        format!(
            "X = 6: 4; X = 24: branch-and-bound {} (certified {}), exhaustive {}, greedy {}, pinned {EXTREMAL_24_OPTIMUM}",
            bnb.size, bnb.certified_optimal, exhaustive.size, greedy.size
        ),
    )
}

/// A small config touching every scenario kind.
pub const DETERMINISM_CONFIG: &str = r#"
seed = 20240917

[[scenario]]
kind = "large-sieve-sharpness"
name = "sharpness"
x_grid = [10000, 100000]

[[scenario]]
kind = "theorem14-audit"
name = "audit"
x = 5000
count = 10
min_size = 50
max_size = 200

[[scenario]]
kind = "interval-iteration"
name = "iteration"
x = 200000
epsilon = 0.2

[[scenario]]
kind = "progression-intersection"
name = "intersection"
x = 20000

[[scenario]]
kind = "quasisquare-census"
name = "census"
y = 10000
prime_lo = 50
prime_hi = 100
theta = 0.95

[[scenario]]
kind = "stability-classify"
name = "stability"
x = 10000
psi = "x^2"
window_lo = 11
window_hi = 97
extra = [3, 7]

[[scenario]]
kind = "goldbach-obstruction"
name = "goldbach"
x = 1000
y = 50
a = { kind = "squares" }
b = { kind = "random", size = 40 }

[[scenario]]
kind = "appendix-verify"
name = "appendix"
count = 20
height = 4
range = 20000
"#;

fn determinism() -> Check {
    let cfg = LabConfig::parse(DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
    let first = run_config(&cfg);
    let second = run_config(&cfg);
    let was_parallel = exec::is_parallel();
    exec::set_parallel(false);
    let sequential = run_config(&cfg);
    exec::set_parallel(was_parallel);
    if first.exit_code() != 0 {
        return Err(format!("sample run exited with {}: {:?}", first.exit_code(), first.statuses));
    }
    let same = first.files == second.files;
    let same_seq = first.files == sequential.files;
    let bytes: usize = first.files.values().map(Vec::len).sum();
    ensure(
        same && same_seq,
        format!(
            "{} files, {bytes} bytes; rerun identical: {same}, sequential identical: {same_seq}",
            first.files.len()
        ),
    )
}
