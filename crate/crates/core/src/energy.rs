//! Additive energy over the integers and modulo primes, shift sets, Pollard
//! profiles, and the two iterative sieve pipelines built on them.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{larger_sieve_bound, BoundReport, LargerSieveInput};
use crate::numtheory::{isqrt, primes_up_to};
use crate::residue::{occupancy_ok, reduce_mod, FibreCounts, IntegerSet, ResidueConstraintFamily, ResidueSet};
use crate::{exec, Error, Result};

/// Spans above this fall back to a sorted difference list.
const DENSE_SPAN_LIMIT: u64 = 1 << 24;

/// Nonzero `(h, |A ∩ (A + h)|)` for `h >= 0`, ascending in `h`.
pub fn difference_counts(a: &IntegerSet) -> Vec<(u64, u64)> {
    let el = a.elements();
    let (Some(&lo), Some(&hi)) = (el.first(), el.last()) else {
        return Vec::new();
    };
    let n = el.len();
    let span = hi - lo;
    let mut out = vec![(0, n as u64)];
    if span > DENSE_SPAN_LIMIT {
        let mut diffs: Vec<u64> = Vec::with_capacity(n * (n - 1) / 2);
        for (i, &x) in el.iter().enumerate() {
            diffs.extend(el[..i].iter().map(|&y| x - y));
        }
        diffs.sort_unstable();
        for chunk in diffs.chunk_by(|u, v| u == v) {
            out.push((chunk[0], chunk.len() as u64));
        }
        return out;
    }
    let chunks = exec_chunks(n);
    let partial = exec::map(&chunks, |&(start, end)| {
        let mut d = vec![0u64; span as usize + 1];
        for i in start..end {
            let x = el[i];
            for &y in &el[..i] {
                d[(x - y) as usize] += 1;
            }
        }
        d
    });
    let mut d = vec![0u64; span as usize + 1];
    for part in partial {
        for (acc, v) in d.iter_mut().zip(part) {
            *acc += v;
        }
    }
    out.extend(
        d.iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &v)| v > 0)
            .map(|(h, &v)| (h as u64, v)),
    );
    out
}

fn energy_from_counts(d: &[(u64, u64)]) -> u128 {
    d.iter()
        .map(|&(h, v)| {
            let sq = v as u128 * v as u128;
            if h == 0 {
                sq
            } else {
                2 * sq
            }
        })
        .sum()
}

/// Split `0..n` into a few contiguous ranges of roughly equal triangular work.
fn exec_chunks(n: usize) -> Vec<(usize, usize)> {
    let parts = if exec::is_parallel() { 16 } else { 1 };
    let total = n as f64 * n as f64 / 2.0;
    let mut bounds = vec![0usize];
    for k in 1..parts {
        let target = (total * k as f64 / parts as f64 * 2.0).sqrt() as usize;
        if target > *bounds.last().unwrap() && target < n {
            bounds.push(target);
        }
    }
    bounds.push(n);
    bounds.windows(2).map(|w| (w[0], w[1])).collect()
}

/// `E(A, A) = #{a₁ + a₂ = a₃ + a₄} = sum_h |A ∩ (A + h)|²`.
pub fn additive_energy(a: &IntegerSet) -> u128 {
    energy_from_counts(&difference_counts(a))
}

/// `E_p` of a weighted residue set: quadruples with `a₁ + a₂ ≡ a₃ + a₄ (mod p)`,
/// each counted with the product of its fibre multiplicities.
pub fn additive_energy_mod(fibres: &FibreCounts) -> u128 {
    let p = fibres.modulus as usize;
    let support: Vec<(usize, u128)> = fibres
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(a, &c)| (a, c as u128))
        .collect();
    let mut r = vec![0u128; p];
    for &(a, ca) in &support {
        for &(b, cb) in &support {
            r[(a + b) % p] += ca * cb;
        }
    }
    r.iter().map(|&v| v * v).sum()
}

/// `E_p(S, S)` for a plain residue set.
pub fn additive_energy_mod_set(s: &ResidueSet) -> u128 {
    additive_energy_mod(&indicator(s))
}

fn indicator(s: &ResidueSet) -> FibreCounts {
    let mut counts = vec![0u64; s.modulus() as usize];
    for r in s.members() {
        counts[r as usize] = 1;
    }
    FibreCounts {
        modulus: s.modulus(),
        counts,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrupleCheck {
    pub energy: u128,
    pub ratio: f64,
    /// `E_p / p³ - 1/16`.
    pub margin: f64,
    pub passes: bool,
}

/// Does `S` have at least `(1/16 + δ) p³` additive quadruples?
pub fn quadruple_threshold_check(s: &ResidueSet, delta: f64) -> QuadrupleCheck {
    let energy = additive_energy_mod_set(s);
    let p3 = (s.modulus() as f64).powi(3);
    let ratio = energy as f64 / p3;
    QuadrupleCheck {
        energy,
        ratio,
        margin: ratio - 1.0 / 16.0,
        passes: ratio >= 1.0 / 16.0 + delta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeEnergy {
    pub p: u64,
    pub energy: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub size: usize,
    pub energy: u128,
    pub per_prime: Vec<PrimeEnergy>,
    /// `sum_{p <= √X} (p E_p - |A|⁴)`.
    pub lift_lhs: i128,
    /// `3 X E`.
    pub lift_rhs: i128,
    pub slack: i128,
    pub holds: bool,
}

/// Both sides of the energy-lifting inequality
/// `sum_{p <= √X} p (E_p(A,A) - |A|⁴/p) <= 3X E(A,A)`, in exact integers.
pub fn lift_inequality_check(a: &IntegerSet, x: u64) -> Result<EnergyReport> {
    if a.elements().last().is_some_and(|&m| m > x) {
        return Err(Error::domain(format!("set is not contained in [1, {x}]")));
    }
    let energy = additive_energy(a);
    let root = isqrt(x);
    let primes = if root >= 2 {
        primes_up_to(root)?.primes().to_vec()
    } else {
        Vec::new()
    };
    let per_prime: Vec<PrimeEnergy> = exec::map(&primes, |&p| PrimeEnergy {
        p,
        energy: additive_energy_mod(&reduce_mod(a, p).1),
    });
    let n4 = (a.len() as i128).pow(4);
    let overflow = || Error::Overflow("lift inequality exceeds 128 bits".into());
    let mut lhs: i128 = 0;
    for e in &per_prime {
        let term = i128::try_from(e.energy)
            .ok()
            .and_then(|v| v.checked_mul(e.p as i128))
            .ok_or_else(overflow)?
            - n4;
        lhs = lhs.checked_add(term).ok_or_else(overflow)?;
    }
    let rhs = i128::try_from(energy)
        .ok()
        .and_then(|v| v.checked_mul(3 * x as i128))
        .ok_or_else(overflow)?;
    Ok(EnergyReport {
        size: a.len(),
        energy,
        per_prime,
        lift_lhs: lhs,
        lift_rhs: rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftSet {
    pub k: f64,
    pub threshold: f64,
    pub energy: u128,
    /// Ascending shifts `h` with `|A ∩ (A + h)| >= |A|/2K`.
    pub shifts: Vec<i64>,
    /// `|A ∩ (A + h)|` for each listed shift.
    pub intersections: Vec<u64>,
    /// `E >= |A|³/K`, so the size guarantee applies.
    pub guarantee_applies: bool,
    /// `|shifts| >= |A|/2K`.
    pub guarantee_holds: bool,
}

/// All `h ∈ [-X, X]` with `|A ∩ (A + h)| >= |A|/2K`.
pub fn shift_set(a: &IntegerSet, k: f64) -> Result<ShiftSet> {
    if !(k > 0.0) {
        return Err(Error::domain(format!("K = {k} must be positive")));
    }
    let d = difference_counts(a);
    shift_set_from_counts(a.len(), &d, k)
}

fn shift_set_from_counts(n: usize, d: &[(u64, u64)], k: f64) -> Result<ShiftSet> {
    let size = n as f64;
    let threshold = size / (2.0 * k);
    let energy = energy_from_counts(d);
    let kept: Vec<(u64, u64)> = d.iter().copied().filter(|&(_, v)| v as f64 >= threshold).collect();
    let mut shifts = Vec::with_capacity(2 * kept.len());
    let mut intersections = Vec::with_capacity(2 * kept.len());
    for &(h, v) in kept.iter().rev().filter(|&&(h, _)| h > 0) {
        shifts.push(-(h as i64));
        intersections.push(v);
    }
    for &(h, v) in &kept {
        shifts.push(h as i64);
        intersections.push(v);
    }
    let guarantee_applies = n > 0 && energy as f64 >= size.powi(3) / k;
    Ok(ShiftSet {
        k,
        threshold,
        energy,
        guarantee_holds: !guarantee_applies || shifts.len() as f64 >= threshold,
        guarantee_applies,
        shifts,
        intersections,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PollardProfile {
    pub p: u64,
    pub size: usize,
    /// `n[i - 1] = #{h : |S ∩ (S + h)| >= i}` for `1 <= i <= |S|`.
    pub n: Vec<u64>,
    /// Values of `r` where `N_1 + ... + N_r >= r(2|S| - r)` fails.
    pub violations: Vec<u64>,
}

/// `|S ∩ (S + h)|` for every `h ∈ Z/pZ`.
pub fn shift_overlaps(s: &ResidueSet) -> Vec<u64> {
    let p = s.modulus();
    let members = s.members();
    let mut overlap = vec![0u64; p as usize];
    for &a in &members {
        for &b in &members {
            overlap[((a + p - b) % p) as usize] += 1;
        }
    }
    overlap
}

/// The overlap profile `N_i` and an audit of Pollard's inequality for
/// `max(1, 2|S| - p) <= r <= |S|`.
pub fn pollard_profile(s: &ResidueSet) -> Result<PollardProfile> {
    if s.is_empty() {
        return Err(Error::domain("Pollard profile needs a nonempty set"));
    }
    let size = s.len();
    let overlap = shift_overlaps(s);
    let mut hist = vec![0u64; size + 1];
    for &o in &overlap {
        hist[o as usize] += 1;
    }
    let mut n = vec![0u64; size];
    let mut at_least = 0;
    for i in (1..=size).rev() {
        at_least += hist[i];
        n[i - 1] = at_least;
    }
    let p = s.modulus() as i64;
    let k = size as i64;
    let r_min = (2 * k - p).max(1);
    let mut violations = Vec::new();
    let mut prefix = 0i64;
    for r in 1..=k {
        prefix += n[(r - 1) as usize] as i64;
        if r >= r_min && prefix < r * (2 * k - r) {
            violations.push(r as u64);
        }
    }
    Ok(PollardProfile {
        p: s.modulus(),
        size,
        n,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NearInvariantCount {
    pub epsilon: f64,
    /// `#{h : |S ∩ (S + h)| >= (1 - ε)|S|}`.
    pub count: u64,
    pub bound: f64,
    /// `|S| < (1 - 2ε)p`, the regime where the bound is claimed.
    pub applies: bool,
    pub holds: bool,
}

/// Count the near-invariant shifts of `S` and compare with `4ε|S| + 1`.
pub fn near_invariant_shifts(s: &ResidueSet, epsilon: f64) -> NearInvariantCount {
    let size = s.len() as f64;
    let overlap = shift_overlaps(s);
    let count = overlap
        .iter()
        .filter(|&&o| o as f64 >= (1.0 - epsilon) * size)
        .count() as u64;
    let bound = 4.0 * epsilon * size + 1.0;
    let applies = !s.is_empty() && size < (1.0 - 2.0 * epsilon) * s.modulus() as f64;
    NearInvariantCount {
        epsilon,
        count,
        bound,
        applies,
        holds: !applies || count as f64 <= bound,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub selected: Vec<usize>,
    pub selected_weight: f64,
    pub total_weight: f64,
    /// `(ε' - ε) sum λ / (F - 1 + ε')`, which is `(1 - ε/ε') sum λ` when `F = 1`.
    pub guaranteed_weight: f64,
}

/// Indices with `f(x) >= 1 - ε'`, given that the `λ`-weighted mean of `f`
/// is at least `1 - ε`.
pub fn threshold_select(weights: &[f64], f: &[f64], eps: f64, eps_prime: f64) -> Result<Selection> {
    threshold_select_capped(weights, f, 1.0, eps, eps_prime)
}

/// [`threshold_select`] for values in `[0, F]` with `F >= 1`, as arises when
/// `f(p) = |S_p ∩ (S_p + h)| / (p/2)` and `|S_p| = (p+1)/2`, so `F = (p+1)/p`.
///
/// The unselected weight `U` satisfies `U (F - 1 + ε') <= (F - 1 + ε) Λ`,
/// so the selected weight is at least `(ε' - ε) Λ / (F - 1 + ε')`.
pub fn threshold_select_capped(
    weights: &[f64],
    f: &[f64],
    f_max: f64,
    eps: f64,
    eps_prime: f64,
) -> Result<Selection> {
    if weights.len() != f.len() {
        return Err(Error::domain("weights and values differ in length"));
    }
    if !(eps > 0.0 && eps <= eps_prime) {
        return Err(Error::domain(format!("need 0 < ε <= ε', got ε = {eps}, ε' = {eps_prime}")));
    }
    if !(f_max >= 1.0 && f_max.is_finite()) {
        return Err(Error::domain(format!("cap F = {f_max} must be finite and at least 1")));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return Err(Error::domain("weights must be nonnegative"));
    }
    if f.iter().any(|&v| !(0.0..=f_max).contains(&v)) {
        return Err(Error::domain(format!("values must lie in [0, {f_max}]")));
    }
    let total: f64 = weights.iter().sum();
    let mean: f64 = weights.iter().zip(f).map(|(w, v)| w * v).sum();
    let required = (1.0 - eps) * total;
    if mean < required - 1e-12 * total.max(1.0) {
        return Err(Error::Precondition(format!(
            "weighted sum {mean} is below (1 - ε) · {total} = {required}"
        )));
    }
    let selected: Vec<usize> = (0..f.len()).filter(|&i| f[i] >= 1.0 - eps_prime).collect();
    let selected_weight = selected.iter().map(|&i| weights[i]).sum();
    Ok(Selection {
        selected,
        selected_weight,
        total_weight: total,
        guaranteed_weight: (eps_prime - eps) / (f_max - 1.0 + eps_prime) * total,
    })
}

/// Per-prime sets on `p <= Q` with unconstrained primes filled in as `Z/pZ`.
fn sets_up_to(family: &ResidueConstraintFamily, q: u64) -> Result<Vec<ResidueSet>> {
    if q < 2 {
        return Ok(Vec::new());
    }
    Ok(primes_up_to(q)?
        .primes()
        .iter()
        .map(|&p| family.get(p).cloned().unwrap_or_else(|| ResidueSet::full(p)))
        .collect())
}

fn weight(p: u64) -> f64 {
    (p as f64).ln() / p as f64
}

/// `sum (log p / p) |S_p ∩ (S_p + h)| / p` over the given sets.
fn weighted_overlap(sets: &[ResidueSet], h: i64) -> f64 {
    sets.iter()
        .map(|s| {
            let p = s.modulus();
            weight(p) * s.shift_overlap(h) as f64 / p as f64
        })
        .sum()
}

/// `(value, |h|, negative)`: smaller is better; positive shifts win ties.
fn shift_order(a: &(i64, f64), b: &(i64, f64)) -> std::cmp::Ordering {
    a.1.total_cmp(&b.1)
        .then(a.0.unsigned_abs().cmp(&b.0.unsigned_abs()))
        .then((a.0 < 0).cmp(&(b.0 < 0)))
}

fn differenced_cutoff(x: u64, c: f64) -> u64 {
    ((x as f64).powf(0.5 - c / 2.0).floor() as u64).max(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub h: i64,
    pub weighted_sum: f64,
    pub intersection_size: usize,
    pub sieve: BoundReport,
    /// `2K` times the larger-sieve bound on `|A ∩ (A + h)|`.
    pub implied_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferencedReport {
    pub size: usize,
    pub x: u64,
    pub energy: u128,
    pub k: f64,
    pub q: u64,
    pub c: f64,
    pub shift_count: usize,
    /// `(1/2 - c) log Q`.
    pub trigger: f64,
    /// Best shift and its weighted overlap sum, certificate or not.
    pub best_shift: Option<(i64, f64)>,
    pub certificate: Option<Certificate>,
    /// The implied bound is below `√X`.
    pub beats_sqrt: bool,
}

/// Compute `E(A, A)`, set `K = |A|³/E`, extract the shift set, and look for a
/// shift `h` whose overlap sum falls below `(1/2 - c) log Q` with
/// `Q = X^{1/2 - c/2}`. When one exists, the larger sieve applied to
/// `A ∩ (A + h)` gives a bound on `|A|`.
pub fn differenced_larger_sieve(
    a: &IntegerSet,
    family: &ResidueConstraintFamily,
    c: f64,
) -> Result<DifferencedReport> {
    if !(c > 0.0 && c < 0.5) {
        return Err(Error::domain(format!("c = {c} must lie in (0, 1/2)")));
    }
    let x = a.bound();
    let q = differenced_cutoff(x, c);
    let trigger = (0.5 - c) * (q as f64).ln();
    let d = difference_counts(a);
    let n = a.len();
    let empty = DifferencedReport {
        size: n,
        x,
        energy: 0,
        k: 0.0,
        q,
        c,
        shift_count: 0,
        trigger,
        best_shift: None,
        certificate: None,
        beats_sqrt: false,
    };
    if n == 0 {
        return Ok(empty);
    }
    let energy = additive_energy(a);
    let k = (n as f64).powi(3) / energy as f64;
    let shifts = shift_set_from_counts(n, &d, k)?;
    let sets = sets_up_to(family, q)?;
    let sums = exec::map(&shifts.shifts, |&h| (h, weighted_overlap(&sets, h)));
    let best = sums.iter().copied().min_by(shift_order);
    let certificate = match best {
        Some((h, w)) if w < trigger => {
            let inter = a.intersect_shift(h);
            let densities = sets
                .iter()
                .map(|s| (s.modulus(), s.shift_overlap(h) as f64 / s.modulus() as f64))
                .collect();
            let input = LargerSieveInput::new(densities, x, q, 1.0)?;
            let sieve = larger_sieve_bound(&input, None)?;
            let implied_bound = sieve.bound.map(|b| 2.0 * k * b);
            Some(Certificate {
                h,
                weighted_sum: w,
                intersection_size: inter.len(),
                sieve,
                implied_bound,
            })
        }
        _ => None,
    };
    let beats_sqrt = certificate
        .as_ref()
        .and_then(|c| c.implied_bound)
        .is_some_and(|b| b < (x as f64).sqrt());
    Ok(DifferencedReport {
        energy,
        k,
        shift_count: shifts.shifts.len(),
        best_shift: best,
        certificate,
        beats_sqrt,
        ..empty
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Threshold,
    EmptySet,
    NoShift,
    IterationCap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Shift applied to reach the next iterate; `None` on the final record.
    pub h: Option<i64>,
    pub size: usize,
    pub weighted_sum: f64,
    pub per_prime_sizes_digest: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectingTrace {
    pub q: u64,
    pub c: f64,
    pub epsilon: f64,
    pub cap: usize,
    pub trigger: f64,
    pub iterations: Vec<IterationRecord>,
    pub stop: StopReason,
    pub final_size: usize,
    pub final_sieve: BoundReport,
    /// The final larger-sieve bound (if conclusive) is at least the final size.
    pub final_bound_valid: bool,
}

/// SHA-256 of the per-prime set sizes (little-endian `u64`s), first 16 hex digits.
pub fn sizes_digest(sets: &[ResidueSet]) -> String {
    let mut hasher = Sha256::new();
    for s in sets {
        hasher.update((s.len() as u64).to_le_bytes());
    }
    hasher.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Repeatedly intersect `A` and every `S_p` with a shifted copy of itself,
/// choosing the shift that most reduces the weighted size of the large
/// progressions, until the weighted size drops below `(1/2 - c) log Q`.
pub fn intersecting_process(
    a: &IntegerSet,
    family: &ResidueConstraintFamily,
    epsilon: f64,
    c: f64,
) -> Result<IntersectingTrace> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("ε = {epsilon} must lie in (0, 1)")));
    }
    if !(c > 0.0 && c < 0.5) {
        return Err(Error::domain(format!("c = {c} must lie in (0, 1/2)")));
    }
    let x = a.bound();
    let root = isqrt(x);
    for (p, s) in family.iter().filter(|&(p, _)| p <= root) {
        if s.progression_step().is_none() {
            return Err(Error::Precondition(format!("S_{p} is not an arithmetic progression")));
        }
        if s.len() as f64 > (1.0 - epsilon) * p as f64 {
            return Err(Error::Precondition(format!(
                "|S_{p}| = {} exceeds (1 - ε)p",
                s.len()
            )));
        }
    }
    if let Some(v) = occupancy_ok(a, family).first() {
        return Err(Error::Precondition(format!(
            "set occupies residue {} mod {} outside S_p",
            v.residue, v.p
        )));
    }
    let q = differenced_cutoff(x, c);
    let trigger = (0.5 - c) * (q as f64).ln();
    let cap = (4.0 / (c * epsilon)).ceil() as usize;
    let mut sets = sets_up_to(family, q)?;
    let mut current = a.clone();
    let mut iterations = Vec::new();
    let total = |sets: &[ResidueSet]| -> f64 {
        sets.iter()
            .map(|s| weight(s.modulus()) * s.len() as f64 / s.modulus() as f64)
            .sum()
    };
    let stop = loop {
        let weighted_sum = total(&sets);
        let mut record = IterationRecord {
            iteration: iterations.len(),
            h: None,
            size: current.len(),
            weighted_sum,
            per_prime_sizes_digest: sizes_digest(&sets),
        };
        if weighted_sum < trigger {
            iterations.push(record);
            break StopReason::Threshold;
        }
        if current.is_empty() {
            iterations.push(record);
            break StopReason::EmptySet;
        }
        if iterations.len() >= cap {
            iterations.push(record);
            break StopReason::IterationCap;
        }
        let energy = additive_energy(&current);
        let k = (current.len() as f64).powi(3) / energy as f64;
        let shifts = shift_set(&current, k)?;
        let candidates: Vec<i64> = shifts.shifts.into_iter().filter(|&h| h != 0).collect();
        if candidates.is_empty() {
            iterations.push(record);
            break StopReason::NoShift;
        }
        let large: Vec<ResidueSet> = sets
            .iter()
            .filter(|s| 10 * s.len() as u64 >= s.modulus())
            .cloned()
            .collect();
        let scored = exec::map(&candidates, |&h| (h, weighted_overlap(&large, h)));
        let (h, _) = scored.into_iter().min_by(shift_order).expect("nonempty");
        record.h = Some(h);
        iterations.push(record);
        current = current.intersect_shift(h);
        for s in sets.iter_mut() {
            *s = s.intersection(&s.shift(h));
        }
    };
    let densities = sets
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| (s.modulus(), s.len() as f64 / s.modulus() as f64))
        .collect();
    let final_sieve = larger_sieve_bound(&LargerSieveInput::new(densities, x, q.max(2), 1.0)?, None)?;
    let final_size = current.len();
    Ok(IntersectingTrace {
        q,
        c,
        epsilon,
        cap,
        trigger,
        final_bound_valid: final_sieve.bound.is_none_or(|b| final_size as f64 <= b),
        iterations,
        stop,
        final_size,
        final_sieve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::{interval_family, squares_set, ProgressionSpec};

    fn quartic_energy(el: &[u64]) -> u128 {
        let mut e = 0;
        for &a in el {
            for &b in el {
                for &c in el {
                    for &d in el {
                        e += u128::from(a + b == c + d);
                    }
                }
            }
        }
        e
    }

    fn quartic_energy_mod(el: &[u64], p: u64) -> u128 {
        let mut e = 0;
        for &a in el {
            for &b in el {
                for &c in el {
                    for &d in el {
                        e += u128::from((a + b) % p == (c + d) % p);
                    }
                }
            }
        }
        e
    }

    #[test]
    fn energy_examples() {
        assert_eq!(additive_energy(&IntegerSet::new(9, vec![7]).unwrap()), 1);
        assert_eq!(additive_energy(&IntegerSet::new(2, vec![1, 2]).unwrap()), 6);
        assert_eq!(additive_energy(&IntegerSet::new(3, vec![1, 2, 3]).unwrap()), 19);
        assert_eq!(additive_energy(&IntegerSet::empty(3)), 0);
        let sparse = IntegerSet::new(1 << 40, vec![1, 2, 1 << 30, 1 << 39]).unwrap();
        assert_eq!(additive_energy(&sparse), quartic_energy(sparse.elements()));
    }

    #[test]
    fn energy_matches_quartic_oracle() {
        let a = squares_set(400);
        assert_eq!(additive_energy(&a), quartic_energy(a.elements()));
        for p in [2u64, 3, 5, 7, 11, 13] {
            let fib = reduce_mod(&a, p).1;
            assert_eq!(additive_energy_mod(&fib), quartic_energy_mod(a.elements(), p));
        }
    }

    #[test]
    fn energy_mod_examples() {
        assert_eq!(additive_energy_mod_set(&ResidueSet::full(5)), 125);
        let half = ResidueSet::from_members(5, [1, 2, 3]);
        assert_eq!(additive_energy_mod_set(&half), 19);
        let closed = 9 + 2 * (4 + 1);
        assert_eq!(additive_energy_mod_set(&half), closed);
        assert_eq!(additive_energy_mod_set(&ResidueSet::from_members(7, [0])), 1);
    }

    #[test]
    fn quadruple_threshold_examples() {
        let chk = quadruple_threshold_check(&ResidueSet::from_members(5, [1, 2, 3]), 0.0895);
        assert!(chk.passes);
        assert!((chk.ratio - 0.152).abs() < 1e-12);
        assert!(!quadruple_threshold_check(&ResidueSet::from_members(5, [1, 2, 3]), 0.09).passes);
        assert!(quadruple_threshold_check(&ResidueSet::full(11), 15.0 / 16.0).passes);
    }

    #[test]
    fn lift_examples() {
        let r = lift_inequality_check(&IntegerSet::new(1, vec![1]).unwrap(), 100).unwrap();
        assert_eq!((r.lift_lhs, r.lift_rhs), (13, 300));
        let r = lift_inequality_check(&IntegerSet::empty(100), 100).unwrap();
        assert_eq!((r.lift_lhs, r.lift_rhs), (0, 0));
        assert!(r.holds);
    }

    #[test]
    fn shift_set_examples() {
        let a = IntegerSet::new(4, vec![1, 2, 3, 4]).unwrap();
        let s = shift_set(&a, 1.0).unwrap();
        assert_eq!(s.shifts, vec![-2, -1, 0, 1, 2]);
        assert_eq!(s.intersections, vec![2, 3, 4, 3, 2]);
        assert!(s.guarantee_holds);
        let sq = squares_set(200);
        let huge = shift_set(&sq, 1e12).unwrap();
        let d = difference_counts(&sq);
        let support = 2 * d.len() - 1;
        assert_eq!(huge.shifts.len(), support);
        for n in 1..12u64 {
            let ap = IntegerSet::new(100, (1..=n).map(|i| 3 * i).collect()).unwrap();
            let s = shift_set(&ap, 1.0).unwrap();
            let expect = if n % 2 == 0 { n + 1 } else { n };
            assert_eq!(s.shifts.len() as u64, expect, "n = {n}");
        }
    }

    #[test]
    fn sidon_set_has_full_difference_support() {
        let a = IntegerSet::new(100, vec![1, 2, 5, 11, 24, 40]).unwrap();
        let e = additive_energy(&a);
        let n = a.len() as u128;
        // Sidon: only trivial solutions, E = 2n² - n.
        assert_eq!(e, 2 * n * n - n);
        let s = shift_set(&a, n as f64).unwrap();
        assert_eq!(s.threshold, 0.5);
        assert_eq!(s.shifts.len() as u128, n * (n - 1) + 1);
    }

    #[test]
    fn pollard_examples() {
        let prof = pollard_profile(&ResidueSet::from_members(5, [0, 1])).unwrap();
        assert_eq!(prof.n, vec![3, 1]);
        assert!(prof.violations.is_empty());
        let prof = pollard_profile(&ResidueSet::full(7)).unwrap();
        assert_eq!(prof.n, vec![7; 7]);
        for mask in 1u64..(1 << 7) {
            let s = ResidueSet::from_members(7, (0..7).filter(|i| mask >> i & 1 == 1));
            let prof = pollard_profile(&s).unwrap();
            assert!(prof.violations.is_empty(), "mask {mask}");
            assert_eq!(prof.n.iter().sum::<u64>(), (s.len() * s.len()) as u64);
        }
    }

    #[test]
    fn threshold_select_examples() {
        let sel = threshold_select(&[1.0, 1.0, 1.0], &[1.0, 0.9, 0.5], 0.2, 0.4).unwrap();
        assert_eq!(sel.selected, vec![0, 1]);
        assert!(sel.selected_weight >= sel.guaranteed_weight);
        let sel = threshold_select(&[2.0, 3.0], &[1.0, 1.0], 0.1, 0.1).unwrap();
        assert_eq!(sel.selected, vec![0, 1]);
        assert!(threshold_select(&[1.0], &[0.7], 0.3, 0.3).is_ok_and(|s| s.selected == vec![0]));
        assert!(threshold_select(&[1.0], &[0.5], 0.2, 0.4).is_err());
    }

    #[test]
    fn progression_detection() {
        let s = ProgressionSpec {
            p: 11,
            start: 3,
            step: 4,
            len: 5,
        }
        .to_residue_set()
        .unwrap();
        let d = s.progression_step().unwrap();
        assert!(d == 4 || d == 7);
        assert!(ResidueSet::from_members(11, [0, 1, 3]).progression_step().is_none());
    }

    #[test]
    fn intersecting_process_on_empty_set_stops_immediately() {
        let fam = interval_family(&[(2, 0, 1), (3, 0, 2), (5, 0, 3), (7, 0, 4)]).unwrap();
        let t = intersecting_process(&IntegerSet::empty(10_000), &fam, 0.2, 0.05).unwrap();
        assert_eq!(t.iterations.len(), 1);
        assert_eq!(t.final_size, 0);
        assert!(t.iterations[0].h.is_none());
    }
}
