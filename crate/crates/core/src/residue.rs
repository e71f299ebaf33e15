//! Finite integer sets, residue sets modulo a prime, constraint families and
//! the generators for every example set the sieve bounds are tested against.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::numtheory::{is_prime, primes_up_to, PrimeTable};
use crate::rng::rng_from_seed;
use crate::{exec, Error, Result};

/// A finite set `A ⊂ [1, X]`, stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntegerSetRepr", into = "IntegerSetRepr")]
pub struct IntegerSet {
    bound: u64,
    elements: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegerSetRepr {
    bound: u64,
    elements: Vec<u64>,
}

impl TryFrom<IntegerSetRepr> for IntegerSet {
    type Error = Error;
    fn try_from(r: IntegerSetRepr) -> Result<Self> {
        IntegerSet::new(r.bound, r.elements)
    }
}

impl From<IntegerSet> for IntegerSetRepr {
    fn from(s: IntegerSet) -> Self {
        IntegerSetRepr {
            bound: s.bound,
            elements: s.elements,
        }
    }
}

impl IntegerSet {
    /// Validating constructor: elements must be strictly increasing in `[1, bound]`.
    pub fn new(bound: u64, elements: Vec<u64>) -> Result<Self> {
        if bound == 0 {
            return Err(Error::domain("set bound must be positive"));
        }
        if !elements.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain("elements must be strictly increasing"));
        }
        if let Some(&x) = elements.iter().find(|&&x| x == 0 || x > bound) {
            return Err(Error::domain(format!("element {x} outside [1, {bound}]")));
        }
        Ok(Self { bound, elements })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(bound: u64, mut elements: Vec<u64>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        Self::new(bound, elements)
    }

    pub fn empty(bound: u64) -> Self {
        Self {
            bound: bound.max(1),
            elements: Vec::new(),
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// The truncation `A ∩ [1, y]` (bound becomes `min(X, y)`).
    pub fn truncate(&self, y: u64) -> IntegerSet {
        let end = self.elements.partition_point(|&x| x <= y);
        IntegerSet {
            bound: self.bound.min(y).max(1),
            elements: self.elements[..end].to_vec(),
        }
    }

    /// `A ∩ (A + h)`: elements `x` with `x - h` also in `A`.
    pub fn intersect_shift(&self, h: i64) -> IntegerSet {
        let elements = self
            .elements
            .iter()
            .copied()
            .filter(|&x| {
                let y = x as i128 - h as i128;
                y >= 1 && y <= u64::MAX as i128 && self.contains(y as u64)
            })
            .collect();
        IntegerSet {
            bound: self.bound,
            elements,
        }
    }

    /// Keep the elements satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(u64) -> bool) -> IntegerSet {
        IntegerSet {
            bound: self.bound,
            elements: self.elements.iter().copied().filter(|&x| keep(x)).collect(),
        }
    }

    pub fn union(&self, other: &IntegerSet) -> IntegerSet {
        let mut elements = self.elements.clone();
        elements.extend_from_slice(&other.elements);
        elements.sort_unstable();
        elements.dedup();
        IntegerSet {
            bound: self.bound.max(other.bound),
            elements,
        }
    }
}

/// A subset of `Z/pZ`, stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: u64,
    words: Vec<u64>,
}

impl ResidueSet {
    pub fn empty(modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        Self {
            modulus,
            words: vec![0; (modulus as usize).div_ceil(64)],
        }
    }

    pub fn full(modulus: u64) -> Self {
        let mut s = Self::empty(modulus);
        for r in 0..modulus {
            s.insert(r);
        }
        s
    }

    /// Members are reduced mod `modulus`; duplicates are harmless.
    pub fn from_members(modulus: u64, members: impl IntoIterator<Item = u64>) -> Self {
        let mut s = Self::empty(modulus);
        for m in members {
            s.insert(m % modulus);
        }
        s
    }

    /// Build from signed residues (reduced into `[0, modulus)`).
    pub fn from_signed(modulus: u64, members: impl IntoIterator<Item = i64>) -> Self {
        let mut s = Self::empty(modulus);
        for m in members {
            s.insert((m as i128).rem_euclid(modulus as i128) as u64);
        }
        s
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn insert(&mut self, r: u64) {
        debug_assert!(r < self.modulus);
        self.words[(r / 64) as usize] |= 1 << (r % 64);
    }

    pub fn remove(&mut self, r: u64) {
        self.words[(r / 64) as usize] &= !(1 << (r % 64));
    }

    pub fn contains(&self, r: u64) -> bool {
        r < self.modulus && self.words[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() as u64 == self.modulus
    }

    pub fn members(&self) -> Vec<u64> {
        (0..self.modulus).filter(|&r| self.contains(r)).collect()
    }

    pub fn intersection(&self, other: &ResidueSet) -> ResidueSet {
        assert_eq!(self.modulus, other.modulus, "moduli differ");
        ResidueSet {
            modulus: self.modulus,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union(&self, other: &ResidueSet) -> ResidueSet {
        assert_eq!(self.modulus, other.modulus, "moduli differ");
        ResidueSet {
            modulus: self.modulus,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn complement(&self) -> ResidueSet {
        let mut c = ResidueSet {
            modulus: self.modulus,
            words: self.words.iter().map(|w| !w).collect(),
        };
        c.clear_tail();
        c
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.modulus == other.modulus
            && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// The translate `S + h`.
    pub fn shift(&self, h: i64) -> ResidueSet {
        let p = self.modulus;
        let h = (h as i128).rem_euclid(p as i128) as u64;
        let mut out = ResidueSet::empty(p);
        for r in self.members() {
            out.insert((r + h) % p);
        }
        out
    }

    /// `|S ∩ (S + h)|`.
    pub fn shift_overlap(&self, h: i64) -> usize {
        self.intersection(&self.shift(h)).len()
    }

    /// A step `d` with `S = {s, s+d, ..., s+(k-1)d}`, if `S` is an arithmetic
    /// progression. Sets of size 0, 1 or `p` report step 1.
    pub fn progression_step(&self) -> Option<u64> {
        let k = self.len();
        let p = self.modulus;
        if k <= 1 || k as u64 == p {
            return Some(1);
        }
        // S is a single d-chain iff exactly one element lacks a predecessor.
        let members = self.members();
        let s0 = members[0];
        members[1..]
            .iter()
            .flat_map(|&s| [s - s0, p - (s - s0)])
            .find(|&d| self.shift_overlap(d as i64) == k - 1)
    }

    /// The negation `-S`.
    pub fn negate(&self) -> ResidueSet {
        let p = self.modulus;
        ResidueSet::from_members(p, self.members().into_iter().map(|r| (p - r) % p))
    }

    fn clear_tail(&mut self) {
        let used = self.modulus % 64;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

impl Serialize for ResidueSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ResidueSetRepr {
            p: self.modulus,
            members: self.members(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ResidueSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ResidueSetRepr::deserialize(d)?;
        if r.p == 0 {
            return Err(serde::de::Error::custom("modulus must be positive"));
        }
        if let Some(m) = r.members.iter().find(|&&m| m >= r.p) {
            return Err(serde::de::Error::custom(format!(
                "residue {m} not reduced mod {}",
                r.p
            )));
        }
        Ok(ResidueSet::from_members(r.p, r.members))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResidueSetRepr {
    p: u64,
    members: Vec<u64>,
}

/// A cyclic interval `{start, start+1, ..., start+len-1} mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicInterval {
    pub modulus: u64,
    pub start: u64,
    pub len: u64,
}

impl CyclicInterval {
    pub fn new(modulus: u64, start: u64, len: u64) -> Result<Self> {
        if len > modulus {
            return Err(Error::domain(format!(
                "interval length {len} exceeds modulus {modulus}"
            )));
        }
        Ok(Self {
            modulus,
            start: start % modulus,
            len,
        })
    }

    pub fn to_residue_set(&self) -> ResidueSet {
        ResidueSet::from_members(self.modulus, (0..self.len).map(|i| self.start + i))
    }

    pub fn contains(&self, r: u64) -> bool {
        (r % self.modulus + self.modulus - self.start) % self.modulus < self.len
    }
}

/// The shortest cyclic interval containing `s`: the complement of the largest
/// gap between consecutive members. `None` for the empty set.
pub fn minimal_covering_interval(s: &ResidueSet) -> Option<CyclicInterval> {
    let members = s.members();
    let p = s.modulus();
    let (&first, &last) = (members.first()?, members.last()?);
    // Gap after member i is the number of non-members before the next member.
    let mut best_gap = first + p - last - 1;
    let mut best_start = first;
    for w in members.windows(2) {
        let gap = w[1] - w[0] - 1;
        if gap > best_gap {
            best_gap = gap;
            best_start = w[1];
        }
    }
    Some(CyclicInterval {
        modulus: p,
        start: best_start,
        len: p - best_gap,
    })
}

/// Occupancy counts `A(a, p; X)` for each class `a mod p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreCounts {
    pub modulus: u64,
    pub counts: Vec<u64>,
}

impl FibreCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn sum_of_squares(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128 * c as u128).sum()
    }

    pub fn support(&self) -> ResidueSet {
        ResidueSet::from_members(
            self.modulus,
            self.counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(a, _)| a as u64),
        )
    }
}

/// Reduce `A` modulo `p`: the occupied classes and their fibre counts.
pub fn reduce_mod(a: &IntegerSet, p: u64) -> (ResidueSet, FibreCounts) {
    assert!(p >= 1, "modulus must be positive");
    let mut counts = vec![0u64; p as usize];
    for &x in a.elements() {
        counts[(x % p) as usize] += 1;
    }
    let fibres = FibreCounts { modulus: p, counts };
    (fibres.support(), fibres)
}

/// Per-prime permitted residue sets. Primes without an entry are
/// unconstrained (every class permitted).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResidueConstraintFamily {
    constraints: BTreeMap<u64, ResidueSet>,
}

impl ResidueConstraintFamily {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_sets(sets: impl IntoIterator<Item = ResidueSet>) -> Result<Self> {
        let mut f = Self::new();
        for s in sets {
            f.insert(s)?;
        }
        Ok(f)
    }

    pub fn insert(&mut self, set: ResidueSet) -> Result<()> {
        let p = set.modulus();
        if !is_prime(p) {
            return Err(Error::domain(format!("constraint modulus {p} is not prime")));
        }
        self.constraints.insert(p, set);
        Ok(())
    }

    pub fn get(&self, p: u64) -> Option<&ResidueSet> {
        self.constraints.get(&p)
    }

    /// `|S_p|`, or `p` when unconstrained.
    pub fn size(&self, p: u64) -> u64 {
        self.get(p).map_or(p, |s| s.len() as u64)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.constraints.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &ResidueSet)> + '_ {
        self.constraints.iter().map(|(&p, s)| (p, s))
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// `[P_min, Q]` over the constrained primes.
    pub fn prime_range(&self) -> Option<(u64, u64)> {
        Some((*self.constraints.keys().next()?, *self.constraints.keys().next_back()?))
    }

    /// Is `x` permitted by every constraint?
    pub fn admits(&self, x: u64) -> bool {
        self.constraints.iter().all(|(&p, s)| s.contains(x % p))
    }

    pub fn restrict(&self, keep: impl Fn(u64) -> bool) -> Self {
        Self {
            constraints: self
                .constraints
                .iter()
                .filter(|(&p, _)| keep(p))
                .map(|(&p, s)| (p, s.clone()))
                .collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyRepr {
    primes: Vec<ResidueSet>,
}

impl Serialize for ResidueConstraintFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FamilyRepr {
            primes: self.constraints.values().cloned().collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ResidueConstraintFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FamilyRepr::deserialize(d)?;
        ResidueConstraintFamily::from_sets(r.primes).map_err(serde::de::Error::custom)
    }
}

/// A prime together with an offending residue of `A` outside `S_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub p: u64,
    pub residue: u64,
}

/// All `(p, r)` with `r ∈ A mod p` but `r ∉ S_p`. Empty iff `A` obeys the family.
pub fn occupancy_ok(a: &IntegerSet, family: &ResidueConstraintFamily) -> Vec<Violation> {
    let entries: Vec<(u64, &ResidueSet)> = family.iter().collect();
    exec::map(&entries, |&(p, allowed)| {
        let (occupied, _) = reduce_mod(a, p);
        occupied
            .members()
            .into_iter()
            .filter(|&r| !allowed.contains(r))
            .map(|residue| Violation { p, residue })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// `{n² : n² ≤ X}`.
pub fn squares_set(x: u64) -> IntegerSet {
    let elements = (1u64..)
        .map(|n| n * n)
        .take_while(|&s| s <= x)
        .collect();
    IntegerSet {
        bound: x.max(1),
        elements,
    }
}

/// Quadratic residues together with 0, the reduction of the squares mod `p`.
pub fn squares_mod(p: u64) -> ResidueSet {
    ResidueSet::from_members(p, (0..p).map(|x| x * x % p))
}

/// `S_p = QR ∪ {0}` for every prime `p <= q`.
pub fn squares_family(table: &PrimeTable, q: u64) -> ResidueConstraintFamily {
    ResidueConstraintFamily {
        constraints: table.up_to(q).iter().map(|&p| (p, squares_mod(p))).collect(),
    }
}

/// `{start, start+step, ..., start+(len-1)·step} mod p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgressionSpec {
    pub p: u64,
    pub start: u64,
    pub step: u64,
    pub len: u64,
}

impl ProgressionSpec {
    pub fn to_residue_set(&self) -> Result<ResidueSet> {
        let p = self.p;
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if self.len > p {
            return Err(Error::domain(format!(
                "progression length {} exceeds p = {p}",
                self.len
            )));
        }
        if self.len > 1 && self.step.is_multiple_of(p) {
            return Err(Error::domain(format!("step {} vanishes mod {p}", self.step)));
        }
        Ok(ResidueSet::from_members(
            p,
            (0..self.len).map(|i| (self.start % p + i % p * (self.step % p)) % p),
        ))
    }
}

pub fn progression_family(specs: &[ProgressionSpec]) -> Result<ResidueConstraintFamily> {
    let mut f = ResidueConstraintFamily::new();
    for s in specs {
        f.insert(s.to_residue_set()?)?;
    }
    Ok(f)
}

/// Cyclic intervals `{start, ..., start+len-1} mod p`, one per `(p, start, len)`.
pub fn interval_family(specs: &[(u64, u64, u64)]) -> Result<ResidueConstraintFamily> {
    let progressions: Vec<ProgressionSpec> = specs
        .iter()
        .map(|&(p, start, len)| ProgressionSpec {
            p,
            start,
            step: 1,
            len,
        })
        .collect();
    progression_family(&progressions)
}

/// How the cutoffs `X_1 < X_2 < ...` of the primorial construction grow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthRule {
    /// `X_1 = start`, `X_{i+1}` = smallest prime exceeding `factor · a_i`.
    NextPrimeAfterMultiple { start: u64, factor: u64 },
    /// Explicit cutoffs.
    Explicit(Vec<u64>),
}

impl Default for GrowthRule {
    fn default() -> Self {
        GrowthRule::NextPrimeAfterMultiple {
            start: 3,
            factor: 10,
        }
    }
}

/// Reduction of the primorial set modulo one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimorialReduction {
    pub p: u64,
    pub residues: Vec<u64>,
    pub interval: CyclicInterval,
}

/// `{a_1, ..., a_n}` with `a_i = prod_{p <= X_i} p`, kept exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimorialSet {
    pub cutoffs: Vec<u64>,
    pub elements: Vec<BigUint>,
    pub reductions: Vec<PrimorialReduction>,
}

impl PrimorialSet {
    /// The elements as an [`IntegerSet`] when they all fit in 64 bits.
    pub fn to_integer_set(&self) -> Result<IntegerSet> {
        let elems: Option<Vec<u64>> = self.elements.iter().map(|e| e.to_u64()).collect();
        let elems = elems.ok_or_else(|| {
            Error::Overflow("primorial elements exceed 64 bits; use `elements`".into())
        })?;
        let bound = *elems.last().unwrap_or(&1);
        IntegerSet::new(bound, elems)
    }

    /// Largest `len / p` over the reductions.
    pub fn worst_interval_ratio(&self) -> f64 {
        self.reductions
            .iter()
            .map(|r| r.interval.len as f64 / r.p as f64)
            .fold(0.0, f64::max)
    }
}

/// Cutoffs whose primorials would need more than this many primes are refused.
const PRIMORIAL_CUTOFF_LIMIT: u64 = 10_000_000;

fn next_prime_after(n: &BigUint) -> Result<u64> {
    let n = n.to_u64().filter(|&v| v < PRIMORIAL_CUTOFF_LIMIT).ok_or_else(|| {
        Error::Overflow(format!(
            "next cutoff exceeds {PRIMORIAL_CUTOFF_LIMIT}; primorial would not be representable"
        ))
    })?;
    Ok((n + 1..).find(|&m| is_prime(m)).expect("primes are unbounded"))
}

/// The rapidly-growing primorial construction, with the minimal covering
/// cyclic interval of its reduction modulo every prime up to `check_limit`.
pub fn primorial_set(rule: &GrowthRule, count: usize, check_limit: u64) -> Result<PrimorialSet> {
    let mut cutoffs = Vec::with_capacity(count);
    let mut elements: Vec<BigUint> = Vec::with_capacity(count);
    for i in 0..count {
        let cutoff = match rule {
            GrowthRule::Explicit(xs) => *xs.get(i).ok_or_else(|| {
                Error::domain(format!("explicit growth rule has only {} cutoffs", xs.len()))
            })?,
            GrowthRule::NextPrimeAfterMultiple { start, factor } => match elements.last() {
                None => *start,
                Some(prev) => next_prime_after(&(prev * BigUint::from(*factor)))?,
            },
        };
        if cutoffs.last().is_some_and(|&last| cutoff <= last) {
            return Err(Error::domain("growth rule must be strictly increasing"));
        }
        if cutoff > PRIMORIAL_CUTOFF_LIMIT {
            return Err(Error::Overflow(format!("cutoff {cutoff} too large")));
        }
        let value = if cutoff < 2 {
            return Err(Error::domain("cutoffs must be at least 2"));
        } else {
            primes_up_to(cutoff)?
                .primes()
                .iter()
                .fold(BigUint::from(1u32), |acc, &p| acc * p)
        };
        cutoffs.push(cutoff);
        elements.push(value);
    }
    let reductions = if check_limit >= 2 {
        let table = primes_up_to(check_limit)?;
        exec::map(table.primes(), |&p| {
            let set = ResidueSet::from_members(
                p,
                elements
                    .iter()
                    .map(|e| (e % p).to_u64().expect("residue fits")),
            );
            let interval = minimal_covering_interval(&set).unwrap_or(CyclicInterval {
                modulus: p,
                start: 0,
                len: 0,
            });
            PrimorialReduction {
                p,
                residues: set.members(),
                interval,
            }
        })
    } else {
        Vec::new()
    };
    Ok(PrimorialSet {
        cutoffs,
        elements,
        reductions,
    })
}

/// A uniformly random `target_size`-subset of the integers in `[1, X]` that
/// the family admits. Deterministic in `seed`.
pub fn random_constrained_set(
    family: &ResidueConstraintFamily,
    x: u64,
    target_size: usize,
    seed: u64,
) -> Result<IntegerSet> {
    let admissible: Vec<u64> = exec::filter_map_range(1..x + 1, |n| family.admits(n).then_some(n));
    if admissible.len() < target_size {
        return Err(Error::Infeasible(format!(
            "only {} admissible integers in [1, {x}], {} requested",
            admissible.len(),
            target_size
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut picked: Vec<u64> = sample(&mut rng, admissible.len(), target_size)
        .into_iter()
        .map(|i| admissible[i])
        .collect();
    picked.sort_unstable();
    IntegerSet::new(x, picked)
}

/// A family of progressions of length `len_of(p)` chosen one prime at a time
/// (ascending) to keep as many survivors in `[1, X]` as possible, with ties
/// and step choices drawn from `seed`. Returns the family and the survivors.
///
/// Arbitrary families of this shape almost always have no integer points at
/// all in `[1, X]`; this builds ones that do.
pub fn greedy_progression_family(
    x: u64,
    primes: &[u64],
    len_of: impl Fn(u64) -> u64,
    unit_step: bool,
    seed: u64,
) -> Result<(ResidueConstraintFamily, IntegerSet)> {
    let mut rng = rng_from_seed(seed);
    let mut survivors: Vec<u64> = (1..=x).collect();
    let mut family = ResidueConstraintFamily::new();
    for &p in primes {
        let len = len_of(p);
        if len > p || len == 0 {
            return Err(Error::domain(format!("length {len} invalid for p = {p}")));
        }
        let step = if unit_step || p == 2 {
            1
        } else {
            rng.gen_range(1..p)
        };
        // Population of each class, indexed by position along the progression.
        let inv_step = mod_inverse(step, p);
        let mut by_position = vec![0u64; p as usize];
        for &n in &survivors {
            by_position[((n % p) * inv_step % p) as usize] += 1;
        }
        let window_count = |start: u64| -> u64 {
            (0..len).map(|i| by_position[((start + i) % p) as usize]).sum()
        };
        let counts: Vec<u64> = (0..p).map(window_count).collect();
        let best = *counts.iter().max().unwrap_or(&0);
        let ties: Vec<u64> = (0..p).filter(|&s| counts[s as usize] == best).collect();
        let start_pos = ties[rng.gen_range(0..ties.len())];
        let spec = ProgressionSpec {
            p,
            start: start_pos * step % p,
            step,
            len,
        };
        let set = spec.to_residue_set()?;
        survivors.retain(|&n| set.contains(n % p));
        family.insert(set)?;
    }
    Ok((family, IntegerSet::new(x, survivors)?))
}

pub(crate) fn mod_inverse(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert!(r == 1, "{a} not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}
