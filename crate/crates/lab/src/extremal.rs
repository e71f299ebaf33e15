//! Largest `A ⊆ [1, X]` with `|A mod p| <= (p+1)/2` for each listed prime.
//!
//! Any such `A` sits inside `{n : n mod p ∈ S_p for all p}` for some choice
//! of class sets with `|S_p| = (p+1)/2`, and that set is itself feasible, so
//! the branch-and-bound and local searches work over class choices. The
//! exhaustive method instead decides membership integer by integer.
//!
//! How large `X` must be before the probe says anything about the limiting
//! behaviour of `|A|/√X` is unknown; the ratio is reported without
//! interpretation.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use sievelab_core::numtheory::isqrt;
use sievelab_core::residue::{squares_mod, IntegerSet};
use sievelab_core::rng::rng_from_seed;

use crate::config::check_primes;
use crate::error::{LabError, LabResult};

/// Largest `X` accepted by the exhaustive method.
pub const EXHAUSTIVE_MAX_X: u64 = 28;
/// Largest `X` accepted by the class-choice methods.
pub const SEARCH_MAX_X: u64 = 1_000_000;
/// Restarts performed by the local search (the first from the squares).
pub const GREEDY_RESTARTS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    BranchAndBound,
    GreedyLocal,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "exhaustive",
            Method::BranchAndBound => "branch_and_bound",
            Method::GreedyLocal => "greedy_local",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.replace('-', "_").as_str() {
            "exhaustive" => Ok(Method::Exhaustive),
            "branch_and_bound" => Ok(Method::BranchAndBound),
            "greedy_local" => Ok(Method::GreedyLocal),
            _ => Err(format!(
                "unknown method `{s}` (expected exhaustive, branch-and-bound or greedy-local)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalResult {
    pub x: u64,
    pub primes: Vec<u64>,
    pub method: Method,
    pub seed: u64,
    pub budget: u64,
    /// Search nodes (or local-search updates) used.
    pub work: u64,
    pub budget_exhausted: bool,
    pub best: Vec<u64>,
    pub size: usize,
    /// Only set when an exhaustive or branch-and-bound search ran to completion.
    pub certified_optimal: bool,
    /// `|{n² <= X}|`, the size of the squares, which are always feasible.
    pub squares_baseline: u64,
    pub sqrt_ratio: f64,
}

pub fn capacity(p: u64) -> usize {
    p.div_ceil(2) as usize
}

/// Does `a` meet every capacity constraint?
pub fn is_feasible(a: &[u64], primes: &[u64]) -> bool {
    primes.iter().all(|&p| {
        let mut seen = vec![false; p as usize];
        let mut distinct = 0;
        for &n in a {
            let r = (n % p) as usize;
            if !seen[r] {
                seen[r] = true;
                distinct += 1;
            }
        }
        distinct <= capacity(p)
    })
}

pub fn extremal_search(
    x: u64,
    primes: &[u64],
    budget: u64,
    method: Method,
    seed: u64,
) -> LabResult<ExtremalResult> {
    check_primes(primes, "primes")?;
    if x == 0 || x > SEARCH_MAX_X {
        return Err(LabError::config("x", format!("must lie in [1, {SEARCH_MAX_X}]")));
    }
    if method == Method::Exhaustive && x > EXHAUSTIVE_MAX_X {
        return Err(LabError::config(
            "x",
            format!("exhaustive search needs x <= {EXHAUSTIVE_MAX_X}"),
        ));
    }
    if budget == 0 {
        return Err(LabError::config("budget", "must be positive"));
    }
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    let (best, work, exhausted) = match method {
        Method::Exhaustive => exhaustive(x, &primes, budget),
        Method::BranchAndBound => branch_and_bound(x, &primes, budget),
        Method::GreedyLocal => greedy_local(x, &primes, budget, seed),
    };
    if !is_feasible(&best, &primes) {
        return Err(LabError::Invariant(format!(
            "{method} returned a set violating the capacity constraints"
        )));
    }
    let size = best.len();
    Ok(ExtremalResult {
        x,
        primes,
        method,
        seed,
        budget,
        work,
        budget_exhausted: exhausted,
        best,
        size,
        certified_optimal: method != Method::GreedyLocal && !exhausted,
        squares_baseline: isqrt(x),
        sqrt_ratio: size as f64 / (x as f64).sqrt(),
    })
}

struct Exhaustive<'a> {
    x: u64,
    primes: &'a [u64],
    counts: Vec<Vec<u32>>,
    distinct: Vec<usize>,
    current: Vec<u64>,
    best: Vec<u64>,
    work: u64,
    budget: u64,
}

impl Exhaustive<'_> {
    fn admits(&self, n: u64) -> bool {
        self.primes.iter().enumerate().all(|(i, &p)| {
            self.counts[i][(n % p) as usize] > 0 || self.distinct[i] < capacity(p)
        })
    }

    fn set(&mut self, n: u64, add: bool) {
        for (i, &p) in self.primes.iter().enumerate() {
            let c = &mut self.counts[i][(n % p) as usize];
            if add {
                if *c == 0 {
                    self.distinct[i] += 1;
                }
                *c += 1;
            } else {
                *c -= 1;
                if *c == 0 {
                    self.distinct[i] -= 1;
                }
            }
        }
        if add {
            self.current.push(n);
        } else {
            self.current.pop();
        }
    }

    /// Decide `n, n+1, ..., X`. Returns false once the budget is spent.
    fn search(&mut self, n: u64) -> bool {
        self.work += 1;
        if self.work > self.budget {
            return false;
        }
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
        }
        if n > self.x || self.current.len() as u64 + (self.x - n + 1) <= self.best.len() as u64 {
            return true;
        }
        if self.admits(n) {
            self.set(n, true);
            let ok = self.search(n + 1);
            self.set(n, false);
            if !ok {
                return false;
            }
        }
        self.search(n + 1)
    }
}

fn exhaustive(x: u64, primes: &[u64], budget: u64) -> (Vec<u64>, u64, bool) {
    let mut s = Exhaustive {
        x,
        primes,
        counts: primes.iter().map(|&p| vec![0; p as usize]).collect(),
        distinct: vec![0; primes.len()],
        current: Vec::new(),
        best: Vec::new(),
        work: 0,
        budget,
    };
    let complete = s.search(1);
    (s.best, s.work.min(budget), !complete)
}

fn class_populations(survivors: &[u64], p: u64) -> Vec<u64> {
    let mut pop = vec![0u64; p as usize];
    for &n in survivors {
        pop[(n % p) as usize] += 1;
    }
    pop
}

/// Sum of the `k` largest entries.
fn top_sum(pop: &[u64], k: usize) -> u64 {
    let mut sorted = pop.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    sorted.iter().take(k).sum()
}

struct BranchAndBound<'a> {
    primes: &'a [u64],
    best: Vec<u64>,
    work: u64,
    budget: u64,
}

impl BranchAndBound<'_> {
    /// Upper bound for any completion: no prime still to be decided can keep
    /// more than its `(p+1)/2` most populated classes. Heuristic in the
    /// sense that it ignores interactions between primes; exactness comes
    /// only from finishing the search.
    fn upper_bound(&self, survivors: &[u64], from: usize) -> u64 {
        self.primes[from..]
            .iter()
            .map(|&p| top_sum(&class_populations(survivors, p), capacity(p)))
            .fold(survivors.len() as u64, u64::min)
    }

    fn search(&mut self, survivors: Vec<u64>, depth: usize) -> bool {
        self.work += 1;
        if self.work > self.budget {
            return false;
        }
        if depth == self.primes.len() {
            if survivors.len() > self.best.len() {
                self.best = survivors;
            }
            return true;
        }
        if self.upper_bound(&survivors, depth) <= self.best.len() as u64 {
            return true;
        }
        let p = self.primes[depth];
        let pop = class_populations(&survivors, p);
        let mut classes: Vec<usize> = (0..p as usize).filter(|&r| pop[r] > 0).collect();
        classes.sort_by(|&a, &b| pop[b].cmp(&pop[a]).then(a.cmp(&b)));
        let cap = capacity(p);
        if classes.len() <= cap {
            return self.search(survivors, depth + 1);
        }
        let mut chosen = Vec::with_capacity(cap);
        self.choose(&survivors, depth, &pop, &classes, 0, 0, cap, &mut chosen)
    }

    /// Enumerate `cap`-subsets of `classes` (sorted by population, largest
    /// first), skipping those whose best completion cannot beat the record.
    #[allow(clippy::too_many_arguments)]
    fn choose(
        &mut self,
        survivors: &[u64],
        depth: usize,
        pop: &[u64],
        classes: &[usize],
        start: usize,
        partial: u64,
        cap: usize,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == cap {
            let p = self.primes[depth];
            let keep: Vec<u64> = survivors
                .iter()
                .copied()
                .filter(|&n| chosen.contains(&((n % p) as usize)))
                .collect();
            return self.search(keep, depth + 1);
        }
        let need = cap - chosen.len();
        for i in start..=classes.len() - need {
            let optimistic: u64 = partial + classes[i..i + need].iter().map(|&r| pop[r]).sum::<u64>();
            if optimistic <= self.best.len() as u64 {
                break;
            }
            chosen.push(classes[i]);
            let ok = self.choose(survivors, depth, pop, classes, i + 1, partial + pop[classes[i]], cap, chosen);
            chosen.pop();
            if !ok {
                return false;
            }
        }
        true
    }
}

fn branch_and_bound(x: u64, primes: &[u64], budget: u64) -> (Vec<u64>, u64, bool) {
    let mut s = BranchAndBound {
        primes,
        best: Vec::new(),
        work: 0,
        budget,
    };
    let complete = s.search((1..=x).collect(), 0);
    (s.best, s.work.min(budget), !complete)
}

fn admitted(x: u64, primes: &[u64], classes: &[Vec<bool>]) -> Vec<u64> {
    (1..=x)
        .filter(|&n| primes.iter().zip(classes).all(|(&p, s)| s[(n % p) as usize]))
        .collect()
}

/// Coordinate ascent over class choices: for one prime at a time, keep the
/// `(p+1)/2` classes most populated by integers the other primes admit.
/// Ties keep the current classes, then prefer smaller residues.
fn ascend(x: u64, primes: &[u64], classes: &mut [Vec<bool>], work: &mut u64, budget: u64) -> bool {
    let mut size = admitted(x, primes, classes).len();
    loop {
        let mut improved = false;
        for i in 0..primes.len() {
            *work += 1;
            if *work > budget {
                return false;
            }
            let p = primes[i];
            let others: Vec<u64> = (1..=x)
                .filter(|&n| {
                    primes
                        .iter()
                        .zip(classes.iter())
                        .enumerate()
                        .all(|(j, (&q, s))| j == i || s[(n % q) as usize])
                })
                .collect();
            let pop = class_populations(&others, p);
            let mut order: Vec<usize> = (0..p as usize).collect();
            order.sort_by(|&a, &b| {
                pop[b]
                    .cmp(&pop[a])
                    .then(classes[i][b].cmp(&classes[i][a]))
                    .then(a.cmp(&b))
            });
            let mut next = vec![false; p as usize];
            for &r in order.iter().take(capacity(p)) {
                next[r] = true;
            }
            let new_size: usize = order.iter().take(capacity(p)).map(|&r| pop[r] as usize).sum();
            if new_size > size {
                size = new_size;
                improved = true;
            }
            classes[i] = next;
        }
        if !improved {
            return true;
        }
    }
}

fn greedy_local(x: u64, primes: &[u64], budget: u64, seed: u64) -> (Vec<u64>, u64, bool) {
    let mut rng = rng_from_seed(seed);
    let mut best: Vec<u64> = Vec::new();
    let mut work = 0u64;
    let mut exhausted = false;
    for restart in 0..GREEDY_RESTARTS {
        let mut classes: Vec<Vec<bool>> = primes
            .iter()
            .map(|&p| {
                let mut members: Vec<usize> = if restart == 0 {
                    // Squares mod p are 0 and the (p-1)/2 nonzero squares.
                    squares_mod(p).members().into_iter().map(|r| r as usize).collect()
                } else {
                    let mut all: Vec<usize> = (0..p as usize).collect();
                    all.shuffle(&mut rng);
                    all
                };
                members.truncate(capacity(p));
                let mut s = vec![false; p as usize];
                for r in members {
                    s[r] = true;
                }
                s
            })
            .collect();
        let finished = ascend(x, primes, &mut classes, &mut work, budget);
        let found = admitted(x, primes, &classes);
        if found.len() > best.len() {
            best = found;
        }
        if !finished {
            exhausted = true;
            break;
        }
    }
    (best, work.min(budget), exhausted)
}

/// The chosen set as an [`IntegerSet`] on `[1, X]`.
pub fn as_integer_set(result: &ExtremalResult) -> IntegerSet {
    IntegerSet::new(result.x, result.best.clone()).expect("search output is sorted and in range")
}
