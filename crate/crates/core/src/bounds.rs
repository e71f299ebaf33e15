//! Numeric evaluation of sieve upper bounds for sets with few residues.
//!
//! Every bound is returned as a [`BoundReport`] carrying the raw denominator
//! and per-prime contributions, so callers can add their own slack. Bounds
//! whose denominator is not safely positive are reported as inconclusive
//! (`bound == None`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numtheory::{isqrt, primes_up_to, smallest_prime_factors};
use crate::residue::{reduce_mod, IntegerSet, ResidueConstraintFamily};
use crate::{exec, Error, Result};

/// Denominators at or below this are treated as nonpositive.
pub const DENOMINATOR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeTerm {
    pub p: u64,
    pub term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound: Option<f64>,
    pub denominator: f64,
    pub crude_bound: Option<f64>,
    pub per_prime: Vec<PrimeTerm>,
}

impl BoundReport {
    pub fn is_conclusive(&self) -> bool {
        self.bound.is_some()
    }
}

fn positive_ratio(numerator: f64, denominator: f64) -> Option<f64> {
    (denominator > DENOMINATOR_EPS).then(|| numerator / denominator)
}

/// `sum_{q <= n squarefree} prod_{p | q} ratio[p]`, given per-prime ratios
/// indexed by `p`. Accumulated in increasing `q`.
fn squarefree_product_sum(ratio: &[f64], n: usize) -> f64 {
    let spf = smallest_prime_factors(n);
    let mut g = vec![0.0f64; n + 1];
    g[1] = 1.0;
    let mut total = 1.0;
    for q in 2..=n {
        let p = spf[q] as usize;
        let m = q / p;
        g[q] = if m.is_multiple_of(p) { 0.0 } else { g[m] * ratio[p] };
        total += g[q];
    }
    total
}

/// The large sieve bound `(X + Q²) / sum_{q <= Q} μ²(q) prod_{p|q} |S_p^c|/|S_p|`
/// together with the crude form `(X + Q²) / sum_{p <= Q} |S_p^c|/p`.
///
/// Primes without a constraint have `S_p = Z/pZ` and contribute a factor 0.
pub fn large_sieve_bound(family: &ResidueConstraintFamily, x: u64, q: u64) -> Result<BoundReport> {
    if q == 0 {
        return Err(Error::domain("Q must be positive"));
    }
    let numerator = q
        .checked_mul(q)
        .and_then(|q2| q2.checked_add(x))
        .ok_or_else(|| Error::Overflow(format!("X + Q² with X = {x}, Q = {q}")))?
        as f64;
    let n = usize::try_from(q).map_err(|_| Error::Overflow(format!("Q = {q}")))?;
    let mut ratio = vec![0.0f64; n + 1];
    let mut per_prime = Vec::new();
    let mut crude_denominator = 0.0;
    for (p, set) in family.iter().filter(|&(p, _)| p <= q) {
        let size = set.len() as u64;
        if size == 0 {
            return Err(Error::domain(format!(
                "S_{p} is empty, so every constrained set is empty"
            )));
        }
        let missing = (p - size) as f64;
        ratio[p as usize] = missing / size as f64;
        crude_denominator += missing / p as f64;
        per_prime.push(PrimeTerm {
            p,
            term: ratio[p as usize],
        });
    }
    let denominator = squarefree_product_sum(&ratio, n);
    Ok(BoundReport {
        bound: positive_ratio(numerator, denominator),
        denominator,
        crude_bound: positive_ratio(numerator, crude_denominator),
        per_prime,
    })
}

/// Inputs to the larger sieve: densities `σ_p = |S_p|/p` (missing primes
/// have `σ_p = 1`), the height `X`, the prime cutoff `Q` and the fraction
/// `δ` of `A` that is assumed to obey the constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargerSieveInput {
    pub densities: BTreeMap<u64, f64>,
    pub x: u64,
    pub q: u64,
    pub delta: f64,
}

impl LargerSieveInput {
    pub fn new(densities: BTreeMap<u64, f64>, x: u64, q: u64, delta: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::domain("Q must be at least 2"));
        }
        if x == 0 {
            return Err(Error::domain("X must be positive"));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::domain(format!("δ = {delta} must lie in (0, 1]")));
        }
        if let Some((p, s)) = densities.iter().find(|(_, &s)| !(s > 0.0 && s <= 1.0)) {
            return Err(Error::domain(format!("σ_{p} = {s} must lie in (0, 1]")));
        }
        Ok(Self {
            densities,
            x,
            q,
            delta,
        })
    }

    pub fn from_family(family: &ResidueConstraintFamily, x: u64, q: u64, delta: f64) -> Result<Self> {
        let densities = family
            .iter()
            .map(|(p, s)| (p, s.len() as f64 / p as f64))
            .collect();
        Self::new(densities, x, q, delta)
    }

    pub fn sigma(&self, p: u64) -> f64 {
        self.densities.get(&p).copied().unwrap_or(1.0)
    }
}

/// The larger sieve bound `Q / (δ² sum_{p ∈ 𝒫, p <= Q} log p / (σ_p p) - log X)`.
///
/// `prime_subset` restricts the sum; `None` uses every prime up to `Q`.
pub fn larger_sieve_bound(
    input: &LargerSieveInput,
    prime_subset: Option<&dyn Fn(u64) -> bool>,
) -> Result<BoundReport> {
    let table = primes_up_to(input.q)?;
    let d2 = input.delta * input.delta;
    let per_prime: Vec<PrimeTerm> = table
        .primes()
        .iter()
        .copied()
        .filter(|&p| prime_subset.is_none_or(|keep| keep(p)))
        .map(|p| PrimeTerm {
            p,
            term: d2 * (p as f64).ln() / (input.sigma(p) * p as f64),
        })
        .collect();
    let sum: f64 = per_prime.iter().map(|t| t.term).sum();
    let denominator = sum - (input.x as f64).ln();
    Ok(BoundReport {
        bound: positive_ratio(input.q as f64, denominator),
        denominator,
        crude_bound: None,
        per_prime,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformFibreReport {
    pub eta: f64,
    pub uniform: Vec<u64>,
    pub non_uniform: Vec<u64>,
    /// `sum log p / p` over non-uniform `p <= √X`.
    pub excluded_mass: f64,
    /// `κ` with `|A| = X^{1/2 - κ}`; `None` for empty `A`.
    pub kappa: Option<f64>,
    /// `3κ log X / η`, the leading term the excluded mass is compared with.
    pub reference: Option<f64>,
}

/// Classify each prime `p <= Q` as η-uniform when
/// `sum_a A(a, p)² <= (2 + η)|A|²/p`.
pub fn uniform_fibre_report(a: &IntegerSet, eta: f64, q: u64) -> Result<UniformFibreReport> {
    if !(eta > 0.0) {
        return Err(Error::domain(format!("η = {eta} must be positive")));
    }
    let size = a.len() as f64;
    let primes = if q >= 2 {
        primes_up_to(q)?.primes().to_vec()
    } else {
        Vec::new()
    };
    let flags = exec::map(&primes, |&p| {
        let (_, fibres) = reduce_mod(a, p);
        fibres.sum_of_squares() as f64 * p as f64 <= (2.0 + eta) * size * size
    });
    let mut uniform = Vec::new();
    let mut non_uniform = Vec::new();
    for (&p, ok) in primes.iter().zip(flags) {
        if ok {
            uniform.push(p);
        } else {
            non_uniform.push(p);
        }
    }
    let root = isqrt(a.bound());
    let excluded_mass = non_uniform
        .iter()
        .filter(|&&p| p <= root)
        .map(|&p| (p as f64).ln() / p as f64)
        .sum();
    let log_x = (a.bound() as f64).ln();
    let kappa = (!a.is_empty() && a.bound() > 1).then(|| 0.5 - size.ln() / log_x);
    Ok(UniformFibreReport {
        eta,
        uniform,
        non_uniform,
        excluded_mass,
        kappa,
        reference: kappa.map(|k| 3.0 * k * log_x / eta),
    })
}

/// The miss-count bound `(2N + Q²) / sum_{q <= Q sqfree} prod_{p|q} w(p)/p`
/// for a set in `[-N, N]` missing `w(p)` classes mod each prime, at
/// `Q = ⌊√(2N)⌋`.
pub fn miss_count_bound(miss_counts: &dyn Fn(u64) -> u64, n: u64) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    let two_n = n
        .checked_mul(2)
        .ok_or_else(|| Error::Overflow(format!("2N with N = {n}")))?;
    let q = isqrt(two_n).max(1);
    let qs = usize::try_from(q).map_err(|_| Error::Overflow(format!("Q = {q}")))?;
    let mut ratio = vec![0.0f64; qs + 1];
    let mut per_prime = Vec::new();
    if q >= 2 {
        for &p in primes_up_to(q)?.primes() {
            let w = miss_counts(p);
            if w >= p {
                return Err(Error::domain(format!("w({p}) = {w} must be less than p")));
            }
            ratio[p as usize] = w as f64 / p as f64;
            if w > 0 {
                per_prime.push(PrimeTerm {
                    p,
                    term: ratio[p as usize],
                });
            }
        }
    }
    let denominator = squarefree_product_sum(&ratio, qs);
    let numerator = (two_n + q * q) as f64;
    Ok(BoundReport {
        bound: positive_ratio(numerator, denominator),
        denominator,
        crude_bound: None,
        per_prime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairOccupancy {
    pub p: u64,
    pub alpha: f64,
    pub beta: f64,
    /// `(log p / p)((1 - 2α)² + (1 - 2β)²)`.
    pub term: f64,
    /// `|A mod p| + |B mod p| <= p + 1`.
    pub sum_condition: bool,
    /// Either occupancy deviates from one half by more than `ε`.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOccupancyScan {
    pub epsilon: f64,
    pub per_prime: Vec<PairOccupancy>,
    pub deficit_sum: f64,
    /// Fraction of scanned primes where both `α_p, β_p <= 1/2 + ε`.
    pub half_fraction: f64,
}

/// Occupancy densities `α_p = |A mod p|/p`, `β_p = |B mod p|/p` over the
/// primes in `[lo, hi]`, with the weighted deficit sum.
pub fn pair_occupancy_scan(
    a: &IntegerSet,
    b: &IntegerSet,
    window: (u64, u64),
    epsilon: f64,
) -> Result<PairOccupancyScan> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::EmptyRange(format!("prime window [{lo}, {hi}]")));
    }
    let table = primes_up_to(hi.max(2))?;
    let primes = table.window(lo, hi).to_vec();
    let per_prime = exec::map(&primes, |&p| {
        let ra = reduce_mod(a, p).0.len() as u64;
        let rb = reduce_mod(b, p).0.len() as u64;
        let alpha = ra as f64 / p as f64;
        let beta = rb as f64 / p as f64;
        let term = (p as f64).ln() / p as f64
            * ((1.0 - 2.0 * alpha).powi(2) + (1.0 - 2.0 * beta).powi(2));
        PairOccupancy {
            p,
            alpha,
            beta,
            term,
            sum_condition: ra + rb <= p + 1,
            flagged: (alpha - 0.5).abs() > epsilon || (beta - 0.5).abs() > epsilon,
        }
    });
    let deficit_sum = per_prime.iter().map(|o| o.term).sum();
    let half = per_prime
        .iter()
        .filter(|o| o.alpha <= 0.5 + epsilon && o.beta <= 0.5 + epsilon)
        .count();
    let half_fraction = if per_prime.is_empty() {
        0.0
    } else {
        half as f64 / per_prime.len() as f64
    };
    Ok(PairOccupancyScan {
        epsilon,
        per_prime,
        deficit_sum,
        half_fraction,
    })
}
