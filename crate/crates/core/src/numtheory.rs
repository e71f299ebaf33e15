//! Primes, quadratic-residue symbols, squarefree tests and the multiplicative
//! and logarithmic prime sums that feed every sieve bound.

use crate::{Error, Result};

/// All primes up to `limit`, generated once and shared read-only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

/// Sieve of Eratosthenes over `[0, limit]`.
pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyRange(format!("no primes up to {limit}")));
    }
    let n = usize::try_from(limit).map_err(|_| Error::Overflow(format!("limit {limit}")))?;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    Ok(PrimeTable { limit, primes })
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes `<= q`. Values of `q` past the limit are clamped.
    pub fn up_to(&self, q: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= q);
        &self.primes[..end]
    }

    /// Primes in the closed window `[lo, hi]`.
    pub fn window(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p < lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        &self.primes[start..end.max(start)]
    }

    /// pi(x), for x within the table.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.up_to(x).len()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }
}

/// Deterministic trial-division primality, used to validate inputs that do
/// not come from a table.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Jacobi symbol `(a | n)` for odd positive `n`. `(a | 1) = 1`.
pub fn jacobi(a: i64, n: i64) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::domain(format!(
            "Jacobi symbol needs an odd positive modulus, got {n}"
        )));
    }
    let n = n as u64;
    let a = (a as i128).rem_euclid(n as i128) as u64;
    Ok(jacobi_u64(a, n))
}

/// Jacobi symbol on already-reduced unsigned inputs; `n` must be odd.
pub(crate) fn jacobi_u64(mut a: u64, mut n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut sign = 1i8;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

pub fn is_squarefree(n: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::domain("squarefree test of 0"));
    }
    let mut m = n;
    let mut d = 2u64;
    while d.saturating_mul(d) <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return Ok(false);
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    Ok(true)
}

/// Smallest-prime-factor table for `[0, n]` (`spf[0] = spf[1] = 0`).
pub(crate) fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

/// Möbius function on `[0, n]` (`mu[0] = 0`).
pub fn mobius_table(n: usize) -> Vec<i8> {
    let spf = smallest_prime_factors(n);
    let mut mu = vec![0i8; n + 1];
    if n >= 1 {
        mu[1] = 1;
    }
    for i in 2..=n {
        let p = spf[i] as usize;
        let m = i / p;
        mu[i] = if m.is_multiple_of(p) { 0 } else { -mu[m] };
    }
    mu
}

/// `sum_{p <= q, p selected} log p / p`, accumulated in ascending prime order.
pub fn mertens_log_sum(
    table: &PrimeTable,
    q: u64,
    subset: Option<&dyn Fn(u64) -> bool>,
) -> Result<f64> {
    if q > table.limit() {
        return Err(Error::Range(format!(
            "Q = {q} exceeds prime table limit {}",
            table.limit()
        )));
    }
    Ok(table
        .up_to(q)
        .iter()
        .filter(|&&p| subset.is_none_or(|keep| keep(p)))
        .map(|&p| (p as f64).ln() / p as f64)
        .sum())
}

/// `sum_{q <= n squarefree} prod_{p | q} w(p)/p`, the partial sum of the
/// multiplicative function `g(p) = w(p)/p` supported on squarefree integers.
/// The `q = 1` term contributes 1.
pub fn multiplicative_partial_sum(miss_counts: &dyn Fn(u64) -> f64, n: u64) -> Result<f64> {
    let n = usize::try_from(n).map_err(|_| Error::Overflow(format!("N = {n}")))?;
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    let spf = smallest_prime_factors(n);
    let mut ratio = vec![0.0f64; n + 1];
    for p in 2..=n {
        if spf[p] as usize == p {
            let w = miss_counts(p as u64);
            if !(0.0..p as f64).contains(&w) {
                return Err(Error::domain(format!(
                    "miss count w({p}) = {w} must lie in [0, p)"
                )));
            }
            ratio[p] = w / p as f64;
        }
    }
    let mut g = vec![0.0f64; n + 1];
    g[1] = 1.0;
    let mut total = 1.0;
    for q in 2..=n {
        let p = spf[q] as usize;
        let m = q / p;
        g[q] = if m.is_multiple_of(p) { 0.0 } else { g[m] * ratio[p] };
        total += g[q];
    }
    Ok(total)
}

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    n.isqrt()
}

pub fn isqrt_u128(n: u128) -> u128 {
    n.isqrt()
}

/// True iff `n` is the square of an integer.
pub fn is_perfect_square(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt_u128(n as u128);
    r * r == n as u128
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_primes(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&n| (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn small_tables() {
        assert_eq!(primes_up_to(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(primes_up_to(2).unwrap().primes(), &[2]);
        assert_eq!(primes_up_to(100).unwrap().len(), trial_primes(100).len());
        assert_eq!(primes_up_to(100).unwrap().len(), 25);
        assert!(matches!(primes_up_to(1), Err(Error::EmptyRange(_))));
    }

    #[test]
    fn table_matches_trial_division() {
        let t = primes_up_to(5000).unwrap();
        assert_eq!(t.primes(), trial_primes(5000).as_slice());
        assert!(t.primes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(t.window(10, 30), &[11, 13, 17, 19, 23, 29]);
        assert!(t.window(24, 28).is_empty());
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(1, 3).unwrap(), 1);
        assert_eq!(jacobi(2, 7).unwrap(), 1);
        assert_eq!(jacobi(3, 5).unwrap(), -1);
        assert_eq!(jacobi(5, 1).unwrap(), 1);
        assert_eq!(jacobi(-1, 5).unwrap(), 1);
        assert_eq!(jacobi(-1, 7).unwrap(), -1);
        assert_eq!(jacobi(6, 9).unwrap(), 0);
        assert!(jacobi(3, 8).is_err());
        assert!(jacobi(3, 0).is_err());
        assert!(jacobi(3, -3).is_err());
    }

    #[test]
    fn jacobi_is_legendre_for_small_primes() {
        for &p in primes_up_to(101).unwrap().primes().iter().skip(1) {
            let squares: Vec<bool> = {
                let mut s = vec![false; p as usize];
                for x in 1..p {
                    s[(x * x % p) as usize] = true;
                }
                s
            };
            for a in -2 * p as i64..2 * p as i64 {
                let r = a.rem_euclid(p as i64) as usize;
                let expect = if r == 0 {
                    0
                } else if squares[r] {
                    1
                } else {
                    -1
                };
                assert_eq!(jacobi(a, p as i64).unwrap(), expect, "({a}|{p})");
            }
        }
    }

    #[test]
    fn squarefree_examples() {
        assert!(is_squarefree(1).unwrap());
        assert!(!is_squarefree(12).unwrap());
        assert!(is_squarefree(30).unwrap());
        assert!(!is_squarefree(49).unwrap());
        assert!(is_squarefree(0).is_err());
        let mu = mobius_table(1000);
        for n in 1..=1000u64 {
            assert_eq!(is_squarefree(n).unwrap(), mu[n as usize] != 0, "{n}");
        }
    }

    #[test]
    fn mertens_examples() {
        let t = primes_up_to(1000).unwrap();
        let oracle10 = [2.0f64, 3.0, 5.0, 7.0].iter().map(|p| p.ln() / p).sum::<f64>();
        assert!((mertens_log_sum(&t, 10, None).unwrap() - oracle10).abs() < 1e-12);
        assert!((oracle10 - 1.3127).abs() < 1e-4);
        assert!((mertens_log_sum(&t, 2, None).unwrap() - 2f64.ln() / 2.0).abs() < 1e-15);
        let oracle100: f64 = trial_primes(100).iter().map(|&p| (p as f64).ln() / p as f64).sum();
        let s100 = mertens_log_sum(&t, 100, None).unwrap();
        assert!((s100 - oracle100).abs() < 1e-12);
        assert!((s100 - 3.37).abs() < 0.01);
        let odd = |p: u64| p != 2;
        let s = mertens_log_sum(&t, 10, Some(&odd)).unwrap();
        assert!((s - (oracle10 - 2f64.ln() / 2.0)).abs() < 1e-12);
        assert!(matches!(mertens_log_sum(&t, 1001, None), Err(Error::Range(_))));
    }

    #[test]
    fn mertens_stays_near_log() {
        let t = primes_up_to(1_000_000).unwrap();
        let mut prev = 0.0;
        for q in [100u64, 1000, 10_000, 100_000, 1_000_000] {
            let s = mertens_log_sum(&t, q, None).unwrap();
            assert!(s >= prev);
            assert!((s - (q as f64).ln()).abs() <= 2.0, "Q = {q}: {s}");
            prev = s;
        }
    }

    #[test]
    fn multiplicative_sum_examples() {
        // Squarefree q <= 10 are 1, 2, 3, 5, 6, 7, 10.
        let oracle = 1.0 + 1.0 / 2.0 + 1.0 / 3.0 + 1.0 / 5.0 + 1.0 / 6.0 + 1.0 / 7.0 + 1.0 / 10.0;
        let s = multiplicative_partial_sum(&|_| 1.0, 10).unwrap();
        assert!((s - oracle).abs() < 1e-12);
        assert_eq!(multiplicative_partial_sum(&|_| 0.0, 100).unwrap(), 1.0);
        let w2 = |p: u64| if p == 2 { 1.0 } else { 0.0 };
        assert_eq!(multiplicative_partial_sum(&w2, 10).unwrap(), 1.5);
        assert!(multiplicative_partial_sum(&|p| p as f64, 10).is_err());
    }

    #[test]
    fn multiplicative_sum_grows_like_log_power() {
        for k in [1.0f64, 2.0] {
            let w = move |p: u64| if (p as f64) > k { k } else { 0.0 };
            let small = multiplicative_partial_sum(&w, 100).unwrap();
            let large = multiplicative_partial_sum(&w, 10_000).unwrap();
            let predicted = 2f64.powf(k);
            let ratio = large / small;
            assert!(ratio / predicted <= 8.0 && predicted / ratio <= 8.0, "k={k}: {ratio}");
        }
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..10_000u64 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        assert!(is_perfect_square(81));
        assert!(!is_perfect_square(89));
        assert!(!is_perfect_square(-4));
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }
}
