//! Rational quadratics `ψ(x) = (ax² + bx + c)/d`, their integer value sets
//! and reductions, quasisquare censuses, and the local obstructions used
//! when comparing sets with quadratic images.
//!
//! All tests are phrased through the integer `D = b² - 4ac`: `n ∈ ψ(ℚ)` iff
//! `4adn + D` is a perfect square, because `4ad ψ(t) + D = (2at + b)²`.
//! (If `Δ` is the discriminant of `ψ` as a rational polynomial, `D = Δd²`.)

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::numtheory::{is_perfect_square, is_prime, is_squarefree, isqrt_u128, jacobi, primes_up_to};
use crate::residue::{mod_inverse, reduce_mod, IntegerSet, ResidueSet};
use crate::rng::Rng;
use crate::{exec, Error, Result};

/// `(ax² + bx + c)/d`, normalized so that `gcd(a, b, c, d) = 1` and `d > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalQuadratic {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl RationalQuadratic {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a == 0 {
            return Err(Error::domain("leading coefficient must be nonzero"));
        }
        if d == 0 {
            return Err(Error::domain("denominator must be nonzero"));
        }
        let g = a.gcd(&b).gcd(&c).gcd(&d);
        let s = if d < 0 { -1 } else { 1 };
        Ok(Self {
            a: s * a / g,
            b: s * b / g,
            c: s * c / g,
            d: s * d / g,
        })
    }

    pub fn coefficients(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn height(&self) -> u64 {
        [self.a, self.b, self.c, self.d]
            .iter()
            .map(|v| v.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// `D = b² - 4ac`.
    pub fn discriminant(&self) -> i128 {
        self.b as i128 * self.b as i128 - 4 * self.a as i128 * self.c as i128
    }

    fn four_ad(&self) -> i128 {
        4 * self.a as i128 * self.d as i128
    }

    /// `ψ(t)` as an exact fraction `(numerator, d)`.
    pub fn eval_integer(&self, t: i64) -> (i128, i128) {
        let t = t as i128;
        (
            self.a as i128 * t * t + self.b as i128 * t + self.c as i128,
            self.d as i128,
        )
    }

    /// `ψ̃(x) = ψ(x/a) = (x² + bx + ac)/(ad)`, renormalized.
    pub fn tilde(&self) -> Result<RationalQuadratic> {
        let ac = self.a.checked_mul(self.c);
        let ad = self.a.checked_mul(self.d);
        match (ac, ad) {
            (Some(ac), Some(ad)) => RationalQuadratic::new(1, self.b, ac, ad),
            _ => Err(Error::Overflow("ψ̃ coefficients exceed 64 bits".into())),
        }
    }

    /// Is some integer a value of `ψ` at a rational point?
    pub fn has_integer_values(&self) -> bool {
        let m = self.four_ad().unsigned_abs();
        let d = self.discriminant().rem_euclid(m as i128) as u128;
        (0..m).any(|r| r * r % m == d)
    }
}

impl fmt::Display for RationalQuadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = |v: i64| if v < 0 { '-' } else { '+' };
        write!(
            f,
            "({}*x^2{}{}*x{}{})/{}",
            self.a,
            sign(self.b),
            self.b.unsigned_abs(),
            sign(self.c),
            self.c.unsigned_abs(),
            self.d
        )
    }
}

impl FromStr for RationalQuadratic {
    type Err = Error;

    /// Parses `"(a*x^2+b*x+c)/d"`; terms may be reordered or omitted and
    /// unit coefficients may be implicit. Without parentheses `d = 1`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |why: &str| Error::Parse(format!("`{s}`: {why}"));
        let (body, d) = match s.strip_prefix('(') {
            Some(rest) => {
                let (body, den) = rest
                    .rsplit_once(")/")
                    .ok_or_else(|| bad("expected `(...)/d`"))?;
                let d: i64 = den.parse().map_err(|_| bad("denominator is not an integer"))?;
                (body.to_string(), d)
            }
            None => (s.clone(), 1),
        };
        let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in body.char_indices() {
            if (ch == '+' || ch == '-') && i > 0 && !body[..i].ends_with(['+', '-']) {
                terms.push(&body[start..i]);
                start = i;
            }
        }
        terms.push(&body[start..]);
        for term in terms {
            let term = term.strip_prefix('+').unwrap_or(term);
            if term.is_empty() {
                return Err(bad("empty term"));
            }
            let (coeff, power) = if let Some(cf) = term.strip_suffix("x^2") {
                (cf, 2)
            } else if let Some(cf) = term.strip_suffix('x') {
                (cf, 1)
            } else {
                (term, 0)
            };
            let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
            let value: i64 = match coeff {
                "" if power > 0 => 1,
                "-" if power > 0 => -1,
                _ => coeff.parse().map_err(|_| bad("coefficient is not an integer"))?,
            };
            let slot = match power {
                2 => &mut a,
                1 => &mut b,
                _ => &mut c,
            };
            *slot = slot.checked_add(value).ok_or_else(|| bad("coefficient overflow"))?;
        }
        RationalQuadratic::new(a, b, c, d)
    }
}

impl Serialize for RationalQuadratic {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalQuadratic {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Is `n` a value of `ψ` at a rational point?
pub fn membership_integer(psi: &RationalQuadratic, n: i64) -> bool {
    is_perfect_square(psi.four_ad() * n as i128 + psi.discriminant())
}

/// Integer values `n ∈ [lo, hi]` of `ψ` on `ℚ`, ascending, found by scanning
/// square roots `m >= 0` of `4adn + D`.
pub fn integer_values_in(psi: &RationalQuadratic, lo: i64, hi: i64) -> Vec<i64> {
    if lo > hi {
        return Vec::new();
    }
    let m4 = psi.four_ad();
    let disc = psi.discriminant();
    let top = (m4 * lo as i128 + disc).max(m4 * hi as i128 + disc);
    if top < 0 {
        return Vec::new();
    }
    let m_max = isqrt_u128(top as u128) as i128;
    let mut out: Vec<i64> = (0..=m_max)
        .filter_map(|m| {
            let num = m * m - disc;
            (num % m4 == 0).then(|| num / m4)
        })
        .filter(|&n| n >= lo as i128 && n <= hi as i128)
        .map(|n| n as i64)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// `ψ(ℚ) ∩ ℤ ∩ [1, X]`.
pub fn quadratic_image_set(psi: &RationalQuadratic, x: u64) -> Result<IntegerSet> {
    let hi = i64::try_from(x).map_err(|_| Error::Overflow(format!("X = {x}")))?;
    let values = integer_values_in(psi, 1, hi);
    IntegerSet::new(x.max(1), values.into_iter().map(|n| n as u64).collect())
}

/// Reduction of `ψ(ℚ) ∩ ℤ` modulo `p`. The value `n(m) = (m² - D)/4ad` is
/// `p`-periodic in `m` with period `4|ad|p`, so one period of `m` suffices.
pub fn image_mod_p(psi: &RationalQuadratic, p: u64) -> ResidueSet {
    let m4 = psi.four_ad();
    let disc = psi.discriminant();
    let period = m4.unsigned_abs() * p as u128;
    let mut out = ResidueSet::empty(p);
    for m in 0..period as i128 {
        let num = m * m - disc;
        if num % m4 == 0 {
            out.insert((num / m4).rem_euclid(p as i128) as u64);
        }
    }
    out
}

/// `{ψ̃(x) mod p : x ∈ ℤ/pℤ}` for `ψ̃ = (x² + bx + ac)/(ad)`, `p ∤ ad`.
fn tilde_image_mod_p(psi: &RationalQuadratic, p: u64) -> ResidueSet {
    let (a, b, c, d) = psi.coefficients();
    let pi = p as i128;
    let ad = (a as i128 * d as i128).rem_euclid(pi) as u64;
    let inv = mod_inverse(ad, p) as i128;
    let ac = a as i128 * c as i128;
    ResidueSet::from_members(
        p,
        (0..pi).map(|x| ((x * x + b as i128 * x + ac).rem_euclid(pi) * inv % pi) as u64),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixReport {
    pub psi: RationalQuadratic,
    pub tilde: RationalQuadratic,
    pub p: u64,
    pub search_range: u64,
    pub tilde_residues: ResidueSet,
    pub integer_residues: ResidueSet,
    pub reductions_equal: bool,
    /// Integer values of `ψ` in the range that are not values of `ψ̃` on `ℤ`.
    pub containment_failures: Vec<i64>,
}

/// Does `n` equal `ψ̃(u)` for some integer `u`? Solved exactly:
/// `u = (-b ± m)/2` with `m² = 4adn + D`.
pub fn tilde_contains(psi: &RationalQuadratic, n: i64) -> bool {
    let (a, b, c, d) = psi.coefficients();
    let s = psi.four_ad() * n as i128 + psi.discriminant();
    if !is_perfect_square(s) {
        return false;
    }
    let m = isqrt_u128(s as u128) as i128;
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    [-b + m, -b - m]
        .into_iter()
        .filter(|v| v % 2 == 0)
        .map(|v| v / 2)
        .any(|u| u * u + b * u + a * c == n as i128 * a * d)
}

/// Compare the reductions mod `p` of `ψ(ℚ) ∩ ℤ ∩ [-R, R]` and of `ψ̃(ℤ)`,
/// and check `ψ(ℚ) ∩ ℤ ∩ [-R, R] ⊆ ψ̃(ℤ)` element by element.
///
/// `None` for `search_range` picks `R` large enough that the scanned square
/// roots cover a full period `4|ad|p`.
pub fn verify_appendix_lemma(
    psi: &RationalQuadratic,
    p: u64,
    search_range: Option<u64>,
) -> Result<AppendixReport> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let (a, _, _, d) = psi.coefficients();
    if (2 * a as i128 * d as i128) % p as i128 == 0 {
        return Err(Error::ExcludedPrime {
            p,
            reason: "p divides 2ad".into(),
        });
    }
    if !psi.has_integer_values() {
        return Err(Error::Precondition(format!("{psi} takes no integer values")));
    }
    let m4 = psi.four_ad().unsigned_abs();
    let full_period = m4 * p as u128;
    let default_range = (full_period * full_period + psi.discriminant().unsigned_abs()) / m4 + 1;
    let r = match search_range {
        Some(r) => r,
        None => u64::try_from(default_range).map_err(|_| Error::Overflow("search range".into()))?,
    };
    let ri = i64::try_from(r).map_err(|_| Error::Overflow(format!("R = {r}")))?;
    let values = integer_values_in(psi, -ri, ri);
    let integer_residues = ResidueSet::from_signed(p, values.iter().copied());
    let tilde_residues = tilde_image_mod_p(psi, p);
    let containment_failures = values.iter().copied().filter(|&n| !tilde_contains(psi, n)).collect();
    Ok(AppendixReport {
        psi: *psi,
        tilde: psi.tilde()?,
        p,
        search_range: r,
        reductions_equal: integer_residues == tilde_residues,
        tilde_residues,
        integer_residues,
        containment_failures,
    })
}

/// A random quadratic of height at most `height` taking integer values
/// (rejection sampled).
pub fn random_quadratic(rng: &mut Rng, height: i64) -> RationalQuadratic {
    loop {
        let a = rng.gen_range(-height..=height);
        let b = rng.gen_range(-height..=height);
        let c = rng.gen_range(-height..=height);
        let d = rng.gen_range(-height..=height);
        if a == 0 || d == 0 {
            continue;
        }
        let psi = RationalQuadratic::new(a, b, c, d).expect("nonzero a and d");
        if psi.has_integer_values() {
            return psi;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum CensusMode {
    All,
    Fraction { theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasisquareCensus {
    pub y: u64,
    pub primes: Vec<u64>,
    pub mode: CensusMode,
    pub hits: Vec<u64>,
    pub count: usize,
    /// `8 (6 log Y / η)^{3 log Y / log Z}` with `η = |P| log Z / Z`, `Z = min P`.
    pub bound_value: f64,
    pub eta: f64,
    /// `P ⊂ [Z, 2Z]`, `Y >= Z > 2` and all-primes mode.
    pub bound_applies: bool,
    pub min_nontrivial: Option<u64>,
    /// `log q_min / log Y`.
    pub min_exponent: Option<f64>,
}

/// Squarefree `q <= Y` that are quadratic residues modulo every prime in
/// `primes` (or at least a fraction `θ` of them).
pub fn quasisquares(y: u64, primes: &[u64], mode: CensusMode) -> Result<QuasisquareCensus> {
    if y == 0 {
        return Err(Error::domain("Y must be positive"));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != primes.len() {
        return Err(Error::domain("primes must be distinct"));
    }
    if let Some(&p) = sorted.iter().find(|&&p| p == 2 || !is_prime(p)) {
        return Err(Error::domain(format!("{p} is not an odd prime")));
    }
    let needed = match mode {
        CensusMode::All => sorted.len(),
        CensusMode::Fraction { theta } => {
            if !(theta > 0.5 && theta <= 1.0) {
                return Err(Error::domain(format!("θ = {theta} must lie in (1/2, 1]")));
            }
            (theta * sorted.len() as f64 - 1e-9).ceil().max(0.0) as usize
        }
    };
    let hits = exec::filter_map_range(1..y + 1, |q| {
        if !is_squarefree(q).unwrap_or(false) {
            return None;
        }
        let residues = sorted
            .iter()
            .filter(|&&p| jacobi(q as i64 % p as i64, p as i64) == Ok(1))
            .count();
        (residues >= needed).then_some(q)
    });
    let (bound_value, eta, bound_applies) = match sorted.first() {
        Some(&z) => {
            let zf = z as f64;
            let eta = sorted.len() as f64 * zf.ln() / zf;
            let ly = (y as f64).ln();
            let bound = 8.0 * (6.0 * ly / eta).powf(3.0 * ly / zf.ln());
            let applies = matches!(mode, CensusMode::All)
                && z > 2
                && y >= z
                && *sorted.last().unwrap() <= 2 * z;
            (bound, eta, applies)
        }
        None => (f64::INFINITY, 0.0, false),
    };
    let min_nontrivial = hits.iter().copied().find(|&q| q > 1);
    Ok(QuasisquareCensus {
        y,
        primes: sorted,
        mode,
        count: hits.len(),
        hits,
        bound_value,
        eta,
        bound_applies,
        min_nontrivial,
        min_exponent: min_nontrivial.filter(|_| y > 1).map(|q| (q as f64).ln() / (y as f64).ln()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPrime {
    pub p: u64,
    pub t_size: usize,
    pub u_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub psi: RationalQuadratic,
    pub threshold: f64,
    pub per_prime: Vec<StabilityPrime>,
    pub a_psi: Vec<u64>,
    pub exceptional: Vec<u64>,
    /// `(x, weighted fraction of window primes with x mod p ∈ T_p)`.
    pub fractions: Vec<(u64, f64)>,
}

/// Split `A` into `A_ψ` (elements landing in `T_p = A mod p ∩ ψ(ℚ)∩ℤ mod p`
/// for at least `threshold` of the window primes, weighted by `log p / p`)
/// and the rest `E`.
pub fn stability_classifier(
    a: &IntegerSet,
    psi: &RationalQuadratic,
    window: (u64, u64),
    threshold: f64,
) -> Result<StabilityReport> {
    let (lo, hi) = window;
    if lo > hi {
        return Err(Error::EmptyRange(format!("prime window [{lo}, {hi}]")));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::domain(format!("threshold {threshold} must lie in [0, 1]")));
    }
    let table = primes_up_to(hi.max(2))?;
    let primes = table.window(lo, hi).to_vec();
    if primes.is_empty() {
        return Err(Error::EmptyRange(format!("no primes in [{lo}, {hi}]")));
    }
    if let Some(&p) = primes.iter().find(|&&p| p <= 2 * psi.height()) {
        return Err(Error::ExcludedPrime {
            p,
            reason: format!("window primes must exceed 2·height = {}", 2 * psi.height()),
        });
    }
    let t_sets = exec::map(&primes, |&p| {
        let occupied = reduce_mod(a, p).0;
        occupied.intersection(&image_mod_p(psi, p))
    });
    let per_prime = primes
        .iter()
        .zip(&t_sets)
        .map(|(&p, t)| StabilityPrime {
            p,
            t_size: t.len(),
            u_size: reduce_mod(a, p).0.len() - t.len(),
        })
        .collect();
    let weights: Vec<f64> = primes.iter().map(|&p| (p as f64).ln() / p as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut a_psi = Vec::new();
    let mut exceptional = Vec::new();
    let mut fractions = Vec::with_capacity(a.len());
    for &x in a.elements() {
        let inside: f64 = primes
            .iter()
            .zip(&t_sets)
            .zip(&weights)
            .filter(|((&p, t), _)| t.contains(x % p))
            .map(|(_, w)| w)
            .sum();
        let frac = inside / total;
        fractions.push((x, frac));
        if frac >= threshold {
            a_psi.push(x);
        } else {
            exceptional.push(x);
        }
    }
    Ok(StabilityReport {
        psi: *psi,
        threshold,
        per_prime,
        a_psi,
        exceptional,
        fractions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldbachObstruction {
    pub p: u64,
    /// `A + B` contains a multiple of `p`.
    pub has_multiple: bool,
    /// `|A mod p| + |B mod p|`.
    pub occupancy_sum: u64,
    /// No multiple implies `occupancy_sum <= p`.
    pub implication_holds: bool,
}

/// Does `A + B` meet `0 mod p`? Decided as `(A mod p) ∩ (-B mod p) ≠ ∅`.
pub fn goldbach_obstruction(a: &IntegerSet, b: &IntegerSet, p: u64) -> Result<GoldbachObstruction> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let ra = reduce_mod(a, p).0;
    let rb = reduce_mod(b, p).0;
    let has_multiple = !ra.intersection(&rb.negate()).is_empty();
    let occupancy_sum = (ra.len() + rb.len()) as u64;
    Ok(GoldbachObstruction {
        p,
        has_multiple,
        occupancy_sum,
        implication_holds: has_multiple || occupancy_sum <= p,
    })
}

fn odd_prime_factors(mut n: u64, out: &mut Vec<u64>) {
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            if f != 2 {
                out.push(f);
            }
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 2 {
        out.push(n);
    }
}

/// Primes `p <= Y` with `p ≡ 1 (mod 8)` and `(q | p) = 1` for each odd prime
/// `q` dividing `a_A a_B d_A d_B`. For each, `-a_A a_B d_A d_B` is then a
/// square mod `p` (checked).
pub fn split_discriminant_primes(
    psi_a: &RationalQuadratic,
    psi_b: &RationalQuadratic,
    y: u64,
) -> Result<Vec<u64>> {
    let (aa, _, _, da) = psi_a.coefficients();
    let (ab, _, _, db) = psi_b.coefficients();
    let mut qs = Vec::new();
    for v in [aa, ab, da, db] {
        odd_prime_factors(v.unsigned_abs(), &mut qs);
    }
    qs.sort_unstable();
    qs.dedup();
    if y < 2 {
        return Ok(Vec::new());
    }
    let table = primes_up_to(y)?;
    let mut out = Vec::new();
    for &p in table.primes().iter().filter(|&&p| p % 8 == 1) {
        let ok = qs.iter().all(|&q| jacobi(q as i64, p as i64) == Ok(1));
        if !ok {
            continue;
        }
        let pi = p as i128;
        let prod = [aa, ab, da, db]
            .iter()
            .fold(1i128, |acc, &v| acc * (v as i128).rem_euclid(pi) % pi);
        let neg = (-prod).rem_euclid(pi) as i64;
        if jacobi(neg, p as i64)? != 1 {
            return Err(Error::InvariantViolation(format!(
                "-a_A a_B d_A d_B is not a square mod {p}"
            )));
        }
        out.push(p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::squares_set;
    use crate::rng::rng_from_seed;

    fn q(s: &str) -> RationalQuadratic {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        let tri = q("(x^2+x)/2");
        assert_eq!(tri.coefficients(), (1, 1, 0, 2));
        assert_eq!(tri.to_string(), "(1*x^2+1*x+0)/2");
        assert_eq!(q(&tri.to_string()), tri);
        assert_eq!(q("(2*x^2-3*x+1)/-4").coefficients(), (-2, 3, -1, 4));
        assert_eq!(q("(4*x^2+2)/2").coefficients(), (2, 0, 1, 1));
        assert_eq!(q("x^2").coefficients(), (1, 0, 0, 1));
        assert!("(x^2+1)/0".parse::<RationalQuadratic>().is_err());
        assert!("(3*x+1)/2".parse::<RationalQuadratic>().is_err());
        assert!("(x^2+y)/2".parse::<RationalQuadratic>().is_err());
    }

    #[test]
    fn membership_examples() {
        let sq = q("x^2");
        assert!(membership_integer(&sq, 9));
        assert!(!membership_integer(&sq, 8));
        let tri = q("(x^2+x)/2");
        assert!(membership_integer(&tri, 10));
        assert!(!membership_integer(&tri, 11));
        assert!(!membership_integer(&sq, -4));
    }

    #[test]
    fn image_examples() {
        assert_eq!(quadratic_image_set(&q("x^2"), 20).unwrap().elements(), &[1, 4, 9, 16]);
        assert_eq!(
            quadratic_image_set(&q("(x^2+x)/2"), 30).unwrap().elements(),
            &[1, 3, 6, 10, 15, 21, 28]
        );
        let one = quadratic_image_set(&q("(x^2+x)/2"), 1).unwrap();
        assert_eq!(one.elements(), &[1]);
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(q("x^2").tilde().unwrap(), q("x^2"));
        assert_eq!(q("2*x^2+1").tilde().unwrap().coefficients(), (1, 0, 2, 2));
    }

    #[test]
    fn appendix_examples() {
        let r = verify_appendix_lemma(&q("x^2"), 7, None).unwrap();
        assert_eq!(r.tilde_residues.members(), vec![0, 1, 2, 4]);
        assert!(r.reductions_equal);
        let r = verify_appendix_lemma(&q("(x^2+x)/2"), 5, None).unwrap();
        assert_eq!(r.integer_residues.members(), vec![0, 1, 3]);
        assert!(r.reductions_equal && r.containment_failures.is_empty());
        assert!(matches!(
            verify_appendix_lemma(&q("(x^2+x)/2"), 2, None),
            Err(Error::ExcludedPrime { p: 2, .. })
        ));
    }

    #[test]
    fn image_mod_p_matches_brute_force_reduction() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let psi = random_quadratic(&mut rng, 6);
            for p in [7u64, 11, 13] {
                let brute = ResidueSet::from_signed(p, integer_values_in(&psi, -200_000, 200_000));
                assert_eq!(image_mod_p(&psi, p), brute, "{psi} mod {p}");
            }
        }
    }

    #[test]
    fn quasisquare_examples() {
        let c = quasisquares(15, &[3], CensusMode::All).unwrap();
        assert_eq!(c.hits, vec![1, 7, 10, 13]);
        let c = quasisquares(50, &[5, 7, 11], CensusMode::Fraction { theta: 0.6 }).unwrap();
        assert_eq!(c.hits[0], 1);
        assert!(quasisquares(50, &[2, 3], CensusMode::All).is_err());
        assert!(quasisquares(50, &[3, 3], CensusMode::All).is_err());
    }

    #[test]
    fn stability_examples() {
        let sq = q("x^2");
        let a = squares_set(10_000);
        let r = stability_classifier(&a, &sq, (11, 97), 0.97).unwrap();
        assert!(r.exceptional.is_empty());
        let with3 = a.union(&IntegerSet::new(3, vec![3]).unwrap());
        let r = stability_classifier(&with3, &sq, (11, 97), 0.97).unwrap();
        assert_eq!(r.exceptional, vec![3]);
        let r = stability_classifier(&IntegerSet::empty(10), &sq, (11, 97), 0.97).unwrap();
        assert!(r.a_psi.is_empty() && r.exceptional.is_empty());
    }

    #[test]
    fn goldbach_examples() {
        let one = IntegerSet::new(1, vec![1]).unwrap();
        assert!(goldbach_obstruction(&one, &one, 2).unwrap().has_multiple);
        let b = IntegerSet::new(3, vec![1, 3]).unwrap();
        let r = goldbach_obstruction(&one, &b, 3).unwrap();
        assert!(!r.has_multiple);
        assert_eq!(r.occupancy_sum, 3);
        assert!(r.implication_holds);
    }

    #[test]
    fn split_primes_examples() {
        let sq = q("x^2");
        assert_eq!(split_discriminant_primes(&sq, &sq, 100).unwrap(), vec![17, 41, 73, 89, 97]);
        assert!(split_discriminant_primes(&sq, &sq, 16).unwrap().is_empty());
        let three = q("3*x^2+1");
        let ps = split_discriminant_primes(&three, &sq, 1000).unwrap();
        assert!(!ps.is_empty());
        for p in ps {
            assert!((1..p).any(|x| x * x % p == 3));
        }
    }
}
