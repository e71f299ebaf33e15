//! Trigonometric majorants, the large-frequency detector for sets confined to
//! an interval mod `p`, reciprocal exponential sums, the smoothed divisor
//! weight and dense-subinterval search.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numtheory::{mobius_table, primes_up_to};
use crate::residue::{minimal_covering_interval, reduce_mod, CyclicInterval, IntegerSet};
use crate::{exec, Error, Result};

/// `f(θ) = 1 + 2 sum_{k=1}^{K} c_k cos(2πkθ)` with
/// `c_k = (8/ε²)(sin(πkε/2)/(πk))²` and `K = ⌈2/ε²⌉`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantPolynomial {
    pub epsilon: f64,
    pub k_max: usize,
    /// `coefficients[k - 1] = c_k`.
    pub coefficients: Vec<f64>,
}

/// Result of a grid-plus-derivative check that `f <= tolerance` on
/// `ε/2 <= θ <= 1 - ε/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityCertificate {
    pub grid_points: usize,
    pub grid_max: f64,
    /// `4π sum k c_k`, a Lipschitz constant for `f`.
    pub lipschitz: f64,
    /// Upper bound for `f` on the whole region.
    pub certified_max: f64,
    pub tolerance: f64,
    pub holds: bool,
}

pub const NEGATIVITY_TOLERANCE: f64 = 1e-9;

/// Coefficient `c_k` of the untruncated series.
pub fn majorant_coefficient(epsilon: f64, k: i64) -> f64 {
    if k == 0 {
        return 2.0;
    }
    let kf = k as f64;
    let s = (PI * kf * epsilon / 2.0).sin() / (PI * kf);
    8.0 / (epsilon * epsilon) * s * s
}

impl MajorantPolynomial {
    pub fn eval(&self, theta: f64) -> f64 {
        let mut total = 1.0;
        for (i, &c) in self.coefficients.iter().enumerate() {
            total += 2.0 * c * (2.0 * PI * (i + 1) as f64 * theta).cos();
        }
        total
    }

    pub fn lipschitz(&self) -> f64 {
        4.0 * PI
            * self
                .coefficients
                .iter()
                .enumerate()
                .map(|(i, &c)| (i + 1) as f64 * c.abs())
                .sum::<f64>()
    }

    /// `sum_{0 < |k| <= K} |c_k|`.
    pub fn coefficient_mass(&self) -> f64 {
        2.0 * self.coefficients.iter().map(|c| c.abs()).sum::<f64>()
    }

    /// Evaluate on `points` equally spaced nodes of `[ε/2, 1/2]` (the region
    /// is symmetric under `θ ↦ 1 - θ`) and bound `f` between nodes by the
    /// Lipschitz constant.
    pub fn certify_negativity(&self, points: usize) -> NegativityCertificate {
        let points = points.max(2);
        let lo = self.epsilon / 2.0;
        let hi = 0.5;
        let h = (hi - lo) / (points - 1) as f64;
        let values = exec::map_range(0..points as u64, |i| {
            let theta = if i as usize == points - 1 { hi } else { lo + i as f64 * h };
            self.eval(theta)
        });
        let grid_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lipschitz = self.lipschitz();
        let certified_max = values
            .windows(2)
            .map(|w| (w[0] + w[1]) / 2.0 + lipschitz * h / 2.0)
            .fold(f64::NEG_INFINITY, f64::max);
        NegativityCertificate {
            grid_points: points,
            grid_max,
            lipschitz,
            certified_max,
            tolerance: NEGATIVITY_TOLERANCE,
            holds: certified_max <= NEGATIVITY_TOLERANCE,
        }
    }

    /// `(k, c_k)` rows for `0 <= k <= K`, with the constant term 1 at `k = 0`.
    pub fn coefficient_table(&self) -> Vec<(usize, f64)> {
        std::iter::once((0, 1.0))
            .chain(self.coefficients.iter().enumerate().map(|(i, &c)| (i + 1, c)))
            .collect()
    }
}

/// Default grid size used when a majorant is built.
pub const BUILD_GRID_POINTS: usize = 20_000;

/// Build and certify the majorant for `0 < ε <= 1/2`.
pub fn build_majorant(epsilon: f64) -> Result<MajorantPolynomial> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::domain(format!("ε = {epsilon} must lie in (0, 1/2]")));
    }
    let k_max = (2.0 / (epsilon * epsilon)).ceil() as usize;
    let coefficients = (1..=k_max as i64).map(|k| majorant_coefficient(epsilon, k)).collect();
    let poly = MajorantPolynomial {
        epsilon,
        k_max,
        coefficients,
    };
    for (i, &c) in poly.coefficients.iter().enumerate() {
        let k = (i + 1) as f64;
        if c.abs() > (1.0 / (epsilon * epsilon * k * k)).min(8.0) {
            return Err(Error::InvariantViolation(format!("|c_{}| = {c} too large", i + 1)));
        }
    }
    let cert = poly.certify_negativity(BUILD_GRID_POINTS);
    if !cert.holds {
        return Err(Error::InvariantViolation(format!(
            "majorant exceeds 0 on the negativity region: certified max {}",
            cert.certified_max
        )));
    }
    Ok(poly)
}

/// `sum_j a_j cos(jθ)`, `θ` in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosinePolynomial {
    pub coefficients: Vec<f64>,
}

impl CosinePolynomial {
    pub fn eval(&self, theta: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(j, &a)| a * (j as f64 * theta).cos())
            .sum()
    }
}

/// `1 - 2 cos θ + cos 2θ = 2 cos θ (cos θ - 1)`, nonpositive for `|θ| <= π/2`.
pub fn cosine_majorant() -> CosinePolynomial {
    CosinePolynomial {
        coefficients: vec![1.0, -2.0, 1.0],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorMode {
    General,
    HalfInterval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorResult {
    pub k: u64,
    pub magnitude: f64,
    /// `ε|A|/32` in general mode, `|A|/3` in half-interval mode.
    pub guarantee: f64,
    pub guarantee_met: bool,
    /// Interval covering `A mod p`.
    pub interval: Option<CyclicInterval>,
    /// Rotation placing `A/p + β` inside the region where the majorant is nonpositive.
    pub beta: f64,
}

/// `|sum_a counts[a] e(ka/p)|`.
fn fibre_sum(counts: &[u64], p: u64, k: u64) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, &c) in counts.iter().enumerate() {
        if c > 0 {
            let phase = (k * a as u64 % p) as f64 / p as f64;
            acc += Complex64::from_polar(c as f64, 2.0 * PI * phase);
        }
    }
    acc.norm()
}

/// Find the frequency `k` maximising `|sum_{x ∈ A} e(kx/p)|`, searching
/// `1 <= k <= ⌈2/ε²⌉` (general mode) or `k ∈ {1, 2}` (half-interval mode).
pub fn detect_large_frequency(
    a: &IntegerSet,
    p: u64,
    epsilon: f64,
    mode: DetectorMode,
) -> Result<DetectorResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("ε = {epsilon} must lie in (0, 1)")));
    }
    let (residues, fibres) = reduce_mod(a, p);
    let interval = minimal_covering_interval(&residues);
    let n = a.len() as f64;
    let len = interval.map_or(0, |iv| iv.len);
    let (k_range, guarantee, beta) = match mode {
        DetectorMode::General => {
            if len as f64 > (1.0 - epsilon) * p as f64 {
                return Err(Error::Precondition(format!(
                    "covering interval has length {len} > (1 - ε)p = {}",
                    (1.0 - epsilon) * p as f64
                )));
            }
            let k_max = (2.0 / (epsilon * epsilon)).ceil() as u64;
            let start = interval.map_or(0, |iv| iv.start);
            (1..=k_max, epsilon * n / 32.0, epsilon / 2.0 - start as f64 / p as f64)
        }
        DetectorMode::HalfInterval => {
            if 2 * len > p {
                return Err(Error::Precondition(format!(
                    "covering interval has length {len} > p/2 = {}",
                    p as f64 / 2.0
                )));
            }
            let centre = interval.map_or(0.0, |iv| iv.start as f64 + (iv.len as f64 - 1.0) / 2.0);
            (1..=2, n / 3.0, -centre / p as f64)
        }
    };
    let ks: Vec<u64> = k_range.collect();
    let mags = exec::map(&ks, |&k| fibre_sum(&fibres.counts, p, k));
    let (mut best_k, mut best) = (ks[0], mags[0]);
    for (&k, &m) in ks.iter().zip(&mags).skip(1) {
        if m > best {
            best_k = k;
            best = m;
        }
    }
    Ok(DetectorResult {
        k: best_k,
        magnitude: best,
        guarantee,
        guarantee_met: best >= guarantee,
        interval,
        beta,
    })
}

fn e_frac(x: f64, n: u64) -> Complex64 {
    // Integral x: reduce exactly mod n before dividing.
    let phase = if x.fract() == 0.0 && x.abs() < 1e36 {
        (x as i128).rem_euclid(n as i128) as f64 / n as f64
    } else {
        (x / n as f64).rem_euclid(1.0)
    };
    Complex64::from_polar(1.0, 2.0 * PI * phase)
}

/// `sum_{Y <= n <= 2Y} e(x/n)`, optionally over primes `n` only.
pub fn reciprocal_exponential_sum(x: f64, y: u64, primes_only: bool) -> Result<Complex64> {
    if y == 0 {
        return Err(Error::domain("Y must be at least 1"));
    }
    let hi = y.checked_mul(2).ok_or_else(|| Error::Overflow(format!("2Y with Y = {y}")))?;
    let terms: Vec<u64> = if primes_only {
        primes_up_to(hi.max(2))?.window(y, hi).to_vec()
    } else {
        (y..=hi).collect()
    };
    Ok(terms.iter().map(|&n| e_frac(x, n)).sum())
}

/// A smooth cutoff `ψ` with `ψ(0) = 1`, `|ψ| <= 1`, supported on `|x| <= 1/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Bump {
    /// `exp(1 - 1/(1 - (x/r)²))` on `|x| < r`.
    Exponential { radius: f64 },
    /// `cos²(πx/2r)` on `|x| < r`.
    CosineSquared { radius: f64 },
}

impl Default for Bump {
    fn default() -> Self {
        Bump::Exponential { radius: 0.25 }
    }
}

impl Bump {
    fn radius(&self) -> f64 {
        match *self {
            Bump::Exponential { radius } | Bump::CosineSquared { radius } => radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.radius();
        if !(r > 0.0 && r <= 0.25) {
            return Err(Error::domain(format!(
                "bump radius {r} must lie in (0, 1/4] for the support condition"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        let r = self.radius();
        let t = x / r;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        match self {
            Bump::Exponential { .. } => (1.0 - 1.0 / (1.0 - t * t)).exp(),
            Bump::CosineSquared { .. } => (PI * t / 2.0).cos().powi(2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveWeightAudit {
    pub y: u64,
    /// `min w(p)` over primes in `[Y, 2Y]`.
    pub min_prime_weight: f64,
    pub primes_ok: bool,
    pub total_weight: f64,
    pub pi_y: usize,
    /// `sum w(n) / π(Y)`.
    pub mass_ratio: f64,
    pub mass_ok: bool,
    /// `max |w(n) - sum_{d|n} λ_d|`.
    pub lambda_max_error: f64,
    pub lambda_ok: bool,
    /// `sum_{d <= Y} |λ_d|/d / log³ Y`.
    pub lambda_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveWeight {
    pub y: u64,
    /// `values[i] = w(Y + i)` for `0 <= i <= Y`.
    pub values: Vec<f64>,
    pub audit: SieveWeightAudit,
}

impl SieveWeight {
    pub fn at(&self, n: u64) -> Option<f64> {
        n.checked_sub(self.y).and_then(|i| self.values.get(i as usize).copied())
    }
}

/// `w(n) = (sum_{d | n} μ(d) ψ(log d / log Y))²` on `[Y, 2Y]`, audited for
/// `w(p) >= 1` on primes, total mass at most `10 π(Y)`, and agreement with
/// its expansion `w(n) = sum_{d | n} λ_d`.
pub fn sieve_weight(y: u64, bump: Bump) -> Result<SieveWeight> {
    bump.validate()?;
    if y < 2 {
        return Err(Error::domain("Y must be at least 2"));
    }
    let hi = 2 * y;
    let log_y = (y as f64).ln();
    let psi = |d: u64| bump.eval((d as f64).ln() / log_y);
    // Divisors with ψ(log d / log Y) ≠ 0 satisfy d < Y^{1/4}.
    let d_max = (1..).take_while(|&d: &u64| psi(d) != 0.0).last().unwrap_or(1);
    let mu = mobius_table(d_max as usize);
    let divisors: Vec<(u64, f64)> = (1..=d_max)
        .filter(|&d| mu[d as usize] != 0)
        .map(|d| (d, mu[d as usize] as f64 * psi(d)))
        .collect();

    let mut inner = vec![0.0f64; (y + 1) as usize];
    for &(d, coeff) in &divisors {
        let mut n = y.div_ceil(d) * d;
        while n <= hi {
            inner[(n - y) as usize] += coeff;
            n += d;
        }
    }
    let values: Vec<f64> = inner.iter().map(|v| v * v).collect();

    // λ_m = sum over pairs with lcm(d1, d2) = m of the coefficient products.
    let mut lambda: std::collections::BTreeMap<u64, f64> = Default::default();
    for &(d1, c1) in &divisors {
        for &(d2, c2) in &divisors {
            let m = num_integer::lcm(d1, d2);
            *lambda.entry(m).or_insert(0.0) += c1 * c2;
        }
    }
    let mut expanded = vec![0.0f64; (y + 1) as usize];
    for (&m, &l) in &lambda {
        let mut n = y.div_ceil(m) * m;
        while n <= hi {
            expanded[(n - y) as usize] += l;
            n += m;
        }
    }
    let lambda_max_error = values
        .iter()
        .zip(&expanded)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let lambda_sum: f64 = lambda
        .iter()
        .filter(|(&m, _)| m <= y)
        .map(|(&m, l)| l.abs() / m as f64)
        .sum();

    let table = primes_up_to(hi)?;
    let min_prime_weight = table
        .window(y, hi)
        .iter()
        .map(|&p| values[(p - y) as usize])
        .fold(f64::INFINITY, f64::min);
    let pi_y = table.count_up_to(y);
    let total_weight: f64 = values.iter().sum();
    let mass_ratio = total_weight / pi_y as f64;
    let audit = SieveWeightAudit {
        y,
        min_prime_weight,
        primes_ok: min_prime_weight >= 1.0 - 1e-12,
        total_weight,
        pi_y,
        mass_ratio,
        mass_ok: mass_ratio <= 10.0,
        lambda_max_error,
        lambda_ok: lambda_max_error <= 1e-9,
        lambda_constant: lambda_sum / log_y.powi(3),
    };
    Ok(SieveWeight { y, values, audit })
}

/// The window `[start, start + L - 1] ⊂ [1, X]` holding the most elements of
/// `A`, leftmost among ties. Returns `(start, count)`.
pub fn dense_subinterval(a: &IntegerSet, len: u64) -> Result<(u64, usize)> {
    if len == 0 || len > a.bound() {
        return Err(Error::domain(format!(
            "window length {len} must lie in [1, {}]",
            a.bound()
        )));
    }
    let el = a.elements();
    let mut best: (usize, u64) = (0, 1);
    let mut j = 0;
    for i in 0..el.len() {
        j = j.max(i);
        while j + 1 < el.len() && el[j + 1] - el[i] < len {
            j += 1;
        }
        let count = j - i + 1;
        let start = (el[j] + 1).saturating_sub(len).max(1);
        if count > best.0 || (count == best.0 && start < best.1) {
            best = (count, start);
        }
    }
    Ok((best.1, best.0))
}
