//! Scenario configuration files.
//!
//! Configs are TOML. Unknown keys anywhere are rejected, and every
//! parameter is checked against the preconditions of the operations it
//! feeds before anything runs. Errors carry the path of the offending
//! field, e.g. `scenario[2].epsilon`.
//!
//! ```toml
//! seed = 7
//! output_dir = "reports"
//!
//! [[scenario]]
//! kind = "large-sieve-sharpness"
//! name = "squares"
//! x_grid = [10000, 100000, 1000000]
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sievelab_core::numtheory::is_prime;
use sievelab_core::quadratic::RationalQuadratic;

use crate::error::{LabError, LabResult};

/// Largest `X` any scenario accepts.
pub const MAX_X: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabConfig {
    /// Root of every random stream in the run.
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<Scenario>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("reports")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scenario {
    LargeSieveSharpness(SharpnessParams),
    #[serde(rename = "theorem14-audit")]
    EnergyAudit(AuditParams),
    IntervalIteration(IterationParams),
    ProgressionIntersection(IntersectionParams),
    QuasisquareCensus(CensusParams),
    StabilityClassify(StabilityParams),
    GoldbachObstruction(GoldbachParams),
    AppendixVerify(AppendixParams),
}

/// How a scenario builds an integer set inside `[1, X]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
#[derive(Default)]
pub enum SetSpec {
    #[default]
    Squares,
    Quadratic { psi: RationalQuadratic },
    Explicit { elements: Vec<u64> },
    /// Uniform random subset of `[1, X]` of the given size.
    Random { size: usize },
}


#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessParams {
    pub name: String,
    pub x_grid: Vec<u64>,
    /// Prime cutoff; `⌊√X⌋` when absent.
    #[serde(default)]
    pub q: Option<u64>,
    #[serde(default)]
    pub set: SetSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditParams {
    pub name: String,
    #[serde(default = "default_audit_x")]
    pub x: u64,
    #[serde(default = "default_audit_count")]
    pub count: usize,
    #[serde(default = "default_audit_min")]
    pub min_size: usize,
    #[serde(default = "default_audit_max")]
    pub max_size: usize,
}

fn default_audit_x() -> u64 {
    10_000
}
fn default_audit_count() -> usize {
    100
}
fn default_audit_min() -> usize {
    50
}
fn default_audit_max() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IterationParams {
    pub name: String,
    pub x: u64,
    pub epsilon: f64,
    /// Primes in `[y, 2y]` carry the interval constraints.
    #[serde(default)]
    pub y: Option<u64>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_min_x")]
    pub min_x: u64,
}

fn default_max_iterations() -> usize {
    8
}
fn default_min_x() -> u64 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntersectionParams {
    pub name: String,
    pub x: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    /// Progression length as a fraction of `p`.
    #[serde(default = "default_density")]
    pub density: f64,
    #[serde(default = "default_prime_lo")]
    pub prime_lo: u64,
    /// `⌊√X⌋` when absent.
    #[serde(default)]
    pub prime_hi: Option<u64>,
    #[serde(default)]
    pub unit_step: bool,
}

fn default_epsilon() -> f64 {
    0.2
}
fn default_c() -> f64 {
    0.1
}
fn default_density() -> f64 {
    0.5
}
fn default_prime_lo() -> u64 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusParams {
    pub name: String,
    pub y: u64,
    pub prime_lo: u64,
    pub prime_hi: u64,
    /// Fraction mode when present.
    #[serde(default)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityParams {
    pub name: String,
    pub x: u64,
    pub psi: RationalQuadratic,
    pub window_lo: u64,
    pub window_hi: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Integers added to the image of `psi`.
    #[serde(default)]
    pub extra: Vec<u64>,
}

fn default_threshold() -> f64 {
    0.97
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldbachParams {
    pub name: String,
    pub x: u64,
    pub a: SetSpec,
    pub b: SetSpec,
    /// Every prime up to `y` is tested.
    pub y: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AppendixParams {
    pub name: String,
    #[serde(default = "default_appendix_count")]
    pub count: usize,
    #[serde(default = "default_height")]
    pub height: u64,
    #[serde(default = "default_range")]
    pub range: u64,
    #[serde(default = "default_max_prime")]
    pub max_prime: u64,
}

fn default_appendix_count() -> usize {
    100
}
fn default_height() -> u64 {
    10
}
fn default_range() -> u64 {
    100_000
}
fn default_max_prime() -> u64 {
    200
}

impl Scenario {
    pub fn name(&self) -> &str {
        match self {
            Scenario::LargeSieveSharpness(p) => &p.name,
            Scenario::EnergyAudit(p) => &p.name,
            Scenario::IntervalIteration(p) => &p.name,
            Scenario::ProgressionIntersection(p) => &p.name,
            Scenario::QuasisquareCensus(p) => &p.name,
            Scenario::StabilityClassify(p) => &p.name,
            Scenario::GoldbachObstruction(p) => &p.name,
            Scenario::AppendixVerify(p) => &p.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::LargeSieveSharpness(_) => "large-sieve-sharpness",
            Scenario::EnergyAudit(_) => "theorem14-audit",
            Scenario::IntervalIteration(_) => "interval-iteration",
            Scenario::ProgressionIntersection(_) => "progression-intersection",
            Scenario::QuasisquareCensus(_) => "quasisquare-census",
            Scenario::StabilityClassify(_) => "stability-classify",
            Scenario::GoldbachObstruction(_) => "goldbach-obstruction",
            Scenario::AppendixVerify(_) => "appendix-verify",
        }
    }

    fn validate(&self, at: &str) -> LabResult<()> {
        let field = |f: &str| format!("{at}.{f}");
        let check = |ok: bool, f: &str, msg: &str| -> LabResult<()> {
            if ok {
                Ok(())
            } else {
                Err(LabError::config(field(f), msg))
            }
        };
        match self {
            Scenario::LargeSieveSharpness(p) => {
                for (i, &x) in p.x_grid.iter().enumerate() {
                    check((1..=MAX_X).contains(&x), &format!("x_grid[{i}]"), "must lie in [1, 10^7]")?;
                    p.set.validate(x, &field("set"))?;
                }
                if let Some(q) = p.q {
                    check((2..=100_000).contains(&q), "q", "must lie in [2, 10^5]")?;
                }
            }
            Scenario::EnergyAudit(p) => {
                check((1..=1_000_000).contains(&p.x), "x", "must lie in [1, 10^6]")?;
                check(p.min_size >= 1, "min_size", "must be positive")?;
                check(p.min_size <= p.max_size, "max_size", "must be at least min_size")?;
                check(p.max_size as u64 <= p.x, "max_size", "must not exceed x")?;
            }
            Scenario::IntervalIteration(p) => {
                check((2..=MAX_X).contains(&p.x), "x", "must lie in [2, 10^7]")?;
                check(p.epsilon > 0.0 && p.epsilon < 1.0, "epsilon", "must lie in (0, 1)")?;
                if let Some(y) = p.y {
                    check(y >= 3 && 2 * y <= 100_000, "y", "must lie in [3, 5·10^4]")?;
                }
                check(p.min_x >= 2, "min_x", "must be at least 2")?;
            }
            Scenario::ProgressionIntersection(p) => {
                check((4..=1_000_000).contains(&p.x), "x", "must lie in [4, 10^6]")?;
                check(p.epsilon > 0.0 && p.epsilon < 1.0, "epsilon", "must lie in (0, 1)")?;
                check(p.c > 0.0 && p.c < 0.5, "c", "must lie in (0, 1/2)")?;
                check(p.density > 0.0 && p.density <= 1.0, "density", "must lie in (0, 1]")?;
                let hi = p.prime_hi.unwrap_or_else(|| sievelab_core::numtheory::isqrt(p.x));
                check(p.prime_lo >= 2 && p.prime_lo <= hi, "prime_lo", "must lie in [2, prime_hi]")?;
                check(hi <= 100_000, "prime_hi", "must be at most 10^5")?;
            }
            Scenario::QuasisquareCensus(p) => {
                check((1..=MAX_X).contains(&p.y), "y", "must lie in [1, 10^7]")?;
                check(p.prime_lo >= 3, "prime_lo", "must be an odd prime bound (>= 3)")?;
                check(p.prime_lo <= p.prime_hi, "prime_hi", "must be at least prime_lo")?;
                check(p.prime_hi <= 100_000, "prime_hi", "must be at most 10^5")?;
                if let Some(t) = p.theta {
                    check(t > 0.5 && t <= 1.0, "theta", "must lie in (1/2, 1]")?;
                }
            }
            Scenario::StabilityClassify(p) => {
                check((1..=MAX_X).contains(&p.x), "x", "must lie in [1, 10^7]")?;
                check(p.window_lo <= p.window_hi, "window_hi", "must be at least window_lo")?;
                check(p.window_hi <= 100_000, "window_hi", "must be at most 10^5")?;
                check(
                    p.window_lo > 2 * p.psi.height(),
                    "window_lo",
                    "window primes must exceed 2·height(psi)",
                )?;
                check((0.0..=1.0).contains(&p.threshold), "threshold", "must lie in [0, 1]")?;
                check(
                    p.extra.iter().all(|&e| e >= 1 && e <= p.x),
                    "extra",
                    "elements must lie in [1, x]",
                )?;
            }
            Scenario::GoldbachObstruction(p) => {
                check((1..=MAX_X).contains(&p.x), "x", "must lie in [1, 10^7]")?;
                p.a.validate(p.x, &field("a"))?;
                p.b.validate(p.x, &field("b"))?;
                check((2..=100_000).contains(&p.y), "y", "must lie in [2, 10^5]")?;
            }
            Scenario::AppendixVerify(p) => {
                check((1..=50).contains(&p.height), "height", "must lie in [1, 50]")?;
                check((1..=10_000_000).contains(&p.range), "range", "must lie in [1, 10^7]")?;
                check((2..=2_000).contains(&p.max_prime), "max_prime", "must lie in [2, 2000]")?;
            }
        }
        Ok(())
    }
}

impl SetSpec {
    fn validate(&self, x: u64, at: &str) -> LabResult<()> {
        match self {
            SetSpec::Explicit { elements } => {
                if let Some(e) = elements.iter().find(|&&e| e == 0 || e > x) {
                    return Err(LabError::config(
                        format!("{at}.elements"),
                        format!("element {e} outside [1, {x}]"),
                    ));
                }
            }
            SetSpec::Quadratic { psi } => {
                if psi.height() > 1_000_000 {
                    return Err(LabError::config(format!("{at}.psi"), "height must be at most 10^6"));
                }
            }
            SetSpec::Squares | SetSpec::Random { .. } => {}
        }
        Ok(())
    }
}

impl LabConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let de = toml::de::Deserializer::parse(text)
            .map_err(|e| LabError::config("<document>", e.to_string().trim().to_string()))?;
        let cfg: LabConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let message = e.inner().to_string().trim().to_string();
            LabError::config(path, message)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::config(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> LabResult<()> {
        let mut names = BTreeSet::new();
        for (i, s) in self.scenarios.iter().enumerate() {
            let at = format!("scenario[{i}]");
            let name = s.name();
            let safe = !name.is_empty()
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
            if !safe {
                return Err(LabError::config(
                    format!("{at}.name"),
                    "must be nonempty and use only ASCII letters, digits, '-' and '_'",
                ));
            }
            if name == "index" {
                return Err(LabError::config(format!("{at}.name"), "`index` is reserved for the run index"));
            }
            if !names.insert(name.to_string()) {
                return Err(LabError::config(format!("{at}.name"), format!("duplicate name `{name}`")));
            }
            s.validate(&at)?;
        }
        Ok(())
    }

    /// SHA-256 (hex) of the canonical JSON form of the parsed config.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Checks that every listed modulus is prime and that none repeats.
pub fn check_primes(primes: &[u64], at: &str) -> LabResult<()> {
    let mut seen = BTreeSet::new();
    for &p in primes {
        if !is_prime(p) {
            return Err(LabError::config(at, format!("{p} is not prime")));
        }
        if !seen.insert(p) {
            return Err(LabError::config(at, format!("{p} is listed twice")));
        }
    }
    Ok(())
}
