//! Runs the scenarios of a [`LabConfig`] into in-memory report files.
//!
//! Each scenario yields `<name>.json` (and usually `<name>.csv`); a failing
//! scenario yields `<name>.failure.json` instead. `index.json` lists every
//! scenario with its status. Scenarios are independent: one failing does
//! not stop the others, and the run's exit code is the most severe status.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng as _;
use serde::Serialize;
use sievelab_core::bounds::{large_sieve_bound, larger_sieve_bound, LargerSieveInput};
use sievelab_core::energy::{additive_energy, intersecting_process, lift_inequality_check, shift_set, IntersectingTrace};
use sievelab_core::exec;
use sievelab_core::fourier::{dense_subinterval, detect_large_frequency, DetectorMode};
use sievelab_core::numtheory::{isqrt, primes_up_to};
use sievelab_core::quadratic::{
    goldbach_obstruction, image_mod_p, integer_values_in, quadratic_image_set, quasisquares,
    random_quadratic, stability_classifier, tilde_contains, verify_appendix_lemma, CensusMode,
    GoldbachObstruction, QuasisquareCensus, RationalQuadratic, StabilityReport,
};
use sievelab_core::residue::{
    greedy_progression_family, random_constrained_set, reduce_mod, squares_family, squares_set,
    IntegerSet, ResidueConstraintFamily,
};
use sievelab_core::rng::SeedStream;
use sievelab_core::Error as CoreError;

use crate::config::{
    AppendixParams, AuditParams, CensusParams, GoldbachParams, IntersectionParams, IterationParams,
    LabConfig, Scenario, SetSpec, SharpnessParams, StabilityParams,
};
use crate::error::{LabResult, EXIT_INVARIANT, EXIT_OK};
use crate::output::{fmt_f64, fmt_opt, json_bytes, CsvTable, Provenance};
use crate::VERSION;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioStatus {
    pub name: String,
    pub kind: String,
    /// `ok`, `invariant_violation`, `infeasible`, `config_error` or `io_error`.
    pub status: String,
    pub exit_code: i32,
    pub messages: Vec<String>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
struct Index<'a> {
    version: &'a str,
    config_hash: &'a str,
    seed: u64,
    scenarios: &'a [ScenarioStatus],
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config_hash: String,
    pub statuses: Vec<ScenarioStatus>,
    /// File name to contents, including `index.json`.
    pub files: BTreeMap<String, Vec<u8>>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.statuses.iter().map(|s| s.exit_code).max().unwrap_or(EXIT_OK)
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            std::fs::write(dir.join(name), bytes)?;
        }
        Ok(())
    }
}

struct Produced {
    json: Vec<u8>,
    csv: Option<Vec<u8>>,
    violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
struct Failure<'a> {
    status: &'a str,
    message: String,
}

pub fn run_config(cfg: &LabConfig) -> RunOutcome {
    let hash = cfg.hash();
    let root = SeedStream::new(cfg.seed);
    let mut files = BTreeMap::new();
    let mut statuses = Vec::new();
    for scenario in &cfg.scenarios {
        let name = scenario.name();
        let prov = Provenance {
            scenario: name,
            kind: scenario.kind(),
            config_hash: &hash,
            seed: cfg.seed,
        };
        let seeds = root.child(name, 0);
        let mut status = ScenarioStatus {
            name: name.to_string(),
            kind: scenario.kind().to_string(),
            status: "ok".into(),
            exit_code: EXIT_OK,
            messages: Vec::new(),
            files: Vec::new(),
        };
        match run_scenario(scenario, &prov, seeds) {
            Ok(out) => {
                let json_name = format!("{name}.json");
                files.insert(json_name.clone(), out.json);
                status.files.push(json_name);
                if let Some(csv) = out.csv {
                    let csv_name = format!("{name}.csv");
                    files.insert(csv_name.clone(), csv);
                    status.files.push(csv_name);
                }
                if !out.violations.is_empty() {
                    status.status = "invariant_violation".into();
                    status.exit_code = EXIT_INVARIANT;
                    status.messages = out.violations;
                }
            }
            Err(e) => {
                let failure_name = format!("{name}.failure.json");
                let body = prov.wrap(Failure {
                    status: e.kind(),
                    message: e.to_string(),
                });
                files.insert(failure_name.clone(), json_bytes(&body));
                status.status = e.kind().into();
                status.exit_code = e.exit_code();
                status.messages.push(e.to_string());
                status.files.push(failure_name);
            }
        }
        statuses.push(status);
    }
    let index = Index {
        version: VERSION,
        config_hash: &hash,
        seed: cfg.seed,
        scenarios: &statuses,
    };
    files.insert("index.json".into(), json_bytes(&index));
    RunOutcome {
        config_hash: hash,
        statuses,
        files,
    }
}

fn run_scenario(s: &Scenario, prov: &Provenance, seeds: SeedStream) -> LabResult<Produced> {
    match s {
        Scenario::LargeSieveSharpness(p) => sharpness(p, prov, seeds),
        Scenario::EnergyAudit(p) => audit(p, prov, seeds),
        Scenario::IntervalIteration(p) => interval_iteration(p, prov, seeds),
        Scenario::ProgressionIntersection(p) => progression_intersection(p, prov, seeds),
        Scenario::QuasisquareCensus(p) => census(p, prov),
        Scenario::StabilityClassify(p) => stability(p, prov),
        Scenario::GoldbachObstruction(p) => goldbach(p, prov, seeds),
        Scenario::AppendixVerify(p) => appendix(p, prov, seeds),
    }
}

/// Materialize a set inside `[1, X]`.
pub fn build_set(spec: &SetSpec, x: u64, seed: u64) -> LabResult<IntegerSet> {
    Ok(match spec {
        SetSpec::Squares => squares_set(x),
        SetSpec::Quadratic { psi } => quadratic_image_set(psi, x)?,
        SetSpec::Explicit { elements } => IntegerSet::from_unsorted(x, elements.clone())?,
        SetSpec::Random { size } => {
            random_constrained_set(&ResidueConstraintFamily::new(), x, *size, seed)?
        }
    })
}

/// The constraint family a set is measured against: the defining residues
/// for squares and quadratic images, the set's own reductions otherwise.
fn family_for(spec: &SetSpec, a: &IntegerSet, q: u64) -> LabResult<ResidueConstraintFamily> {
    let table = primes_up_to(q.max(2))?;
    Ok(match spec {
        SetSpec::Squares => squares_family(&table, q),
        SetSpec::Quadratic { psi } => {
            let (qa, _, _, qd) = psi.coefficients();
            let two_ad = 2 * qa as i128 * qd as i128;
            ResidueConstraintFamily::from_sets(
                table
                    .up_to(q)
                    .iter()
                    .filter(|&&p| two_ad % p as i128 != 0)
                    .map(|&p| image_mod_p(psi, p)),
            )?
        }
        SetSpec::Explicit { .. } | SetSpec::Random { .. } => {
            ResidueConstraintFamily::from_sets(table.up_to(q).iter().map(|&p| reduce_mod(a, p).0))?
        }
    })
}

#[derive(Debug, Clone, Serialize)]
struct SharpnessRow {
    x: u64,
    q: u64,
    size: usize,
    large_sieve_bound: Option<f64>,
    crude_bound: Option<f64>,
    larger_sieve_bound: Option<f64>,
    /// Large sieve bound divided by `|A|`.
    ratio: Option<f64>,
}

fn sharpness(p: &SharpnessParams, prov: &Provenance, seeds: SeedStream) -> LabResult<Produced> {
    let cells: Vec<(usize, u64)> = p.x_grid.iter().copied().enumerate().collect();
    let rows = exec::map(&cells, |&(i, x)| -> LabResult<SharpnessRow> {
        let q = p.q.unwrap_or_else(|| isqrt(x).max(2));
        let a = build_set(&p.set, x, seeds.derive("set", i as u64))?;
        let family = family_for(&p.set, &a, q)?;
        let ls = large_sieve_bound(&family, x, q)?;
        let gs = larger_sieve_bound(&LargerSieveInput::from_family(&family, x, q, 1.0)?, None)?;
        Ok(SharpnessRow {
            x,
            q,
            size: a.len(),
            large_sieve_bound: ls.bound,
            crude_bound: ls.crude_bound,
            larger_sieve_bound: gs.bound,
            ratio: ls.bound.filter(|_| !a.is_empty()).map(|b| b / a.len() as f64),
        })
    });
    let rows = rows.into_iter().collect::<LabResult<Vec<_>>>()?;
    let mut violations = Vec::new();
    let mut table = CsvTable::new(&["x", "q", "size", "large_sieve_bound", "crude_bound", "larger_sieve_bound", "ratio"]);
    for r in &rows {
        for (label, bound) in [("large sieve", r.large_sieve_bound), ("larger sieve", r.larger_sieve_bound)] {
            if let Some(b) = bound {
                if r.size as f64 > b * (1.0 + 1e-12) {
                    violations.push(format!("X = {}: |A| = {} exceeds the {label} bound {b}", r.x, r.size));
                }
            }
        }
        table.push(vec![
            r.x.to_string(),
            r.q.to_string(),
            r.size.to_string(),
            fmt_opt(r.large_sieve_bound),
            fmt_opt(r.crude_bound),
            fmt_opt(r.larger_sieve_bound),
            fmt_opt(r.ratio),
        ]);
    }
    Ok(Produced {
        json: json_bytes(&prov.wrap(&rows)),
        csv: Some(table.to_bytes()),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
struct AuditRow {
    index: u64,
    seed: u64,
    size: usize,
    energy: u128,
    lift_lhs: i128,
    lift_rhs: i128,
    slack: i128,
    lift_holds: bool,
    shift_count: usize,
    shift_guarantee_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
struct AuditSummary {
    x: u64,
    count: usize,
    violations: usize,
    min_slack: Option<i128>,
    instances: Vec<AuditRow>,
}

fn audit(p: &AuditParams, prov: &Provenance, seeds: SeedStream) -> LabResult<Produced> {
    let indices: Vec<u64> = (0..p.count as u64).collect();
    let rows = exec::map(&indices, |&i| -> LabResult<AuditRow> {
        let seed = seeds.derive("instance", i);
        let mut rng = seeds.rng("size", i);
        let size = rng.gen_range(p.min_size..=p.max_size);
        let a = random_constrained_set(&ResidueConstraintFamily::new(), p.x, size, seed)?;
        let lift = lift_inequality_check(&a, p.x)?;
        let energy = additive_energy(&a);
        let k = (a.len() as f64).powi(3) / energy as f64;
        let shifts = shift_set(&a, k)?;
        Ok(AuditRow {
            index: i,
            seed,
            size,
            energy,
            lift_lhs: lift.lift_lhs,
            lift_rhs: lift.lift_rhs,
            slack: lift.slack,
            lift_holds: lift.holds,
            shift_count: shifts.shifts.len(),
            shift_guarantee_holds: !shifts.guarantee_applies || shifts.guarantee_holds,
        })
    });
    let rows = rows.into_iter().collect::<LabResult<Vec<_>>>()?;
    let mut violations = Vec::new();
    let mut table = CsvTable::new(&[
        "index", "seed", "size", "energy", "lift_lhs", "lift_rhs", "slack", "lift_holds", "shift_count",
        "shift_guarantee_holds",
    ]);
    for r in &rows {
        if !r.lift_holds {
            violations.push(format!("instance {}: lift inequality fails ({} > {})", r.index, r.lift_lhs, r.lift_rhs));
        }
        if !r.shift_guarantee_holds {
            violations.push(format!("instance {}: shift set smaller than |A|/2K", r.index));
        }
        table.push(vec![
            r.index.to_string(),
            r.seed.to_string(),
            r.size.to_string(),
            r.energy.to_string(),
            r.lift_lhs.to_string(),
            r.lift_rhs.to_string(),
            r.slack.to_string(),
            r.lift_holds.to_string(),
            r.shift_count.to_string(),
            r.shift_guarantee_holds.to_string(),
        ]);
    }
    let summary = AuditSummary {
        x: p.x,
        count: p.count,
        violations: violations.len(),
        min_slack: rows.iter().map(|r| r.slack).min(),
        instances: rows,
    };
    Ok(Produced {
        json: json_bytes(&prov.wrap(&summary)),
        csv: Some(table.to_bytes()),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
struct IterationStep {
    iteration: usize,
    x: u64,
    size: usize,
    /// Primes in `[y, 2y]` whose covering interval is short enough.
    constrained_primes: usize,
    guarantee_met: usize,
    /// Most frequent detected frequency (smallest on ties).
    modal_k: Option<u64>,
    window_length: Option<u64>,
    window_start: Option<u64>,
    window_count: Option<usize>,
    retained_fraction: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct IterationTrace {
    x: u64,
    epsilon: f64,
    y: u64,
    window_primes: Vec<u64>,
    /// `ε⁵`, the retained fraction up to an absolute constant.
    reference_fraction: f64,
    steps: Vec<IterationStep>,
    stop: &'static str,
}

/// Window length `⌊exp(log^{7/10} X)⌋`.
pub fn iteration_window(x: u64) -> u64 {
    ((x as f64).ln().powf(0.7).exp().floor() as u64).max(1)
}

fn interval_iteration(p: &IterationParams, prov: &Provenance, seeds: SeedStream) -> LabResult<Produced> {
    let y = p.y.unwrap_or_else(|| isqrt(iteration_window(p.x)).max(11));
    let primes = primes_up_to(2 * y)?.window(y, 2 * y).to_vec();
    let eps = p.epsilon;
    let len_of = |q: u64| (((1.0 - eps) * q as f64).floor() as u64).max(1);
    let (_, mut a) = greedy_progression_family(p.x, &primes, len_of, true, seeds.derive("family", 0))?;
    let mut x = p.x;
    let mut steps = Vec::new();
    let mut violations = Vec::new();
    let stop;
    let mut iteration = 0;
    loop {
        let detections = exec::map(&primes, |&q| detect_large_frequency(&a, q, eps, DetectorMode::General));
        let mut constrained = 0;
        let mut met = 0;
        let mut k_counts: BTreeMap<u64, usize> = BTreeMap::new();
        for (q, d) in primes.iter().zip(detections) {
            match d {
                Ok(r) if !a.is_empty() => {
                    constrained += 1;
                    if r.guarantee_met {
                        met += 1;
                        *k_counts.entry(r.k).or_default() += 1;
                    } else {
                        violations.push(format!(
                            "iteration {iteration}, p = {q}: |sum e(ka/p)| = {} < {}",
                            r.magnitude, r.guarantee
                        ));
                    }
                }
                Ok(_) | Err(CoreError::Precondition(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
        let modal_k = k_counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&k, _)| k);
        let mut step = IterationStep {
            iteration,
            x,
            size: a.len(),
            constrained_primes: constrained,
            guarantee_met: met,
            modal_k,
            window_length: None,
            window_start: None,
            window_count: None,
            retained_fraction: None,
        };
        let len = iteration_window(x);
        let reason = if a.is_empty() {
            Some("empty_set")
        } else if x < p.min_x {
            Some("below_min_x")
        } else if len >= x {
            Some("window_covers_range")
        } else if iteration >= p.max_iterations {
            Some("iteration_cap")
        } else {
            None
        };
        if let Some(r) = reason {
            steps.push(step);
            stop = r;
            break;
        }
        let (start, count) = dense_subinterval(&a, len)?;
        step.window_length = Some(len);
        step.window_start = Some(start);
        step.window_count = Some(count);
        step.retained_fraction = Some(count as f64 / a.len() as f64);
        steps.push(step);
        let next: Vec<u64> = a
            .elements()
            .iter()
            .filter(|&&e| e >= start && e < start + len)
            .map(|&e| e - start + 1)
            .collect();
        a = IntegerSet::new(len, next)?;
        x = len;
        iteration += 1;
    }
    let mut table = CsvTable::new(&[
        "iteration", "x", "size", "constrained_primes", "guarantee_met", "modal_k", "window_length",
        "window_start", "window_count", "retained_fraction",
    ]);
    let opt = |v: Option<u64>| v.map(|v| v.to_string()).unwrap_or_default();
    for s in &steps {
        table.push(vec![
            s.iteration.to_string(),
            s.x.to_string(),
            s.size.to_string(),
            s.constrained_primes.to_string(),
            s.guarantee_met.to_string(),
            opt(s.modal_k),
            opt(s.window_length),
            opt(s.window_start),
            s.window_count.map(|v| v.to_string()).unwrap_or_default(),
            fmt_opt(s.retained_fraction),
        ]);
    }
    let trace = IterationTrace {
        x: p.x,
        epsilon: eps,
        y,
        window_primes: primes,
        reference_fraction: eps.powi(5),
        steps,
        stop,
    };
    Ok(Produced {
        json: json_bytes(&prov.wrap(&trace)),
        csv: Some(table.to_bytes()),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
struct IntersectionReport {
    x: u64,
    family: ResidueConstraintFamily,
    initial_size: usize,
    trace: IntersectingTrace,
}

fn progression_intersection(p: &IntersectionParams, prov: &Provenance, seeds: SeedStream) -> LabResult<Produced> {
    let hi = p.prime_hi.unwrap_or_else(|| isqrt(p.x));
    let primes = primes_up_to(hi.max(2))?.window(p.prime_lo, hi).to_vec();
    let len_of = |q: u64| {
        let cap = (((1.0 - p.epsilon) * q as f64).floor() as u64).max(1);
        ((p.density * q as f64).ceil() as u64).clamp(1, cap)
    };
    let (family, a) = greedy_progression_family(p.x, &primes, len_of, p.unit_step, seeds.derive("family", 0))?;
    let trace = intersecting_process(&a, &family, p.epsilon, p.c)?;
    let mut violations = Vec::new();
    if trace.iterations.windows(2).any(|w| w[1].size > w[0].size) {
        violations.push("iterate sizes increased".to_string());
    }
    if !trace.final_bound_valid {
        violations.push(format!("final size {} exceeds the final larger sieve bound", trace.final_size));
    }
    let mut table = CsvTable::new(&["iteration", "h", "size", "weighted_sum", "per_prime_sizes_digest"]);
    for r in &trace.iterations {
        table.push(vec![
            r.iteration.to_string(),
            r.h.map(|h| h.to_string()).unwrap_or_default(),
            r.size.to_string(),
            fmt_f64(r.weighted_sum),
            r.per_prime_sizes_digest.clone(),
        ]);
    }
    let report = IntersectionReport {
        x: p.x,
        family,
        initial_size: a.len(),
        trace,
    };
    Ok(Produced {
        json: json_bytes(&prov.wrap(&report)),
        csv: Some(table.to_bytes()),
        violations,
    })
}

fn census(p: &CensusParams, prov: &Provenance) -> LabResult<Produced> {
    let primes = primes_up_to(p.prime_hi)?.window(p.prime_lo, p.prime_hi).to_vec();
    let mode = match p.theta {
        Some(theta) => CensusMode::Fraction { theta },
        None => CensusMode::All,
    };
    let c: QuasisquareCensus = quasisquares(p.y, &primes, mode)?;
    let mut violations = Vec::new();
    if c.bound_applies && c.count as f64 > c.bound_value {
        violations.push(format!("count {} exceeds the bound {}", c.count, c.bound_value));
    }
    let mut table = CsvTable::new(&["q"]);
    for q in &c.hits {
        table.push(vec![q.to_string()]);
    }
    Ok(Produced {
        json: json_bytes(&prov.wrap(&c)),
        csv: Some(table.to_bytes()),
        violations,
    })
}

fn stability(p: &StabilityParams, prov: &Provenance) -> LabResult<Produced> {
    let image = quadratic_image_set(&p.psi, p.x)?;
    let a = image.union(&IntegerSet::from_unsorted(p.x, p.extra.clone())?);
    let r: StabilityReport = stability_classifier(&a, &p.psi, (p.window_lo, p.window_hi), p.threshold)?;
    let mut violations = Vec::new();
    if r.a_psi.len() + r.exceptional.len() != a.len() {
        violations.push("classification is not a partition".to_string());
    }
    let mut table = CsvTable::new(&["x", "fraction", "class"]);
    for &(x, f) in &r.fractions {
        let class = if f >= p.threshold { "a_psi" } else { "exceptional" };
        table.push(vec![x.to_string(), fmt_f64(f), class.to_string()]);
    }
    Ok(Produced {
        json: json_bytes(&prov.wrap(&r)),
        csv: Some(table.to_bytes()),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
struct GoldbachReport {
    x: u64,
    size_a: usize,
    size_b: usize,
    primes_without_multiple: Vec<u64>,
    per_prime: Vec<GoldbachObstruction>,
}

fn goldbach(p: &GoldbachParams, prov: &Provenance, seeds: SeedStream) -> LabResult<Produced> {
    let a = build_set(&p.a, p.x, seeds.derive("a", 0))?;
    let b = build_set(&p.b, p.x, seeds.derive("b", 0))?;
    let primes = primes_up_to(p.y)?.primes().to_vec();
    let rows = exec::map(&primes, |&q| goldbach_obstruction(&a, &b, q));
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let mut violations = Vec::new();
    let mut table = CsvTable::new(&["p", "has_multiple", "occupancy_sum", "implication_holds"]);
    for r in &rows {
        if !r.implication_holds {
            violations.push(format!("p = {}: no multiple yet occupancy {} > p", r.p, r.occupancy_sum));
        }
        table.push(vec![
            r.p.to_string(),
            r.has_multiple.to_string(),
            r.occupancy_sum.to_string(),
            r.implication_holds.to_string(),
        ]);
    }
    let report = GoldbachReport {
        x: p.x,
        size_a: a.len(),
        size_b: b.len(),
        primes_without_multiple: rows.iter().filter(|r| !r.has_multiple).map(|r| r.p).collect(),
        per_prime: rows,
    };
    Ok(Produced {
        json: json_bytes(&prov.wrap(&report)),
        csv: Some(table.to_bytes()),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixRow {
    pub index: usize,
    pub psi: RationalQuadratic,
    pub height: u64,
    pub values_checked: usize,
    pub containment_failures: Vec<i64>,
    pub primes_checked: Vec<u64>,
    pub reduction_failures: Vec<u64>,
}

/// Containment in `ψ̃(ℤ)` over `[-range, range]`, and agreement of the two
/// reductions mod every `p ∈ (2·height², max_prime]` with `p ∤ 2ad`.
pub fn appendix_check(index: usize, psi: &RationalQuadratic, range: u64, max_prime: u64) -> LabResult<AppendixRow> {
    let r = range as i64;
    let values = integer_values_in(psi, -r, r);
    let containment_failures: Vec<i64> = values.iter().copied().filter(|&n| !tilde_contains(psi, n)).collect();
    let (a, _, _, d) = psi.coefficients();
    let h = psi.height();
    let two_ad = 2 * a as i128 * d as i128;
    let primes: Vec<u64> = primes_up_to(max_prime)?
        .primes()
        .iter()
        .copied()
        .filter(|&p| p > 2 * h * h && two_ad % p as i128 != 0)
        .collect();
    let mut reduction_failures = Vec::new();
    for &p in &primes {
        if !verify_appendix_lemma(psi, p, None)?.reductions_equal {
            reduction_failures.push(p);
        }
    }
    Ok(AppendixRow {
        index,
        psi: *psi,
        height: h,
        values_checked: values.len(),
        containment_failures,
        primes_checked: primes,
        reduction_failures,
    })
}

fn appendix(p: &AppendixParams, prov: &Provenance, seeds: SeedStream) -> LabResult<Produced> {
    let mut rng = seeds.rng("corpus", 0);
    let corpus: Vec<(usize, RationalQuadratic)> =
        (0..p.count).map(|i| (i, random_quadratic(&mut rng, p.height as i64))).collect();
    let rows = exec::map(&corpus, |(i, psi)| appendix_check(*i, psi, p.range, p.max_prime));
    let rows = rows.into_iter().collect::<LabResult<Vec<_>>>()?;
    let mut violations = Vec::new();
    let mut table = CsvTable::new(&[
        "index", "psi", "height", "values_checked", "containment_failures", "primes_checked", "reduction_failures",
    ]);
    let join = |v: &[u64]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ");
    for r in &rows {
        if !r.containment_failures.is_empty() {
            violations.push(format!("{}: values outside ψ̃(ℤ): {:?}", r.psi, r.containment_failures));
        }
        if !r.reduction_failures.is_empty() {
            violations.push(format!("{}: reductions differ mod {:?}", r.psi, r.reduction_failures));
        }
        table.push(vec![
            r.index.to_string(),
            r.psi.to_string(),
            r.height.to_string(),
            r.values_checked.to_string(),
            r.containment_failures.len().to_string(),
            join(&r.primes_checked),
            join(&r.reduction_failures),
        ]);
    }
    Ok(Produced {
        json: json_bytes(&prov.wrap(&rows)),
        csv: Some(table.to_bytes()),
        violations,
    })
}
