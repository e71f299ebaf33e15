use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sievelab::config::LabConfig;
use sievelab::error::{EXIT_INVARIANT, EXIT_OK};
use sievelab::extremal::{extremal_search, Method};
use sievelab::output::{fmt_f64, json_bytes, CsvTable};
use sievelab::scenario::run_config;
use sievelab::{suite, LabError, LabResult};
use sievelab_core::exec;
use sievelab_core::fourier::build_majorant;
use sievelab_core::numtheory::primes_up_to;
use sievelab_core::quadratic::{quasisquares, CensusMode};

/// Worker count for the parallel pool. The only environment variable read.
const WORKERS_VAR: &str = "SIEVELAB_WORKERS";

#[derive(Parser)]
#[command(name = "sievelab", version, about = "Residue-class sieve experiments")]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario in a TOML config and write its reports.
    Run {
        config: PathBuf,
        /// Output directory; overrides `output_dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a large A ⊆ [1, X] occupying at most (p+1)/2 classes mod each prime.
    Search {
        #[arg(long)]
        x: u64,
        /// Comma-separated primes.
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value = "branch-and-bound")]
        method: Method,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suite, or the listed criteria.
    Verify {
        #[arg(long = "criterion")]
        criteria: Vec<u8>,
    },
    /// Write a standalone table.
    Export {
        #[command(subcommand)]
        table: ExportTable,
        #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
        format: Format,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExportTable {
    /// Coefficients of the Fejér-type majorant for a given ε.
    Majorant {
        #[arg(long)]
        epsilon: f64,
    },
    /// Squarefree q <= Y that are squares modulo the primes in [lo, hi].
    Census {
        #[arg(long)]
        y: u64,
        #[arg(long)]
        prime_lo: u64,
        #[arg(long)]
        prime_hi: u64,
        #[arg(long)]
        theta: Option<f64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match configure(&cli).and_then(|()| dispatch(cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

fn configure(cli: &Cli) -> LabResult<()> {
    if let Ok(v) = std::env::var(WORKERS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| LabError::config(WORKERS_VAR, format!("`{v}` is not a positive integer")))?;
        exec::init_workers(n);
    }
    if cli.sequential {
        exec::set_parallel(false);
    }
    Ok(())
}

fn dispatch(command: Command) -> LabResult<i32> {
    match command {
        Command::Run { config, out } => {
            let cfg = LabConfig::load(&config)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
            let outcome = run_config(&cfg);
            outcome.write_to(&dir)?;
            for s in &outcome.statuses {
                eprintln!("{:<24} {:<26} {}", s.name, s.kind, s.status);
                for m in &s.messages {
                    eprintln!("    {m}");
                }
            }
            eprintln!("reports in {}", dir.display());
            Ok(outcome.exit_code())
        }
        Command::Search { x, primes, method, budget, seed, format, out } => {
            let r = extremal_search(x, &primes, budget, method, seed)?;
            let bytes = match format {
                Format::Json => json_bytes(&r),
                Format::Csv => {
                    let mut t = CsvTable::new(&["x", "method", "size", "certified_optimal", "squares_baseline", "elements"]);
                    t.push(vec![
                        r.x.to_string(),
                        r.method.to_string(),
                        r.size.to_string(),
                        r.certified_optimal.to_string(),
                        r.squares_baseline.to_string(),
                        r.best.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
                    ]);
                    t.to_bytes()
                }
            };
            emit(&bytes, out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::Verify { criteria } => {
            let ids: Vec<u8> = if criteria.is_empty() { suite::criterion_ids().collect() } else { criteria };
            let mut failed = false;
            for id in ids {
                let report = suite::run_criterion(id)
                    .ok_or_else(|| LabError::config("criterion", format!("no criterion {id}")))?;
                println!("{report}");
                failed |= !report.passed;
            }
            Ok(if failed { EXIT_INVARIANT } else { EXIT_OK })
        }
        Command::Export { table, format, out } => {
            let bytes = match table {
                ExportTable::Majorant { epsilon } => {
                    let f = build_majorant(epsilon)?;
                    match format {
                        Format::Json => json_bytes(&f),
                        Format::Csv => {
                            let mut t = CsvTable::new(&["k", "c_k"]);
                            for (k, c) in f.coefficient_table() {
                                t.push(vec![k.to_string(), fmt_f64(c)]);
                            }
                            t.to_bytes()
                        }
                    }
                }
                ExportTable::Census { y, prime_lo, prime_hi, theta } => {
                    let primes = primes_up_to(prime_hi)?.window(prime_lo.max(3), prime_hi).to_vec();
                    if primes.is_empty() {
                        return Err(LabError::config("prime_lo", "no odd primes in [prime_lo, prime_hi]"));
                    }
                    let mode = theta.map_or(CensusMode::All, |theta| CensusMode::Fraction { theta });
                    let c = quasisquares(y, &primes, mode)?;
                    match format {
                        Format::Json => json_bytes(&c),
                        Format::Csv => {
                            let mut t = CsvTable::new(&["q"]);
                            for q in &c.hits {
                                t.push(vec![q.to_string()]);
                            }
                            t.to_bytes()
                        }
                    }
                }
            };
            emit(&bytes, out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(bytes: &[u8], out: Option<&Path>) -> LabResult<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}
