use std::collections::BTreeMap;
use std::path::Path;

use sievelab::config::{LabConfig, Scenario, SetSpec};
use sievelab::error::{EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_INVARIANT, EXIT_OK};
use sievelab::scenario::{RunOutcome, ScenarioStatus};
use sievelab::LabError;
use sievelab_core::Error as CoreError;

fn config_error_path(text: &str) -> String {
    match LabConfig::parse(text) {
        Err(LabError::Config { path, .. }) => path,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn example_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/example.toml");
    let cfg = LabConfig::load(&path).unwrap();
    assert_eq!(cfg.scenarios.len(), 9);
    assert_eq!(cfg.output_dir, Path::new("reports"));
}

#[test]
fn defaults_are_filled_in() {
    let cfg = LabConfig::parse("seed = 3\n[[scenario]]\nkind = \"theorem14-audit\"\nname = \"a\"\n").unwrap();
    assert_eq!(cfg.output_dir, Path::new("reports"));
    match &cfg.scenarios[0] {
        Scenario::EnergyAudit(p) => {
            assert_eq!((p.x, p.count, p.min_size, p.max_size), (10_000, 100, 50, 500));
        }
        other => panic!("unexpected {other:?}"),
    }
    let cfg = LabConfig::parse("seed = 3\n[[scenario]]\nkind = \"large-sieve-sharpness\"\nname = \"s\"\nx_grid = [100]\n").unwrap();
    match &cfg.scenarios[0] {
        Scenario::LargeSieveSharpness(p) => assert_eq!(p.set, SetSpec::Squares),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn hash_ignores_formatting_but_not_values() {
    let a = LabConfig::parse("seed = 3\n[[scenario]]\nkind = \"theorem14-audit\"\nname = \"a\"\n").unwrap();
    let b = LabConfig::parse("# comment\nseed=3\n\n[[scenario]]\nname = \"a\"\nkind = \"theorem14-audit\"\nx = 10000\n").unwrap();
    let c = LabConfig::parse("seed = 4\n[[scenario]]\nkind = \"theorem14-audit\"\nname = \"a\"\n").unwrap();
    assert_eq!(a.hash(), b.hash());
    assert_ne!(a.hash(), c.hash());
    assert_eq!(a.hash().len(), 64);
}

#[test]
fn errors_carry_field_paths() {
    assert_eq!(config_error_path("seed = 1\nwat = 1\n"), "wat");
    assert!(config_error_path("seed = 1\n[[scenario]]\nkind = \"theorem14-audit\"\nname = \"a\"\ncount = -3\n")
        .starts_with("scenario[0]"));
    assert_eq!(
        config_error_path("seed = 1\n[[scenario]]\nkind = \"interval-iteration\"\nname = \"i\"\nx = 1000\nepsilon = 2.0\n"),
        "scenario[0].epsilon"
    );
    assert_eq!(
        config_error_path(
            "seed = 1\n[[scenario]]\nkind = \"theorem14-audit\"\nname = \"a\"\n[[scenario]]\nkind = \"theorem14-audit\"\nname = \"a\"\n"
        ),
        "scenario[1].name"
    );
    assert_eq!(
        config_error_path("seed = 1\n[[scenario]]\nkind = \"theorem14-audit\"\nname = \"../x\"\n"),
        "scenario[0].name"
    );
}

#[test]
fn quadratic_sets_parse_from_strings() {
    let text = "seed = 1\n[[scenario]]\nkind = \"large-sieve-sharpness\"\nname = \"s\"\nx_grid = [100]\nset = { kind = \"quadratic\", psi = \"(x^2+x)/2\" }\n";
    let cfg = LabConfig::parse(text).unwrap();
    match &cfg.scenarios[0] {
        Scenario::LargeSieveSharpness(p) => match &p.set {
            SetSpec::Quadratic { psi } => assert_eq!(psi.coefficients(), (1, 1, 0, 2)),
            other => panic!("unexpected {other:?}"),
        },
        other => panic!("unexpected {other:?}"),
    }
    assert!(config_error_path(&text.replace("(x^2+x)/2", "x^")).starts_with("scenario[0]"));
}

fn status(code: i32) -> ScenarioStatus {
    ScenarioStatus {
        name: format!("s{code}"),
        kind: "quasisquare-census".into(),
        status: String::new(),
        exit_code: code,
        messages: Vec::new(),
        files: Vec::new(),
    }
}

#[test]
fn run_exit_code_is_the_most_severe() {
    let outcome = |codes: &[i32]| RunOutcome {
        config_hash: String::new(),
        statuses: codes.iter().copied().map(status).collect(),
        files: BTreeMap::new(),
    };
    assert_eq!(outcome(&[]).exit_code(), EXIT_OK);
    assert_eq!(outcome(&[EXIT_OK, EXIT_CONFIG]).exit_code(), EXIT_CONFIG);
    assert_eq!(outcome(&[EXIT_INFEASIBLE, EXIT_OK]).exit_code(), EXIT_INFEASIBLE);
    assert_eq!(outcome(&[EXIT_INFEASIBLE, EXIT_INVARIANT, EXIT_CONFIG]).exit_code(), EXIT_INVARIANT);
}

#[test]
fn core_errors_map_to_exit_codes() {
    let code = |e: CoreError| LabError::from(e).exit_code();
    assert_eq!(code(CoreError::Infeasible("x".into())), EXIT_INFEASIBLE);
    assert_eq!(code(CoreError::InvariantViolation("x".into())), EXIT_INVARIANT);
    assert_eq!(code(CoreError::Overflow("x".into())), EXIT_INFEASIBLE);
    assert_eq!(code(CoreError::Precondition("x".into())), EXIT_CONFIG);
    assert_eq!(LabError::Invariant("x".into()).kind(), "invariant_violation");
}
