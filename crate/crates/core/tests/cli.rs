use std::process::{Command, Output};

use sklyanin::cli::{run, Command as Cmd, Config, Report, Status};

fn sklyanin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sklyanin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Report {
    Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).expect("stdout is a report")
}

#[test]
fn hilbert_qtilde_prints_the_polynomial_ring_dimensions() {
    let out = sklyanin(&["hilbert", "qtilde", "--max-degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.checks.len(), 1);
    assert_eq!(r.checks[0].witness["dims"], serde_json::json!([1, 4, 10, 20, 35]));
}

#[test]
fn btilde_dimensions() {
    let out = sklyanin(&["hilbert", "btilde"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out).checks[0].witness["dims"], serde_json::json!([1, 4, 8, 12, 16]));
}

#[test]
fn points_report_twenty_kernel_matches() {
    let out = sklyanin(&["points", "--alpha", "3", "--beta", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.gamma.to_string(), "-1/2");
    let scheme = &r.checks[0].witness;
    let matches = scheme["points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["rank"] == 3 && p["kernel_is_theta"] == true)
        .count();
    assert_eq!(matches, 20);
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(sklyanin(&["params", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(sklyanin(&["params", "--alpha", "two"]).status.code(), Some(2));
    assert_eq!(sklyanin(&["hilbert", "q", "--max-degree", "6"]).status.code(), Some(2));
    assert_eq!(sklyanin(&["curve", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(sklyanin(&["torsor", "--n", "1"]).status.code(), Some(2));
    assert_eq!(sklyanin(&["params", "--config", "/nonexistent/file"]).status.code(), Some(2));
}

#[test]
fn config_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("preset.cfg");
    std::fs::write(&cfg, "# second preset\nalpha = 3\nbeta = 5\nformat = md\n").unwrap();
    let out_path = dir.path().join("report.md");
    let out = sklyanin(&["params", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let md = std::fs::read_to_string(&out_path).unwrap();
    assert!(md.contains("γ = -1/2"), "{md}");
    assert!(md.contains("| `params` | pass |"));

    std::fs::write(&cfg, "alpha: 3\n").unwrap();
    assert_eq!(sklyanin(&["params", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_all_is_deterministic_and_round_trips() {
    let c = Config {
        samples: 3,
        max_degree: 3,
        ..Config::default()
    };
    let a = run(Cmd::VerifyAll, &c).unwrap();
    let b = run(Cmd::VerifyAll, &c).unwrap();
    assert_eq!(a.without_timings(), b.without_timings());
    assert!(a.checks.iter().all(|r| r.status == Status::Pass), "{}", a.to_markdown());
    assert_eq!(Report::from_json(&a.to_json()).unwrap(), a);
    let ids: Vec<&str> = a.checks.iter().map(|r| r.id.as_str()).collect();
    assert!(ids.contains(&"lines.xi3") && ids.contains(&"torsor.n3"));
}

#[test]
fn seed_zero_has_exactly_one_vanishing_coordinate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.cfg");
    std::fs::write(&cfg, "seeds = 0, 1\n").unwrap();
    let out = sklyanin(&["curve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.checks[0].witness[0]["zero_coordinates"], 1);
}

#[test]
fn any_failing_check_gives_exit_code_one() {
    let mut r = run(Cmd::Cohomology, &Config::default()).unwrap();
    assert_eq!(r.exit_code(), 0);
    r.checks[0].status = Status::Skip;
    assert_eq!(r.exit_code(), 0);
    r.checks[0].status = Status::Fail;
    assert_eq!(r.exit_code(), 1);
    assert!(r.to_markdown().contains("**FAIL**"));
}
