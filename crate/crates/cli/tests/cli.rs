use std::path::{Path, PathBuf};
use std::process::Command;

use bcurrent_cli::output::csv_body;
use bcurrent_cli::scenario::BUNDLED;
use bcurrent_cli::{exit_code, Scenario};

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.json")).display().to_string()
}

fn bcurrent(args: &[&str], out: &Path) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_bcurrent"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
        .status;
    status.code().expect("exited normally")
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn parse_failures_exit_2() {
    let dir = tmp();
    for name in ["bad-json", "bad-expression"] {
        assert_eq!(bcurrent(&["pair", "--scenario", &fixture(name)], dir.path()), exit_code::PARSE, "{name}");
    }
    assert_eq!(bcurrent(&["pair", "--scenario", "no-such-scenario"], dir.path()), exit_code::PARSE);
    assert_eq!(bcurrent(&["pair"], dir.path()), exit_code::PARSE);
    assert_eq!(bcurrent(&["pair", "--steps", "many"], dir.path()), exit_code::PARSE);
    assert_eq!(bcurrent(&["frobnicate"], dir.path()), exit_code::PARSE);
}

#[test]
fn invalid_geometry_exits_3() {
    let dir = tmp();
    assert_eq!(bcurrent(&["classify", "--scenario", &fixture("bad-geometry")], dir.path()), exit_code::GEOMETRY);
}

#[test]
fn tilted_cover_exits_4() {
    let dir = tmp();
    assert_eq!(
        bcurrent(&["pair", "--scenario", &fixture("no-outward-vector")], dir.path()),
        exit_code::NO_OUTWARD_VECTOR
    );
}

#[test]
fn budget_overrun_exits_5_with_partial_csv() {
    let dir = tmp();
    assert_eq!(bcurrent(&["pair", "--scenario", &fixture("budget")], dir.path()), exit_code::BUDGET_EXCEEDED);
    let csv = std::fs::read_to_string(dir.path().join("pairing_0.csv")).unwrap();
    let rows = csv_body(&csv).lines().count() - 1;
    assert!((1..14).contains(&rows), "{rows} rows");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pair.json")).unwrap()).unwrap();
    assert!(report["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn weinstock_failures_exit_6() {
    let dir = tmp();
    assert_eq!(bcurrent(&["weinstock", "--scenario", "bidisc-control"], dir.path()), exit_code::WEINSTOCK);
    assert_eq!(bcurrent(&["weinstock", "--scenario", &fixture("weinstock-strict")], dir.path()), exit_code::WEINSTOCK);
    // errors raised inside the test itself
    assert_eq!(bcurrent(&["weinstock", "--scenario", &fixture("pole-inside")], dir.path()), exit_code::WEINSTOCK);
    // the translated double pole lies outside Ω, so holomorphic forms pair to zero
    assert_eq!(bcurrent(&["weinstock", "--scenario", "square_f=1/z^2"], dir.path()), exit_code::OK);
}

#[test]
fn growth_failure_exits_7() {
    let dir = tmp();
    assert_eq!(bcurrent(&["growth", "--scenario", &fixture("pole-inside")], dir.path()), exit_code::GROWTH);
}

#[test]
fn successful_commands_exit_0() {
    let dir = tmp();
    assert_eq!(bcurrent(&["classify", "--scenario", "square"], dir.path()), exit_code::OK);
    assert_eq!(bcurrent(&["growth", "--scenario", "square_f=1/z^2"], dir.path()), exit_code::OK);
    assert_eq!(bcurrent(&["asymptotics", "--scenario", "square_f=1/z", "--steps", "10"], dir.path()), exit_code::OK);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("asymptotics.json")).unwrap()).unwrap();
    assert_eq!(report["run"]["scenario"]["schedule"]["steps"], 10);
    assert_eq!(report["forms"][0]["candidates"][0].as_array().unwrap().len(), 4);
}

#[test]
fn scenarios_round_trip_through_files() {
    let dir = tmp();
    for (name, _) in BUNDLED {
        let s = Scenario::bundled(name);
        let p: PathBuf = dir.path().join("s.json");
        std::fs::write(&p, s.to_json()).unwrap();
        assert_eq!(Scenario::load(p.to_str().unwrap()).unwrap(), s);
    }
}

#[test]
fn every_scenario_file_is_bundled() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let files: Vec<String> =
        std::fs::read_dir(&root).unwrap().map(|e| std::fs::read_to_string(e.unwrap().path()).unwrap()).collect();
    assert_eq!(files.len(), BUNDLED.len());
    for text in &files {
        assert!(BUNDLED.iter().any(|(_, t)| t == text));
    }
}

#[test]
fn pair_csv_is_independent_of_threads_and_diagnostics() {
    let (a, b, c) = (tmp(), tmp(), tmp());
    let args = ["pair", "--scenario", "square_f=1/z^2", "--steps", "8"];
    assert_eq!(bcurrent(&[&args[..], &["--threads", "1"]].concat(), a.path()), 0);
    assert_eq!(bcurrent(&[&args[..], &["--threads", "4"]].concat(), b.path()), 0);
    assert_eq!(bcurrent(&[&args[..], &["--diagnostics"]].concat(), c.path()), 0);
    let read = |d: &Path| std::fs::read_to_string(d.join("pairing_0.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(read(a.path()), read(c.path()));
    let diag = std::fs::read_to_string(c.path().join("diagnostics_0.csv")).unwrap();
    assert!(csv_body(&diag).starts_with("epsilon,cells,re,im,err_est\n"));
    assert!(csv_body(&diag).lines().count() > 8);
}
