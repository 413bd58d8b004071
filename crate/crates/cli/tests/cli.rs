use std::path::{Path, PathBuf};
use std::process::Command;

use beamsynth_cli::commands::{BENCH_HEADER, COMPARE_HEADER, PATTERN_HEADER};
use beamsynth_cli::{run_bench, run_compare, Scenario, SynthesisReport};
use beamsynth_core::OracleConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_beamsynth"))
}

fn scenario_text(elements: usize, uncertainty: &str, solver: &str) -> String {
    format!(
        r#"
[array]
elements = {elements}

[grid]
mainlobe_deg = 90.0
sidelobes = [
    {{ start_deg = 0.0, stop_deg = 70.0, step_deg = 2.0 }},
    {{ start_deg = 110.0, stop_deg = 180.0, step_deg = 2.0 }},
]

[uncertainty]
{uncertainty}

[solver]
{solver}
"#
    )
}

fn write_scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn synth(scenario: &Path, out: &Path, extra: &[&str]) -> i32 {
    bin()
        .arg("synth")
        .arg(scenario)
        .arg("--out-dir")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn synth_writes_pattern_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        "s.toml",
        &scenario_text(10, "kind = \"radii\"\ndelta = 0.1", "tol = 1e-6\nrho = 1.0\nmax_iter = 100000"),
    );
    let out = dir.path().join("out");
    assert_eq!(synth(&sc, &out, &[]), 0);

    let csv = std::fs::read_to_string(out.join("pattern.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), PATTERN_HEADER);
    assert_eq!(lines.count(), 72);

    let report: SynthesisReport =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(report.converged);
    assert_eq!(report.w_opt.len(), 10);
    assert!(report.final_residuals.unwrap().max() <= 1e-6);
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        "s.toml",
        &scenario_text(10, "kind = \"radii\"\ndelta = 0.1", "tol = 1e-6\nrho = 1.0\nmax_iter = 5"),
    );
    assert_eq!(synth(&sc, &dir.path().join("out"), &[]), 2);
    assert!(dir.path().join("out/pattern.csv").exists());
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let bad_phase = write_scenario(
        dir.path(),
        "phase.toml",
        &scenario_text(
            2,
            "kind = \"fan\"\namplitude = [0.1, 0.1]\nphase_deg = [5.0, 95.0]",
            "tol = 1e-6\nrho = 1.0\nmax_iter = 10",
        ),
    );
    assert_eq!(synth(&bad_phase, &out, &[]), 1);
    assert!(!out.exists(), "nothing is written before validation passes");

    let bad_syntax = write_scenario(dir.path(), "syntax.toml", "[array\nelements = 3");
    let o = bin().arg("synth").arg(&bad_syntax).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    assert_eq!(synth(&dir.path().join("missing.toml"), &out, &[]), 1);
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["bench", "--pairs", "30by16"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        "s.toml",
        &scenario_text(
            12,
            "kind = \"random\"\nu_max = 0.3\nphi_max_deg = 5.0\nseed = 11",
            "tol = 1e-6\nrho = 1.0\nmax_iter = 100000",
        ),
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(synth(&sc, &a, &[]), 0);
    assert_eq!(synth(&sc, &b, &[]), 0);
    let pa = std::fs::read(a.join("pattern.csv")).unwrap();
    assert_eq!(pa, std::fs::read(b.join("pattern.csv")).unwrap());

    let c = dir.path().join("c");
    assert_eq!(synth(&sc, &c, &["--seed", "12"]), 0);
    assert_ne!(pa, std::fs::read(c.join("pattern.csv")).unwrap());
}

#[test]
fn nominal_scenario_has_equal_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        "s.toml",
        &scenario_text(8, "kind = \"radii\"\ndelta = 0.0", "tol = 1e-6\nrho = 1.0\nmax_iter = 100000"),
    );
    let out = dir.path().join("out");
    assert_eq!(synth(&sc, &out, &[]), 0);
    let csv = std::fs::read_to_string(out.join("pattern.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[1], f[2]);
        assert_eq!(f[1], f[3]);
    }
}

#[test]
fn bench_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["bench", "--pairs", "30x16,40x8", "--repeats", "1", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], BENCH_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("30,16,"));
    assert!(lines[2].starts_with("40,8,"));
}

#[test]
fn bench_iterations_do_not_depend_on_repeats() {
    let pairs = [(30, 16), (40, 12)];
    let one = run_bench(&pairs, 0.15, 1).unwrap();
    let five = run_bench(&pairs, 0.15, 5).unwrap();
    for (a, b) in one.iter().zip(&five) {
        assert_eq!((a.m, a.n, a.iterations, a.converged), (b.m, b.n, b.iterations, b.converged));
        assert!(a.oracle_median_s.is_some());
    }
    assert!(run_bench(&pairs, 0.15, 0).is_err());
}

#[test]
fn compare_without_uncertainty_coincides() {
    let sc = Scenario::from_toml_str(&scenario_text(
        8,
        "kind = \"radii\"\ndelta = 0.0",
        "tol = 1e-6\nrho = 1.0\nmax_iter = 100000",
    ))
    .unwrap();
    let r0 = &run_compare(&sc, &[0.0], 0.0, Some(3), &OracleConfig::default()).unwrap()[0];
    assert_eq!(r0.delta_max, 0.0);
    assert!((r0.proposed_db - r0.nominal_db).abs() < 1e-4, "{r0:?}");
    assert!((r0.proposed_db - r0.l2_db).abs() < 1e-2, "{r0:?}");
    let r1 = &run_compare(&sc, &[0.2], 5.0, Some(3), &OracleConfig::default()).unwrap()[0];
    assert!(r1.proposed_db <= r1.l2_db && r1.proposed_db <= r1.nominal_db, "{r1:?}");
}

#[test]
fn compare_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sc = write_scenario(
        dir.path(),
        "s.toml",
        &scenario_text(6, "kind = \"radii\"\ndelta = 0.0", "tol = 1e-6\nrho = 1.0\nmax_iter = 100000"),
    );
    let o = bin()
        .arg("compare")
        .arg(&sc)
        .args(["--u-max", "0.12,0.3", "--phi-max", "5", "--seed", "4", "--out-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], COMPARE_HEADER);
    assert_eq!(lines.len(), 3);
}
