//! End-to-end tests against the compiled binary: exit codes, file schemas,
//! determinism, and the validate gates. Solves run at R = 10 to stay quick.

use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringsol"))
        .args(args)
        .output()
        .expect("spawn ringsol")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

/// Value of a summary.csv column, as written.
fn summary_field(dir: &Path, name: &str) -> String {
    let text = read(&dir.join("summary.csv"));
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().expect("header").split(',').collect();
    let row: Vec<&str> = lines.next().expect("data row").split(',').collect();
    let idx = header
        .iter()
        .position(|c| *c == name)
        .unwrap_or_else(|| panic!("column {name}"));
    row[idx].to_string()
}

#[test]
fn solve_writes_profile_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "solve",
        "--R",
        "10",
        "--m",
        "1",
        "--P0",
        "100",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("beta"));

    let profile = read(&dir.path().join("profile.csv"));
    let lines: Vec<&str> = profile.lines().collect();
    assert_eq!(lines[0], "r,u,u_r,u_rr");
    assert_eq!(lines.len(), 1 + 1024);
    assert!(profile.ends_with('\n'));
    assert!(!profile.contains('\r'));

    let beta: f64 = summary_field(dir.path(), "beta").parse().unwrap();
    assert!((beta - (-0.7818)).abs() < 5e-3, "beta {beta}");
    assert_eq!(summary_field(dir.path(), "converged"), "true");
    assert_eq!(summary_field(dir.path(), "positive"), "true");
    assert_eq!(summary_field(dir.path(), "beta_ok"), "true");
}

#[test]
fn rejects_non_positive_flux() {
    let out = run(&["solve", "--R", "20", "--m", "1", "--P0", "0"]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("P0 must be positive"));
}

#[test]
fn missing_flux_is_a_usage_error() {
    let out = run(&["solve", "--R", "20", "--m", "1"]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("--P0"));
}

#[test]
fn reruns_are_byte_identical() {
    let d1 = TempDir::new().unwrap();
    let d2 = TempDir::new().unwrap();
    for d in [&d1, &d2] {
        let out = run(&[
            "solve",
            "--R",
            "10",
            "--m",
            "2",
            "--P0",
            "60",
            "--out-dir",
            d.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    for name in ["profile.csv", "summary.csv"] {
        assert_eq!(
            read(&d1.path().join(name)),
            read(&d2.path().join(name)),
            "{name} differs between runs"
        );
    }
}

#[test]
fn sweep_orders_rows_m_outer_flux_inner() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "sweep",
        "--R",
        "10",
        "--m",
        "1",
        "--m",
        "2",
        "--P0",
        "50",
        "--P0",
        "100",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let table = read(&dir.path().join("beta_vs_P0.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(
        lines[0],
        "m,P0,beta,delta_beta,beta_upper_bound,converged,positive"
    );
    assert_eq!(lines.len(), 1 + 4);
    let keys: Vec<(f64, f64)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(
        keys,
        vec![(1.0, 50.0), (1.0, 100.0), (2.0, 50.0), (2.0, 100.0)]
    );
}

#[test]
fn sweep_row_matches_standalone_solve() {
    let solve_dir = TempDir::new().unwrap();
    let sweep_dir = TempDir::new().unwrap();
    let out = run(&[
        "solve",
        "--R",
        "10",
        "--m",
        "2",
        "--P0",
        "50",
        "--out-dir",
        solve_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&[
        "sweep",
        "--R",
        "10",
        "--m",
        "2",
        "--P0",
        "50",
        "--out-dir",
        sweep_dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let table = read(&sweep_dir.path().join("beta_vs_P0.csv"));
    let row: Vec<&str> = table.lines().nth(1).expect("one row").split(',').collect();
    assert_eq!(row[2], summary_field(solve_dir.path(), "beta"));
    assert_eq!(row[3], summary_field(solve_dir.path(), "delta_beta"));
}

#[test]
fn validate_accepts_solver_artifacts() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "solve",
        "--R",
        "10",
        "--m",
        "1",
        "--P0",
        "80",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = run(&["validate", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stdout: {}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("validation OK"));
    assert!(text.contains("flux consistency"));
    assert!(text.contains("beta consistency"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn validate_solves_fresh_without_artifacts() {
    let out = run(&["validate", "--R", "10", "--m", "1", "--P0", "50"]);
    assert_eq!(code(&out), 0, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("validation OK"));
}

#[test]
fn validate_rejects_tampered_profile() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "solve",
        "--R",
        "10",
        "--m",
        "1",
        "--P0",
        "80",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    // Scale the u column; the recorded flux and beta no longer match.
    let path = dir.path().join("profile.csv");
    let text = read(&path);
    let mut lines = text.lines();
    let mut tampered = format!("{}\n", lines.next().unwrap());
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let u: f64 = f[1].parse().unwrap();
        tampered.push_str(&format!("{},{:.16e},{},{}\n", f[0], u * 1.05, f[2], f[3]));
    }
    std::fs::write(&path, tampered).unwrap();

    let out = run(&["validate", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2, "stdout: {}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("FAIL  flux consistency"));
    assert!(text.contains("validation FAILED"));
}

#[test]
fn validate_reports_malformed_file_with_line() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "solve",
        "--R",
        "10",
        "--m",
        "1",
        "--P0",
        "80",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let path = dir.path().join("profile.csv");
    let text = read(&path);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let cut = lines[4].rfind(',').unwrap();
    lines[4].truncate(cut);
    std::fs::write(&path, lines.join("\n") + "\n").unwrap();

    let out = run(&["validate", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 65);
    assert!(stderr(&out).contains("line 5"), "stderr: {}", stderr(&out));
}

#[test]
fn export_figure_two_with_script() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "export",
        "--figure",
        "2",
        "--R",
        "10",
        "--gnuplot",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let table = read(&dir.path().join("fig2.csv"));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines[0], "P0,r,u");
    assert_eq!(lines.len(), 1 + 10 * 1024);
    let script = read(&dir.path().join("plot.gp"));
    assert!(script.contains("fig2.csv"));
}

#[test]
fn export_rejects_unknown_figure() {
    let out = run(&["export", "--figure", "7"]);
    assert_eq!(code(&out), 64);
    assert!(stderr(&out).contains("figure"));
}

#[test]
fn config_file_overlays_under_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# base setup\nR = 10\nN = 16\nP0 = 50\n").unwrap();
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--P0",
        "100",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let p0: f64 = summary_field(dir.path(), "P0").parse().unwrap();
    assert_eq!(p0, 100.0, "flag must override the config file");
    assert_eq!(summary_field(dir.path(), "N"), "16");
    let radius: f64 = summary_field(dir.path(), "R").parse().unwrap();
    assert_eq!(radius, 10.0);
}

#[test]
fn config_file_rejects_unknown_key() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "R = 10\nbogus = 3\n").unwrap();
    let out = run(&["solve", "--config", cfg.to_str().unwrap(), "--P0", "5"]);
    assert_eq!(code(&out), 64);
    let text = stderr(&out);
    assert!(
        text.contains("line 2") && text.contains("bogus"),
        "stderr: {text}"
    );
}

#[test]
fn json_lines_format_writes_jsonl_siblings() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "solve",
        "--R",
        "10",
        "--m",
        "1",
        "--P0",
        "50",
        "--format",
        "json-lines",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let profile = read(&dir.path().join("profile.jsonl"));
    assert!(profile.lines().next().unwrap().starts_with("{\"r\":"));
    assert_eq!(profile.lines().count(), 1024);
    let summary = read(&dir.path().join("summary.jsonl"));
    assert!(summary.contains("\"beta\":"));
    assert!(!dir.path().join("profile.csv").exists());
}
