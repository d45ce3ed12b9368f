use std::path::Path;
use std::process::{Command, Output};

use rotafactor_cli::matrix_io::{matrix_csv_full, parse_matrix};
use rotafactor_core::example::table1_loadings;
use rotafactor_core::{build_icm_target, omt_rotate, ot_rotate, Matrix, RotationOptions};

fn rotafactor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rotafactor"))
        .args(args)
        .env_remove("ROTAFACTOR_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json_matrix(v: &serde_json::Value) -> Matrix {
    let rows: Vec<Vec<f64>> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect();
    Matrix::from_rows(&rows).unwrap()
}

#[test]
fn table1_both_methods_as_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let loadings = write(dir.path(), "l.csv", &matrix_csv_full(&table1_loadings(), Some("F1,F2,F3")));
    let o = rotafactor(&["rotate", "--loadings", &loadings, "--icm", "--q", "3", "--method", "both", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let lines: Vec<serde_json::Value> = stdout(&o)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);

    let ot = &lines[0];
    assert_eq!(ot["method"], "ot");
    for key in ["pattern", "phi", "congruence", "per_factor_congruence", "kappa", "ridge_applied"] {
        assert!(ot.get(key).is_some(), "missing {key}");
    }
    let pattern = json_matrix(&ot["pattern"]);
    assert!((pattern[(0, 0)] - 0.52).abs() < 0.005);
    assert!((pattern[(0, 1)] - 0.25).abs() < 0.005);
    assert!((pattern[(0, 2)] + 0.11).abs() < 0.005);
    let phi = json_matrix(&ot["phi"]);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        assert!((phi[(i, j)] + 0.22).abs() < 0.005);
    }

    let omt = &lines[1];
    assert_eq!(omt["method"], "omt");
    assert!(json_matrix(&omt["pattern"]).max_abs_diff(&table1_loadings()) < 0.005);
    assert!(json_matrix(&omt["phi"]).max_abs_diff(&Matrix::identity(3)) < 0.005);
}

#[test]
fn scaled_target_is_echoed_with_identity_phi() {
    let dir = tempfile::tempdir().unwrap();
    let target = Matrix::from_fn(12, 3, |i, j| if i / 4 == j { 1.0 } else { 0.0 });
    let loadings = write(dir.path(), "l.csv", &matrix_csv_full(&target.scale(0.5), None));
    let target_path = write(dir.path(), "t.csv", &matrix_csv_full(&target, None));
    for method in ["omt", "ot"] {
        let o = rotafactor(&["rotate", "--loadings", &loadings, "--target", &target_path, "--method", method, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert!(json_matrix(&v["pattern"]).max_abs_diff(&target.scale(0.5)) < 1e-10, "{method}");
        assert!(json_matrix(&v["phi"]).max_abs_diff(&Matrix::identity(3)) < 1e-10, "{method}");
    }
}

#[test]
fn ragged_loadings_exit_one_with_row_number() {
    let dir = tempfile::tempdir().unwrap();
    let loadings = write(dir.path(), "ragged.csv", "# F1,F2\n.5,.1\n.4,.2\n.3\n.6,.1\n");
    let o = rotafactor(&["rotate", "--loadings", &loadings, "--icm", "--q", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("row 3"), "{err}");
    assert!(err.contains("ragged.csv"), "{err}");
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let loadings = write(dir.path(), "l.csv", &matrix_csv_full(&table1_loadings(), None));
    let cases: Vec<Vec<&str>> = vec![
        vec!["rotate", "--loadings", &loadings, "--icm", "--q", "4"],
        vec!["rotate", "--loadings", &loadings, "--icm"],
        vec!["rotate", "--loadings", "/nonexistent/l.csv", "--icm", "--q", "3"],
        vec!["rotate", "--loadings", &loadings, "--icm", "--q", "3", "--ridge-step", "0"],
        vec!["simulate", "--preset", "paper-table9"],
        vec!["simulate", "--preset", "paper-table2", "--reps", "0"],
        vec!["frobnicate"],
    ];
    for args in cases {
        assert_eq!(rotafactor(&args).status.code(), Some(1), "{args:?}");
    }
    let bad_target = write(dir.path(), "t.csv", &"1,0,0.5\n".repeat(18));
    let o = rotafactor(&["rotate", "--loadings", &loadings, "--target", &bad_target]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("t.csv"));
}

#[test]
fn rank_deficient_loadings_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let flat = Matrix::from_fn(6, 2, |i, _| 0.1 * (i + 1) as f64);
    let loadings = write(dir.path(), "l.csv", &matrix_csv_full(&flat, None));
    let o = rotafactor(&["rotate", "--loadings", &loadings, "--icm", "--q", "2", "--method", "ot"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(rotafactor(&["--help"]).status.code(), Some(0));
    assert_eq!(rotafactor(&["--version"]).status.code(), Some(0));
}

#[test]
fn written_pattern_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let loadings = write(dir.path(), "l.csv", &matrix_csv_full(&table1_loadings().map(|v| v * 1.1 + 0.013), None));
    let outdir = dir.path().join("patterns");
    let o = rotafactor(&[
        "rotate", "--loadings", &loadings, "--icm", "--q", "3", "--method", "both", "--format", "json",
        "--write-pattern", outdir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let l_u = parse_matrix(&std::fs::read_to_string(&loadings).unwrap(), "l").unwrap();
    let target = build_icm_target(18, 3).unwrap();
    let solutions = [
        ot_rotate(&l_u, &target).unwrap(),
        omt_rotate(&l_u, &target, &RotationOptions::default()).unwrap(),
    ];
    for sol in solutions {
        let name = sol.method.short_name();
        let text = std::fs::read_to_string(outdir.join(format!("pattern_{name}.csv"))).unwrap();
        let from_file = parse_matrix(&text, "pattern").unwrap();
        assert_eq!(from_file, sol.pattern, "{name}");
    }
}

#[test]
fn csv_and_markdown_reports() {
    let dir = tempfile::tempdir().unwrap();
    let loadings = write(dir.path(), "l.csv", &matrix_csv_full(&table1_loadings(), None));
    let csv = stdout(&rotafactor(&["rotate", "--loadings", &loadings, "--icm", "--q", "3", "--method", "ot"]));
    assert!(csv.starts_with("# method,ot\n# pattern\n0.52,0.25,-0.11\n"), "{csv}");
    assert!(csv.contains("# pattern full precision\n"));
    assert!(csv.contains("# ridge_applied\n0\n"));
    let md = stdout(&rotafactor(&["rotate", "--loadings", &loadings, "--icm", "--q", "3", "--method", "omt", "--format", "markdown"]));
    assert!(md.contains("## OMT"));
    assert!(md.contains("| 1 | .50 | .20 | -.20 |"), "{md}");
    assert!(md.contains("| 2 | .00 | 1.00 | .00 |"), "{md}");
}

#[test]
fn example_prints_the_three_panels() {
    let o = rotafactor(&["example"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("Initial"));
    assert!(text.contains("   1     .50   .20  -.20     .52   .25  -.11     .50   .20  -.20"), "{text}");
    let ot_block = text.split("Factor inter-correlations (OT)").nth(1).unwrap();
    assert!(ot_block.contains("  F1    1.00  -.22  -.22"));
    let omt_block = text.split("Factor inter-correlations (OMT)").nth(1).unwrap();
    assert!(omt_block.contains("  F2     .00  1.00   .00"));
}

fn simulate_into(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    rotafactor(&args)
}

#[test]
fn presets_give_one_row_per_condition() {
    let root = tempfile::tempdir().unwrap();
    for (preset, rows) in [("paper-table2", 64), ("paper-tableA1", 32)] {
        let dir = root.path().join(preset);
        let o = simulate_into(&dir, &["--preset", preset, "--reps", "1", "--seed", "42", "--parallelism", "2"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o).trim(), dir.join("summary.md").to_str().unwrap());
        let csv = std::fs::read_to_string(dir.join("results.csv")).unwrap();
        assert_eq!(csv.lines().count(), rows + 1, "{preset}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let root = tempfile::tempdir().unwrap();
    let conds = write(root.path(), "c.csv", "n,q,per_factor,level,rho\n300,3,5,low,0.5\n300,3,5,high,0\n");
    let a = root.path().join("a");
    let b = root.path().join("b");
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = simulate_into(dir, &["--conditions", &conds, "--reps", "12", "--seed", "9", "--parallelism", threads, "--format", "json"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for file in ["results.csv", "results.json", "summary.md"] {
        let x = std::fs::read(a.join(file)).unwrap();
        assert_eq!(x, std::fs::read(b.join(file)).unwrap(), "{file}");
    }
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("results.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
    assert_eq!(json[0]["reps_requested"], 12);
}

#[test]
fn seed_comes_from_the_environment_unless_flagged() {
    let root = tempfile::tempdir().unwrap();
    let conds = write(root.path(), "c.csv", "n,q,per_factor,level,rho\n300,3,5,low,0.25\n");
    let run = |name: &str, env: Option<&str>, flag: Option<&str>| {
        let dir = root.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_rotafactor"));
        cmd.args(["simulate", "--conditions", &conds, "--reps", "3", "--out", dir.to_str().unwrap()]);
        cmd.env_remove("ROTAFACTOR_SEED");
        if let Some(e) = env {
            cmd.env("ROTAFACTOR_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        assert!(cmd.output().unwrap().status.success());
        std::fs::read_to_string(dir.join("results.csv")).unwrap()
    };
    let env7 = run("env7", Some("7"), None);
    assert_eq!(env7, run("flag7", None, Some("7")));
    assert_eq!(run("both", Some("7"), Some("8")), run("flag8", None, Some("8")));
    assert_ne!(env7, run("flag8b", None, Some("8")));
}

#[test]
fn bad_conditions_file_names_the_line() {
    let root = tempfile::tempdir().unwrap();
    let conds = write(root.path(), "c.csv", "n,q,per_factor,level,rho\n300,3,5,low,0.5\n300,3,7,low,0.5\n");
    let o = simulate_into(&root.path().join("o"), &["--conditions", &conds]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("c.csv"), "{err}");
}
