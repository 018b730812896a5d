use std::path::Path;
use std::process::{Command, Output};

fn svms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svms")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn solution_values(csv: &str, step: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[2] == step)
        .map(|c| c[4].parse().unwrap())
        .collect()
}

#[test]
fn solve_writes_solution_csv() {
    let o = svms(&[
        "solve", "--method", "galerkin", "--a", "0", "--mu", "1", "--h", "0.5", "--dt", "0.1", "--steps", "1", "--ic", "hat",
        "--bc", "homogeneous",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x,t,step,method,value"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
    // (h/3 · 2) u = (h/3 · 2) · 1 − Δt (2/h) u at the single interior node
    let mid = solution_values(&text, "1")[1];
    assert!((mid - (1.0 / 3.0) / (1.0 / 3.0 + 0.4)).abs() < 1e-15);
}

#[test]
fn solve_accepts_t_final_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "method = \"spectral-feasible\"\na = 300.0\nmu = 1.0\nh = 0.02\ndt = 0.01\nt-final = 0.03\n").unwrap();
    let out = dir.path().join("u.csv");
    let o = svms(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(solution_values(&text, "3").len(), 51);
    // flags override the file
    let o = svms(&["solve", "--config", cfg.to_str().unwrap(), "--method", "stab-codina"]);
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(&format!(",stab-codina,{:.16e}", 0.0)));
}

#[test]
fn solve_reads_nodal_initial_data() {
    let dir = tempfile::tempdir().unwrap();
    let ic = dir.path().join("u0.txt");
    std::fs::write(&ic, "0, 0.5, 1, 0.5, 0").unwrap();
    let o = svms(&[
        "solve", "--method", "stab-1d", "--a", "2", "--mu", "0.1", "--h", "0.25", "--dt", "0.01", "--steps", "2", "--ic", "file",
        "--ic-file", ic.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(solution_values(&stdout(&o), "0"), vec![0.0, 0.5, 1.0, 0.5, 0.0]);
    std::fs::write(&ic, "0 1 0").unwrap();
    let bad = svms(&[
        "solve", "--method", "stab-1d", "--a", "2", "--mu", "0.1", "--h", "0.25", "--dt", "0.01", "--steps", "2", "--ic", "file",
        "--ic-file", ic.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        vec!["solve", "--method", "nope", "--a", "1", "--mu", "1", "--h", "0.5", "--dt", "0.1", "--steps", "1"],
        vec!["solve", "--method", "galerkin", "--a", "1", "--mu", "-1", "--h", "0.5", "--dt", "0.1", "--steps", "1"],
        vec!["solve", "--method", "galerkin", "--a", "1", "--mu", "1", "--h", "0.3", "--dt", "0.1", "--steps", "1"],
        vec!["solve", "--method", "galerkin", "--a", "1", "--mu", "1", "--h", "0.5", "--dt", "0.1", "--t-final", "0.25"],
        vec!["solve", "--method", "galerkin", "--a", "1", "--mu", "1", "--h", "0.5", "--dt", "0.1"],
        vec!["compare", "--preset", "test9"],
        vec!["compare", "--preset", "test3-a", "--provider", "table"],
        vec!["table-info", "--table", "/nonexistent/table.svmk"],
        vec!["frobnicate"],
    ] {
        let o = svms(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn offline_then_table_info() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.svmk");
    let p = path.to_str().unwrap();
    let o = svms(&["offline", "--delta", "10", "--m", "2", "--out", p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(Path::new(p).exists());
    let info = stdout(&svms(&["table-info", "--table", p]));
    assert!(info.contains("delta: 10"));
    assert!(info.contains("M: 2"));
    assert!(info.contains("families (12):"));
    assert!(info.contains("A1[4]") && info.contains("Fbe0[2]"));

    // table files drive the feasible method
    let o = svms(&["compare", "--preset", "test3-a", "--provider", "table", "--table", p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut bytes = std::fs::read(&path).unwrap();
    bytes.truncate(bytes.len() / 2);
    std::fs::write(&path, bytes).unwrap();
    assert_eq!(svms(&["table-info", "--table", p]).status.code(), Some(2));
}

#[test]
fn compare_reports_every_method() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let sols = dir.path().join("s.csv");
    let o = svms(&[
        "compare", "--preset", "test3-a", "--json", json.to_str().unwrap(), "--solutions", sols.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "method,linf_l2,l2_h1");
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.split(',').count() == 3));
    assert!(rows.iter().any(|r| r.starts_with("spectral-feasible,")));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 6);
    let s = std::fs::read_to_string(&sols).unwrap();
    // reference plus six methods, 51 nodes, 4 levels
    assert_eq!(s.lines().count(), 1 + 7 * 51 * 4);
}

#[test]
fn compare_reference_refinement_changes_only_the_reference() {
    let base = stdout(&svms(&["compare", "--preset", "test3-c"]));
    let coarse = stdout(&svms(&["compare", "--preset", "test3-c", "--reference-refinement", "10"]));
    assert_ne!(base, coarse);
    assert_eq!(svms(&["compare", "--preset", "test1", "--reference-refinement", "10"]).status.code(), Some(2));
}

#[test]
fn convergence_prints_both_studies() {
    let o = svms(&["convergence", "--preset", "test1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("study,h,dt,linf_l2,l2_h1"));
    assert_eq!(text.lines().filter(|l| l.starts_with("h,")).count(), 6);
    assert_eq!(text.lines().filter(|l| l.starts_with("dt,")).count(), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("time slopes"));
    assert_eq!(svms(&["convergence", "--preset", "test3-a"]).status.code(), Some(2));
}
