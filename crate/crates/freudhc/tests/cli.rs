use std::path::Path;
use std::process::{Command, Output};

use freudhc::output::Table;

fn freudhc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freudhc"))
        .args(args)
        .env_remove("FREUDHC_JOBS")
        .output()
        .expect("binary runs")
}

fn freudhc_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_freudhc"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_table(path: &Path) -> Table {
    Table::read(path).unwrap()
}

fn write_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let path = dir.join("cfg.json");
    let text = format!(
        r#"{{"weight": {{"lambda": 2, "d": 1, "r": 2}}, "family": "vp", "grid": {{"xi": [2, 3, 4, 5, 6]}},
            "functions": ["law_s1.5_d1", "p3", "rand_d1_m16"], "seed": 3{extra}}}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn lambda_at_most_one_is_a_usage_error() {
    for lambda in ["1", "0.5"] {
        let o = freudhc(&["recurrence", "--lambda", lambda, "--n", "4"]);
        assert_eq!(o.status.code(), Some(2), "lambda = {lambda}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("lambda"));
    }
}

#[test]
fn unknown_flags_exit_2() {
    assert_eq!(freudhc(&["widths", "--dim", "2", "--bogus"]).status.code(), Some(2));
    assert_eq!(freudhc(&["approx", "--lambda", "2", "--family", "vp", "--xi-list", "1.5"]).status.code(), Some(2));
}

#[test]
fn recurrence_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub/rec.csv");
    let o = freudhc(&["recurrence", "--lambda", "4", "--n", "20", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&out);
    assert_eq!(t.header, ["k", "beta_k", "beta_tilde_k", "string_residual_if_lambda4"]);
    assert_eq!(t.meta("command"), Some("recurrence"));
    assert_eq!(t.meta("lambda"), Some("4e0"));
    assert_eq!(t.rows.len(), 21);
    let res: f64 = t.rows[10][3].parse().unwrap();
    assert!(res.abs() < 1e-8);
    assert!(t.rows[0][3].is_empty());
}

#[test]
fn quadrature_weights_integrate_the_weight() {
    let o = freudhc(&["quadrature", "--lambda", "2", "--n", "12"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(body.len(), 12);
    let total: f64 = body.iter().map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - std::f64::consts::PI.sqrt()).abs() < 1e-12, "{total}");
}

#[test]
fn widths_in_one_dimension_are_closed_form() {
    let o = freudhc(&["widths", "--dim", "1", "--r-lambda", "1.5", "--n-max", "20"]);
    assert!(o.status.success());
    for line in stdout(&o).lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let n: f64 = f[0].parse().unwrap();
        let d: f64 = f[1].parse().unwrap();
        assert!((d * (n + 1.0).powf(1.5) - 1.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn approx_then_rates() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let o = freudhc(&[
        "approx", "--lambda", "2", "--r", "2", "--family", "vp", "--xi-list", "3..12", "--functions", "law_s2.5_d1,p3",
        "--out", csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&csv);
    assert_eq!(t.header, ["function_id", "family", "xi", "rank", "error", "runtime_ms"]);
    assert_eq!(t.rows.len(), 20);
    assert!(t.meta("config").unwrap().contains("\"family\":\"vp\""));
    assert!(t.rows.iter().all(|r| r[5].is_empty()));
    let p3_zero = t.rows.iter().filter(|r| r[0] == "p3").all(|r| r[4] == "0e0");
    assert!(p3_zero);

    let o = freudhc(&["rates", csv.to_str().unwrap(), "--function", "law_s2.5_d1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["function_id"], "law_s2.5_d1");
    assert_eq!(v["samples"], 10);
    assert!(v["alpha"].as_f64().unwrap() < -1.0);

    let o = freudhc(&["rates", csv.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert!(arr[1]["alpha"].is_null());
    assert!(arr[1]["note"].as_str().unwrap().contains("zero error"));
}

#[test]
fn approx_accepts_rank_targets() {
    let o = freudhc(&["approx", "--lambda", "2", "--dim", "2", "--family", "trunc", "--n-list", "16,32,64", "--functions", "law_s1.5_d2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let ranks: Vec<u64> = text
        .lines()
        .filter(|l| l.starts_with("law_"))
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ranks.len(), 3);
    for (r, n) in ranks.iter().zip([16, 32, 64]) {
        assert!(*r <= n, "rank {r} above target {n}");
    }
}

#[test]
fn unknown_function_is_a_config_error() {
    let o = freudhc(&["approx", "--lambda", "2", "--family", "vp", "--xi-list", "2", "--functions", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn probe_reports_requested_degrees() {
    let o = freudhc(&["probe", "--kind", "bernstein", "--lambda", "2", "--p", "2", "--q", "2", "--degrees", "4,8", "--trials", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("# kind: bernstein"));
    let degrees: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(degrees, ["4", "8"]);
}

#[test]
fn run_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o1 = freudhc(&["--jobs", "1", "run", "--config", cfg.to_str().unwrap(), "--out-dir", a.to_str().unwrap()]);
    let o2 = freudhc(&["run", "--config", cfg.to_str().unwrap(), "--out-dir", b.to_str().unwrap()]);
    assert!(o1.status.success() && o2.status.success(), "{}", String::from_utf8_lossy(&o1.stderr));
    for file in ["approx.csv", "rates.json"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert_eq!(x, y, "{file}");
    }
    let rates: serde_json::Value = serde_json::from_slice(&std::fs::read(a.join("rates.json")).unwrap()).unwrap();
    assert_eq!(rates.as_array().unwrap().len(), 3);
}

#[test]
fn environment_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "");
    let out = dir.path().join("env");
    let o = freudhc_env(
        &["run", "--config", cfg.to_str().unwrap()],
        &[("FREUDHC_OUT_DIR", out.to_str().unwrap()), ("FREUDHC_FAMILY", "fourier")],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_table(&out.join("approx.csv"));
    assert_eq!(t.meta("family"), Some("fourier"));

    let o = freudhc_env(&["run", "--config", cfg.to_str().unwrap()], &[("FREUDHC_LAMBDA", "0.9")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_needs_something_to_do() {
    assert_eq!(freudhc(&["run"]).status.code(), Some(2));
    assert_eq!(freudhc(&["run", "--config", "/nonexistent/cfg.json"]).status.code(), Some(2));
}

#[test]
fn check_runs_a_selected_suite() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    std::fs::write(&suite, r#"{"name": "small", "seed": 1, "criteria": [2, 4, 8]}"#).unwrap();
    let o = freudhc(&["run", "--check", suite.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.starts_with("PASS")));
}
