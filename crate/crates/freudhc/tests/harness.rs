use freudhc::config::{parse_list, ExperimentConfig, Family, Grid, Lp};
use freudhc::corpus::Corpus;
use freudhc::experiments::{approx_table, rates_from_table, run_experiment, ApproxRequest};
use freudhc::output::{fmt_f64, Table};
use freudhc::HarnessError;
use freudhc_core::LpIndex;

const CONFIG: &str = r#"{
    "weight": {"lambda": 4, "a": 1, "b": 0.2, "d": 2, "r": 2, "p": 2, "q": "inf"},
    "family": "trunc",
    "grid": {"n": [8, 16]},
    "seed": 11
}"#;

#[test]
fn config_defaults_and_norm_indices() {
    let cfg = ExperimentConfig::from_json(CONFIG).unwrap();
    assert_eq!(cfg.weight.q, Lp(LpIndex::Infinity));
    assert_eq!(cfg.family, Family::Trunc);
    assert_eq!(cfg.grid, Grid::N(vec![8, 16]));
    assert_eq!(cfg.output.approx_csv, "approx.csv");
    let params = cfg.validate().unwrap();
    assert_eq!(params.dim(), 2);
    assert!((params.rate_exponents().r_lambda - 1.5).abs() < 1e-15);
}

#[test]
fn config_rejects_unknown_fields_and_bad_values() {
    let extra = CONFIG.replace("\"seed\": 11", "\"seed\": 11, \"sed\": 1");
    assert!(matches!(ExperimentConfig::from_json(&extra), Err(HarnessError::Config(_))));
    let bad_q = CONFIG.replace("\"inf\"", "0.5");
    assert!(ExperimentConfig::from_json(&bad_q).is_err());
    let mut cfg = ExperimentConfig::from_json(CONFIG).unwrap();
    cfg.family = Family::Vp;
    cfg.grid = Grid::Xi(vec![2.5]);
    assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
}

#[test]
fn overrides_take_precedence() {
    let mut cfg = ExperimentConfig::from_json(CONFIG).unwrap();
    let env = [("FREUDHC_LAMBDA", "3"), ("FREUDHC_Q", "2"), ("FREUDHC_SEED", "5"), ("FREUDHC_TIMING", "1")];
    cfg.apply_overrides(|k| env.iter().find(|(key, _)| *key == k).map(|(_, v)| v.to_string())).unwrap();
    assert_eq!(cfg.weight.lambda, 3.0);
    assert_eq!(cfg.weight.q, Lp(LpIndex::Finite(2.0)));
    assert_eq!(cfg.seed, 5);
    assert!(cfg.timing);
    let err = cfg.apply_overrides(|k| (k == "FREUDHC_D").then(|| "two".to_string())).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn header_json_ignores_output_location() {
    let mut a = ExperimentConfig::from_json(CONFIG).unwrap();
    let mut b = a.clone();
    a.output.dir = "/tmp/x".into();
    b.output.dir = "elsewhere".into();
    assert_eq!(a.header_json(), b.header_json());
}

#[test]
fn list_syntax() {
    assert_eq!(parse_list("2..5").unwrap(), [2.0, 3.0, 4.0, 5.0]);
    assert_eq!(parse_list("8,16,...,64").unwrap(), [8.0, 16.0, 32.0, 64.0]);
    assert_eq!(parse_list("1, 2.5").unwrap(), [1.0, 2.5]);
    assert!(parse_list("").is_err());
    assert!(parse_list("5..2").is_err());
}

#[test]
fn table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut t = Table::new("test", &["a", "b"]);
    t.push_meta("note", "x, y");
    t.rows.push(vec!["1".into(), fmt_f64(0.1)]);
    t.rows.push(vec!["2".into(), fmt_f64(f64::INFINITY)]);
    let path = dir.path().join("t.csv");
    t.emit(Some(&path)).unwrap();
    let back = Table::read(&path).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.rows[0][1].parse::<f64>().unwrap(), 0.1);
}

#[test]
fn expansions_inside_the_cross_are_reproduced() {
    let corpus = Corpus::from_json(
        r#"{"functions": [{"kind": "expansion", "id": "e", "dim": 2, "terms": [{"k": [0, 3], "c": 1}, {"k": [2, 1], "c": -0.5}]}]}"#,
        0,
    )
    .unwrap();
    let cfg = ExperimentConfig::from_json(
        r#"{"weight": {"lambda": 2, "d": 2}, "family": "vp", "grid": {"xi": [0, 1, 2, 3]}}"#,
    )
    .unwrap();
    let req = ApproxRequest::from_config(&cfg, Some(1)).unwrap();
    let t = approx_table(&req, &corpus, None).unwrap();
    let errors: Vec<f64> = t.rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(errors.len(), 4);
    assert!(errors[0] > 0.0);
    // V_xi reproduces every index with sum of levels <= xi - 1
    assert_eq!(errors[3], 0.0);
    assert!(errors.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn rates_recover_a_planted_law() {
    let mut t = Table::new("approx", &["function_id", "family", "xi", "rank", "error", "runtime_ms"]);
    for (k, v) in [("dim", "2"), ("r_lambda", "1.5e0"), ("delta", "0e0")] {
        t.push_meta(k, v);
    }
    for xi in 2..14 {
        let n = 2f64.powi(xi);
        let e = n.powf(-1.25) * n.ln().powf(0.5);
        t.rows.push(vec!["f".into(), "vp".into(), xi.to_string(), "0".into(), fmt_f64(e), String::new()]);
    }
    let r = rates_from_table(&t, None, 1.0).unwrap();
    assert_eq!(r.len(), 1);
    assert!((r[0].alpha.unwrap() + 1.25).abs() < 1e-9);
    assert!((r[0].gamma.unwrap() - 0.5).abs() < 1e-9);
    assert_eq!((r[0].theory_alpha, r[0].theory_gamma), (-1.5, 1.0));
    assert!(rates_from_table(&t, Some("g"), 1.0).is_err());
}

#[test]
fn laws_are_skipped_off_q2_and_refused_when_named() {
    let corpus = Corpus::builtin(0).unwrap();
    let mut cfg = ExperimentConfig::from_json(
        r#"{"weight": {"lambda": 2, "q": 1}, "family": "vp", "grid": {"xi": [2]}, "functions": ["p3"]}"#,
    )
    .unwrap();
    let req = ApproxRequest::from_config(&cfg, Some(1)).unwrap();
    assert_eq!(approx_table(&req, &corpus, None).unwrap().rows.len(), 1);
    cfg.functions = Some(vec!["law_s1.0_d1".into()]);
    let req = ApproxRequest::from_config(&cfg, Some(1)).unwrap();
    assert_eq!(approx_table(&req, &corpus, None).unwrap_err().exit_code(), 2);
}

#[test]
fn run_experiment_writes_both_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_json(
        r#"{"weight": {"lambda": 2, "d": 2, "r": 2}, "family": "fourier", "grid": {"xi": [1, 2, 3, 4, 5, 6]},
            "functions": ["law_s1.5_d2", "rand_d2_m8"], "seed": 9}"#,
    )
    .unwrap();
    let art = run_experiment(&cfg, Some(dir.path()), Some(2)).unwrap();
    let t = Table::read(&art.approx_csv).unwrap();
    assert_eq!(t.rows.len(), 12);
    assert_eq!(t.meta("command"), Some("approx"));
    let rates: serde_json::Value = serde_json::from_slice(&std::fs::read(&art.rates_json).unwrap()).unwrap();
    assert_eq!(rates[0]["function_id"], "law_s1.5_d2");
    assert_eq!(rates[0]["samples"], 6);
}
