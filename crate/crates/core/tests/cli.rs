use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uav-coexist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json_lines(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Parses `# header` + CSV into column names and numeric rows.
fn csv_table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    let body: String = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let columns = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (columns, rows)
}

#[test]
fn single_point_records() {
    let text = stdout(&run(&["eval", "--metric", "srp"]));
    let records = json_lines(&text);
    assert_eq!(records.len(), 2);
    for (rec, scheme) in records.iter().zip(["soma", "tdma"]) {
        assert_eq!(rec["metric"], "srp");
        assert_eq!(rec["scheme"], scheme);
        let v = rec["analytic"].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v));
        assert!(rec.get("simulated").is_none());
    }
    let soma = records[0]["analytic"].as_f64().unwrap();
    assert!((soma - 0.5498).abs() < 1e-3, "{soma}");
}

#[test]
fn simulated_record_has_error_bar() {
    let text = stdout(&run(&[
        "eval",
        "--metric",
        "srp",
        "--scheme",
        "tdma",
        "--simulate",
        "--trials",
        "2000",
        "--r-max",
        "500",
    ]));
    let rec = &json_lines(&text)[0];
    assert!(rec["simulated"].as_f64().is_some());
    assert!(rec["std_err"].as_f64().unwrap() > 0.0);
}

#[test]
fn fig3a_preset_columns() {
    let (columns, rows) = csv_table(&stdout(&run(&["eval", "--preset", "fig3a"])));
    assert_eq!(columns, ["r0_m", "gamma_th_db", "srp_soma", "srp_tdma"]);
    assert_eq!(rows.len(), 33);
}

#[test]
fn fig6_preset_peak() {
    let (columns, rows) = csv_table(&stdout(&run(&["eval", "--preset", "fig6"])));
    let x = columns.iter().position(|c| c == "lambda_d_raw").unwrap();
    for col in ["tc_soma", "tc_tdma"] {
        let y = columns.iter().position(|c| c == col).unwrap();
        let best = rows.iter().max_by(|a, b| a[y].total_cmp(&b[y])).unwrap();
        assert!(
            (best[x] - 0.0115).abs() <= 0.0005,
            "{col} peaks at {}",
            best[x]
        );
    }
    let solved: Value = serde_json::from_str(&stdout(&run(&[
        "solve",
        "optimal-comm-density",
        "--preset",
        "fig6",
    ])))
    .unwrap();
    let raw = solved["details"]["lambda_d_raw"].as_f64().unwrap();
    assert!((raw - 0.0115).abs() <= 0.0005, "{raw}");
}

#[test]
fn tdma_density_solution_round_trips() {
    let solved: Value = serde_json::from_str(&stdout(&run(&[
        "solve",
        "max-density-tdma",
        "--target",
        "0.9",
    ])))
    .unwrap();
    let raw = solved["details"]["lambda_r_raw"]
        .as_f64()
        .unwrap()
        .to_string();
    let text = stdout(&run(&[
        "eval",
        "--metric",
        "srp",
        "--scheme",
        "tdma",
        "--lambda-d-raw",
        "0",
        "--tau",
        "0.5",
        "--lambda-r-raw",
        &raw,
    ]));
    let srp = json_lines(&text)[0]["analytic"].as_f64().unwrap();
    assert!((srp - 0.9).abs() <= 1e-6, "{srp}");
}

#[test]
fn unreachable_guard_target_exits_2() {
    let out = run(&["solve", "min-guard-radius", "--target", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conflicting_threshold_flags_exit_1() {
    let out = run(&["eval", "--gamma-th-db", "-5", "--gamma-th", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["eval", "--beta-th-db", "0", "--beta-th", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenario.json");
    std::fs::write(&path, "{\n  \"alpha\": 2.0,\n  \"alpah_i\": 2.5\n}\n").unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "eval"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");

    std::fs::write(&path, "{\"r0_m\": 15, \"gamma_th_db\": -20}").unwrap();
    let text = stdout(&run(&[
        "--config",
        path.to_str().unwrap(),
        "eval",
        "--metric",
        "srp",
    ]));
    assert_eq!(json_lines(&text).len(), 2);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |name: &str| {
        let path = dir.path().join(name);
        let out = run(&[
            "eval",
            "--preset",
            "fig4a",
            "--simulate",
            "--trials",
            "3000",
            "--r-max",
            "300",
            "-o",
            path.to_str().unwrap(),
        ]);
        stdout(&out);
        std::fs::read(path).unwrap()
    };
    let a = args("a.csv");
    assert!(!a.is_empty());
    assert_eq!(a, args("b.csv"));
}

#[test]
fn unknown_preset_is_a_config_error() {
    let out = run(&["eval", "--preset", "fig9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_accepts_hex() {
    let with = |seed: &str| {
        stdout(&run(&[
            "eval",
            "--metric",
            "srp",
            "--scheme",
            "tdma",
            "--simulate",
            "--trials",
            "500",
            "--r-max",
            "200",
            "--seed",
            seed,
        ]))
    };
    assert_eq!(with("0x5EED"), with("24301"));
    assert_ne!(with("0x5EED"), with("7"));
}
