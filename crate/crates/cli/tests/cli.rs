use std::fs;
use std::process::{Command, Output};

fn newsvendor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_newsvendor")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn fractiles() {
    let text = stdout(&newsvendor(&["fractile", "--config", "sku_a"]));
    assert_eq!(text, "model1 0.400000000\nmodel2 0.389105058\nmodel3 0.932367150\n");
}

#[test]
fn fit_output_is_a_loadable_config_fragment() {
    let text =
        stdout(&newsvendor(&["fit", "--min", "235", "--max", "810", "--mean", "548.5217", "--stdev", "159.3643"]));
    assert!(text.contains("c = 600.565"));
    assert!(text.contains("mu_l = 6.266708"));

    let preset = stdout(&newsvendor(&["fit", "--config", "sku_b"]));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fitted.toml");
    fs::write(&path, format!("{}\n{preset}", SKU_B_HEAD)).unwrap();
    let q = stdout(&newsvendor(&[
        "quantile",
        "--config",
        path.to_str().unwrap(),
        "--dist",
        "triangular",
        "--model",
        "model1",
        "--samples",
        "100000",
    ]));
    let value: f64 = q.trim().strip_prefix("model1 ").unwrap().parse().unwrap();
    assert!((value / 187.0 - 1.0).abs() < 0.01, "{value}");
}

const SKU_B_HEAD: &str = r#"schema_version = 1
name = "fitted_b"

[economics]
price = 100.0
variable_cost = 60.0
fixed_cost_monthly = 14000.0
holding_cost = 2.8
safety_buffer = 595.0

[observed_demand]
min = 0.0
max = 85.0
mean = 29.0
stdev = 31.28898
"#;

#[test]
fn explicit_fractile() {
    let text = stdout(&newsvendor(&[
        "quantile",
        "--config",
        "sku_b",
        "--dist",
        "uniform",
        "--fractile",
        "0.5",
        "--samples",
        "100000",
    ]));
    let q: f64 = text.trim().parse().unwrap();
    assert!((q - 297.5).abs() < 2.0, "{q}");
}

#[test]
fn simulate_json_then_report_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("sim.json");
    let trace = dir.path().join("trace.csv");
    let out = newsvendor(&[
        "simulate",
        "--config",
        "sku_b",
        "--runs",
        "20",
        "--seed",
        "5",
        "--format",
        "json",
        "--out",
        json.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(stdout(&out).is_empty());

    let trace_text = fs::read_to_string(&trace).unwrap();
    let mut lines = trace_text.lines();
    assert_eq!(lines.next().unwrap(), "day,arrivals,order_placed,demand,sold,end_inventory,profit_delta");
    assert_eq!(lines.count(), 120 * 23);

    let csv = stdout(&newsvendor(&[
        "report",
        "--input",
        json.to_str().unwrap(),
        "--format",
        "csv",
        "--metric",
        "profit,stockout_days",
    ]));
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "sku,model,true,metric,statistic,safety_stock,model1,model2,model3");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("sku_b,uniform,uniform,profit,mean,"));
    assert!(lines[2].starts_with("sku_b,uniform,uniform,stockout_days,mean,"));
}

#[test]
fn seeds_are_reproducible() {
    let args = [
        "simulate",
        "--config",
        "sku_a",
        "--runs",
        "10",
        "--seed",
        "42",
        "--format",
        "csv",
        "--model",
        "lognormal",
        "--true",
        "triangular",
    ];
    let a = stdout(&newsvendor(&args));
    assert_eq!(a, stdout(&newsvendor(&args)));
    let mut other = args;
    other[6] = "43";
    assert_ne!(a, stdout(&newsvendor(&other)));
}

#[test]
fn robustness_covers_both_skus() {
    let text = stdout(&newsvendor(&[
        "robustness",
        "--config",
        "sku_a",
        "--config",
        "sku_b",
        "--runs",
        "4",
        "--format",
        "markdown",
        "--metric",
        "profit",
    ]));
    // Header, separator and 18 cells.
    assert_eq!(text.lines().count(), 20);
    assert!(text.contains("| sku_b | Log-normal / Uniform | Operating profit (mean) |"));
}

#[test]
fn errors_exit_nonzero_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "schema_version = 9\n").unwrap();
    for args in [
        vec!["fractile", "--config", "no_such_preset"],
        vec!["simulate", "--config", bad.to_str().unwrap()],
        vec!["quantile", "--fractile", "1.5"],
        vec!["simulate", "--runs", "0"],
    ] {
        let out = newsvendor(&args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
    }
}
