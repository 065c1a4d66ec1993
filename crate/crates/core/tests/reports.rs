use newsvendor_core::experiments::{run_matched, run_robustness_results, RenderOptions, Statistic};
use newsvendor_core::{
    render_report, run_scenario, DistributionKind, Metric, PolicyKind, QuantileCache, ReportFormat, ReportTable,
    ScenarioConfig,
};

fn reduced(name: &str, runs: usize) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(name).unwrap();
    cfg.experiment.runs = runs;
    cfg.experiment.quantile_samples = 200_000;
    cfg.simulation.months = 24;
    cfg
}

fn table4_shaped() -> ReportTable {
    let cache = QuantileCache::new();
    let mut results = Vec::new();
    for sku in ["sku_a", "sku_b"] {
        results.extend(run_matched(&reduced(sku, 20), &cache).unwrap());
    }
    ReportTable::from_results(&results).unwrap()
}

fn csv_opts(metrics: Vec<Metric>) -> RenderOptions {
    RenderOptions { format: ReportFormat::Csv, metrics, ..Default::default() }
}

#[test]
fn table4_shape() {
    let table = table4_shaped();
    let text = render_report(&table, &csv_opts(vec![Metric::Profit]));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let policy_cols: Vec<_> = header.iter().skip(5).collect();
    assert_eq!(policy_cols, ["safety_stock", "model1", "model2", "model3"]);
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    let labels: Vec<(String, String)> = rows.iter().map(|r| (r[0].to_string(), r[1].to_string())).collect();
    assert_eq!(labels[0], ("sku_a".into(), "uniform".into()));
    assert_eq!(labels[5], ("sku_b".into(), "lognormal".into()));
}

#[test]
fn csv_round_trips_at_printed_precision() {
    let table = table4_shaped();
    let precision = 2;
    let text = render_report(&table, &RenderOptions { precision, ..csv_opts(Metric::ALL.to_vec()) });
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    let mut seen = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        let model: DistributionKind = rec[1].parse().unwrap();
        let true_dist: DistributionKind = rec[2].parse().unwrap();
        let metric: Metric = rec[3].parse().unwrap();
        for (col, value) in header.iter().zip(rec.iter()).skip(5) {
            let policy: PolicyKind = col.parse().unwrap();
            let stats = table.get(&rec[0], model, true_dist, policy, metric).unwrap();
            let parsed: f64 = value.parse().unwrap();
            assert!((parsed - stats.mean).abs() <= 0.5e-2 + 1e-9, "{parsed} vs {}", stats.mean);
            seen += 1;
        }
    }
    assert_eq!(seen, table.rows().len());
}

#[test]
fn other_statistics_render() {
    let table = table4_shaped();
    let opts = RenderOptions { statistic: Statistic::Moe95, ..csv_opts(vec![Metric::StockoutDays]) };
    let text = render_report(&table, &opts);
    assert!(text.lines().skip(1).all(|l| l.contains(",stockout_days,moe95,")));
}

#[test]
fn matrix_reports_are_bit_identical() {
    let cfg = reduced("sku_a", 24);
    let render = || {
        let table = ReportTable::from_results(&run_robustness_results(&cfg, &QuantileCache::new()).unwrap()).unwrap();
        render_report(&table, &RenderOptions { format: ReportFormat::Json, ..Default::default() })
    };
    assert_eq!(render(), render());
}

#[test]
fn doubling_runs_moves_means_within_noise() {
    for sku in ["sku_a", "sku_b"] {
        let mut cfg = ScenarioConfig::preset(sku).unwrap();
        cfg.experiment.quantile_samples = 200_000;
        let small = run_scenario(&cfg.default_scenario().unwrap()).unwrap();
        cfg.experiment.runs *= 2;
        let large = run_scenario(&cfg.default_scenario().unwrap()).unwrap();
        for (a, b) in small.outcomes.iter().zip(&large.outcomes) {
            let moe = a.profit.moe95().unwrap();
            assert!(
                (a.profit.mean - b.profit.mean).abs() < 2.0 * moe,
                "{sku} {}: {} vs {} (moe {moe})",
                a.kind(),
                a.profit.mean,
                b.profit.mean
            );
        }
    }
}
