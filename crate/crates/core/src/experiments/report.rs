//! Result tables and their CSV / markdown / JSON renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionKind;
use crate::error::{config, Result};
use crate::policy::PolicyKind;
use crate::stats::AggregateStats;

use super::ScenarioResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Profit,
    AvgInventory,
    StockoutDays,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Profit, Metric::AvgInventory, Metric::StockoutDays];

    pub fn tag(self) -> &'static str {
        match self {
            Metric::Profit => "profit",
            Metric::AvgInventory => "avg_inventory",
            Metric::StockoutDays => "stockout_days",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Metric::Profit => "Operating profit",
            Metric::AvgInventory => "Average inventory",
            Metric::StockoutDays => "Stock-out days",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL.into_iter().find(|m| m.tag() == s).ok_or_else(|| config(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Mean,
    Stdev,
    Moe95,
    Median,
}

impl Statistic {
    pub fn tag(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Stdev => "stdev",
            Statistic::Moe95 => "moe95",
            Statistic::Median => "median",
        }
    }

    fn of(self, s: &AggregateStats) -> Option<f64> {
        match self {
            Statistic::Mean => Some(s.mean),
            Statistic::Stdev => s.stdev().ok(),
            Statistic::Moe95 => s.moe95().ok(),
            Statistic::Median => Some(s.median),
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        [Statistic::Mean, Statistic::Stdev, Statistic::Moe95, Statistic::Median]
            .into_iter()
            .find(|st| st.tag() == s)
            .ok_or_else(|| config(format!("unknown statistic `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Markdown,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "json" => Ok(ReportFormat::Json),
            _ => Err(config(format!("unknown report format `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub sku: String,
    pub model: DistributionKind,
    pub true_dist: DistributionKind,
    pub policy: PolicyKind,
    pub metric: Metric,
    pub stats: AggregateStats,
}

impl ReportRow {
    fn same_key(&self, other: &ReportRow) -> bool {
        self.sku == other.sku
            && self.model == other.model
            && self.true_dist == other.true_dist
            && self.policy == other.policy
            && self.metric == other.metric
    }
}

/// Aggregates keyed by (sku, model, true, policy, metric); keys are unique.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportTable {
    rows: Vec<ReportRow>,
}

impl ReportTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_results(results: &[ScenarioResult]) -> Result<Self> {
        let mut t = ReportTable::new();
        t.extend_results(results)?;
        Ok(t)
    }

    pub fn extend_results(&mut self, results: &[ScenarioResult]) -> Result<()> {
        for r in results {
            for o in &r.outcomes {
                for metric in Metric::ALL {
                    self.insert(ReportRow {
                        sku: r.name.clone(),
                        model: r.model,
                        true_dist: r.true_dist,
                        policy: o.kind(),
                        metric,
                        stats: o.metric(metric).clone(),
                    })?;
                }
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, row: ReportRow) -> Result<()> {
        if self.rows.iter().any(|r| r.same_key(&row)) {
            return Err(config(format!(
                "duplicate report row {} {}/{} {} {}",
                row.sku,
                row.model.tag(),
                row.true_dist.tag(),
                row.policy.tag(),
                row.metric.tag()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: ReportTable = serde_json::from_str(text)?;
        let mut checked = ReportTable::new();
        for row in table.rows {
            checked.insert(row)?;
        }
        Ok(checked)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(
        &self,
        sku: &str,
        model: DistributionKind,
        true_dist: DistributionKind,
        policy: PolicyKind,
        metric: Metric,
    ) -> Option<&AggregateStats> {
        self.rows
            .iter()
            .find(|r| {
                r.sku == sku && r.model == model && r.true_dist == true_dist && r.policy == policy && r.metric == metric
            })
            .map(|r| &r.stats)
    }

    /// Policies present, in table column order.
    fn policies(&self) -> Vec<PolicyKind> {
        if self.rows.is_empty() {
            return PolicyKind::TABLE.to_vec();
        }
        let mut p: Vec<PolicyKind> = Vec::new();
        for r in &self.rows {
            if !p.contains(&r.policy) {
                p.push(r.policy);
            }
        }
        p.sort();
        p
    }

    /// Distinct (sku, model, true) groups in first-appearance order.
    fn groups(&self) -> Vec<(&str, DistributionKind, DistributionKind)> {
        let mut g: Vec<(&str, DistributionKind, DistributionKind)> = Vec::new();
        for r in &self.rows {
            let key = (r.sku.as_str(), r.model, r.true_dist);
            if !g.contains(&key) {
                g.push(key);
            }
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub format: ReportFormat,
    /// Metrics to print, in order. Empty prints the header only.
    pub metrics: Vec<Metric>,
    pub statistic: Statistic,
    /// Digits after the decimal point.
    pub precision: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: ReportFormat::Markdown,
            metrics: Metric::ALL.to_vec(),
            statistic: Statistic::Mean,
            precision: 2,
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One line per (sku, model, true, metric), one column per policy.
pub fn render_report(table: &ReportTable, opts: &RenderOptions) -> String {
    let policies = table.policies();
    let groups = table.groups();
    let cell = |sku: &str, m: DistributionKind, t: DistributionKind, p: PolicyKind, metric: Metric| {
        table.get(sku, m, t, p, metric).and_then(|s| opts.statistic.of(s)).map(|v| format!("{v:.*}", opts.precision))
    };

    let mut out = String::new();
    match opts.format {
        ReportFormat::Json => {
            let filtered =
                ReportTable { rows: table.rows.iter().filter(|r| opts.metrics.contains(&r.metric)).cloned().collect() };
            out = filtered.to_json();
            out.push('\n');
        }
        ReportFormat::Csv => {
            let mut header = vec!["sku", "model", "true", "metric", "statistic"];
            header.extend(policies.iter().map(|p| p.tag()));
            out.push_str(&header.join(","));
            out.push('\n');
            for &metric in &opts.metrics {
                for &(sku, m, t) in &groups {
                    let mut fields = vec![
                        csv_field(sku),
                        m.tag().to_string(),
                        t.tag().to_string(),
                        metric.tag().to_string(),
                        opts.statistic.tag().to_string(),
                    ];
                    fields.extend(policies.iter().map(|&p| cell(sku, m, t, p, metric).unwrap_or_default()));
                    out.push_str(&fields.join(","));
                    out.push('\n');
                }
            }
        }
        ReportFormat::Markdown => {
            let mut header = vec!["SKU".to_string(), "Model / true".to_string(), "Metric".to_string()];
            header.extend(policies.iter().map(|p| p.to_string()));
            let _ = writeln!(out, "| {} |", header.join(" | "));
            let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
            for &metric in &opts.metrics {
                for &(sku, m, t) in &groups {
                    let mut fields = vec![
                        sku.to_string(),
                        format!("{m} / {t}"),
                        format!("{} ({})", metric.label(), opts.statistic.tag()),
                    ];
                    fields.extend(
                        policies.iter().map(|&p| cell(sku, m, t, p, metric).unwrap_or_else(|| "n/a".to_string())),
                    );
                    let _ = writeln!(out, "| {} |", fields.join(" | "));
                }
            }
        }
    }
    out
}
