//! Scenarios, the model/true robustness matrix and result reports.
//!
//! A scenario sizes orders with a *model* demand distribution and draws
//! daily demand from a *true* one. Run `i` of every policy in every scenario
//! uses the demand stream `(base_seed, i)`, so within a true distribution
//! all policies face the same demand paths.

mod config;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{DemandDistribution, DistributionKind};
use crate::engine::{demand_stream, run_simulation, Calendar, RunResult, SimConfig};
use crate::error::{config as config_err, Result};
use crate::periodic_quantile::{PeriodicDemandModel, QuantileCache};
use crate::policy::{Policy, PolicyKind, SkuEconomics};
use crate::stats::{aggregate, AggregateStats};

pub use config::{CarryoverMean, Distributions, ExperimentSettings, ObservedDemand, ScenarioConfig};
pub use report::{render_report, Metric, RenderOptions, ReportFormat, ReportRow, ReportTable, Statistic};

/// Percentiles stored with every aggregated metric.
pub const REPORT_FRACTILES: [f64; 6] = [0.01, 0.05, 0.10, 0.90, 0.95, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileSettings {
    pub samples: usize,
    pub seed: u64,
}

/// Source of the expected period demand Model 3 subtracts from stock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CarryoverDemand {
    /// `period_days` times this observed daily mean.
    ObservedDailyMean(f64),
    /// The analytic mean of the model distribution.
    ModelMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub econ: SkuEconomics,
    pub model_kind: DistributionKind,
    pub model_dist: DemandDistribution,
    pub true_kind: DistributionKind,
    pub true_dist: DemandDistribution,
    pub policies: Vec<PolicyKind>,
    pub runs: usize,
    pub calendar: Calendar,
    pub base_seed: u64,
    pub quantile: QuantileSettings,
    pub carryover: CarryoverDemand,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(config_err("runs must be at least 1"));
        }
        if self.policies.is_empty() {
            return Err(config_err("at least one policy is required"));
        }
        self.econ.validate()?;
        self.calendar.validate()
    }

    pub fn periodic_model(&self, cache: &QuantileCache) -> Result<std::sync::Arc<PeriodicDemandModel>> {
        cache.get_or_build(&self.model_dist, self.calendar.period_days, self.quantile.samples, self.quantile.seed)
    }

    /// Builds every requested policy from the model distribution.
    pub fn build_policies(&self, model: &PeriodicDemandModel) -> Result<Vec<Policy>> {
        let carryover = match self.carryover {
            CarryoverDemand::ObservedDailyMean(m) => m * self.calendar.period_days as f64,
            CarryoverDemand::ModelMean => model.expected_periodic_demand(),
        };
        self.policies
            .iter()
            .map(|&kind| Policy::build(kind, &self.econ, model, carryover, self.calendar.lead_days))
            .collect()
    }
}

/// Aggregated metrics of one policy within a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyOutcome {
    pub policy: Policy,
    pub profit: AggregateStats,
    pub avg_inventory: AggregateStats,
    pub stockout_days: AggregateStats,
}

impl PolicyOutcome {
    pub fn kind(&self) -> PolicyKind {
        self.policy.kind()
    }

    pub fn metric(&self, metric: Metric) -> &AggregateStats {
        match metric {
            Metric::Profit => &self.profit,
            Metric::AvgInventory => &self.avg_inventory,
            Metric::StockoutDays => &self.stockout_days,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub name: String,
    pub model: DistributionKind,
    pub true_dist: DistributionKind,
    pub outcomes: Vec<PolicyOutcome>,
}

impl ScenarioResult {
    pub fn outcome(&self, kind: PolicyKind) -> Option<&PolicyOutcome> {
        self.outcomes.iter().find(|o| o.kind() == kind)
    }
}

pub fn run_scenario(s: &Scenario) -> Result<ScenarioResult> {
    run_scenario_with_cache(s, &QuantileCache::new())
}

/// Runs every policy of `s` for `s.runs` independent runs, in parallel.
pub fn run_scenario_with_cache(s: &Scenario, cache: &QuantileCache) -> Result<ScenarioResult> {
    s.validate()?;
    let model = s.periodic_model(cache)?;
    let configs = s
        .build_policies(&model)?
        .into_iter()
        .map(|p| SimConfig::new(s.calendar, s.econ, p))
        .collect::<Result<Vec<_>>>()?;

    // Indexed collection keeps results in run order regardless of scheduling.
    let per_run: Vec<Vec<RunResult>> = (0..s.runs as u64)
        .into_par_iter()
        .map(|run| {
            configs.iter().map(|cfg| run_simulation(cfg, &s.true_dist, &mut demand_stream(s.base_seed, run))).collect()
        })
        .collect();

    let outcomes = configs
        .iter()
        .enumerate()
        .map(|(i, cfg)| {
            let column = |f: fn(&RunResult) -> f64| -> Vec<f64> { per_run.iter().map(|r| f(&r[i])).collect() };
            Ok(PolicyOutcome {
                policy: cfg.policy,
                profit: aggregate(&column(|r| r.monthly_profit), &REPORT_FRACTILES)?,
                avg_inventory: aggregate(&column(|r| r.avg_inventory), &REPORT_FRACTILES)?,
                stockout_days: aggregate(&column(|r| r.stockout_days as f64), &REPORT_FRACTILES)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScenarioResult { name: s.name.clone(), model: s.model_kind, true_dist: s.true_kind, outcomes })
}

/// All nine (model, true) pairs of the config's distributions, as a table.
pub fn run_robustness_matrix(cfg: &ScenarioConfig, cache: &QuantileCache) -> Result<ReportTable> {
    ReportTable::from_results(&run_robustness_results(cfg, cache)?)
}

/// All nine (model, true) pairs of the config's distributions.
pub fn run_robustness_results(cfg: &ScenarioConfig, cache: &QuantileCache) -> Result<Vec<ScenarioResult>> {
    let mut results = Vec::with_capacity(9);
    for model in DistributionKind::ALL {
        for true_dist in DistributionKind::ALL {
            results.push(run_scenario_with_cache(&cfg.scenario(model, true_dist)?, cache)?);
        }
    }
    Ok(results)
}

/// The diagonal of the matrix: model and true distribution agree.
pub fn run_matched(cfg: &ScenarioConfig, cache: &QuantileCache) -> Result<Vec<ScenarioResult>> {
    DistributionKind::ALL.iter().map(|&k| run_scenario_with_cache(&cfg.scenario(k, k)?, cache)).collect()
}
