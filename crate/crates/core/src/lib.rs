//! Production batch sizing for a manufacturing firm under uncertain daily
//! demand.
//!
//! The crate computes order quantities for four ordering rules (a safety
//! stock buffer and three newsvendor variants) and checks them against a
//! day-by-day Monte Carlo simulation of the firm's operations.
//!
//! Module map:
//!
//! * [`distributions`]: daily demand families, sampling, moment fitting.
//! * [`periodic_quantile`]: empirical distribution of multi-day demand sums.
//! * [`policy`]: critical fractiles, order quantities, expected profit.
//! * [`engine`]: the day-step simulator.
//! * [`stats`]: cross-run summary statistics.
//! * [`experiments`]: scenarios, the model/true robustness matrix, reports.

pub mod distributions;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod periodic_quantile;
pub mod policy;
pub mod stats;

pub use distributions::{DailyDemand, DemandDistribution, DistributionKind, SampleMoments};
pub use engine::{run_simulation, DayRecord, RunResult, SimConfig};
pub use error::{Error, Result};
pub use experiments::{
    render_report, run_robustness_matrix, run_scenario, Metric, ReportFormat, ReportTable, Scenario, ScenarioConfig,
};
pub use periodic_quantile::{build_periodic_model, PeriodicDemandModel, QuantileCache};
pub use policy::{critical_fractile, NewsvendorKind, Policy, PolicyKind, SkuEconomics};
pub use stats::{aggregate, AggregateStats};
