//! Scenario config files.
//!
//! A config is a TOML document describing one SKU: economics, observed
//! daily demand, the three fitted daily distributions, the simulation
//! calendar and the experiment settings. Two presets ship with the crate.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{fit_lognormal, fit_triangular_mode, DemandDistribution, DistributionKind, SampleMoments};
use crate::engine::Calendar;
use crate::error::{config, Result};
use crate::periodic_quantile::{DEFAULT_SAMPLES, MIN_SAMPLES};
use crate::policy::{PolicyKind, SkuEconomics};

use super::{CarryoverDemand, QuantileSettings, Scenario};

pub const SCHEMA_VERSION: u32 = 1;

const PRESETS: [(&str, &str); 2] =
    [("sku_a", include_str!("../../presets/sku_a.toml")), ("sku_b", include_str!("../../presets/sku_b.toml"))];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub name: String,
    pub economics: SkuEconomics,
    pub observed_demand: ObservedDemand,
    pub distributions: Distributions,
    #[serde(default)]
    pub simulation: Calendar,
    #[serde(default)]
    pub experiment: ExperimentSettings,
}

/// Summary statistics of the recorded daily demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservedDemand {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stdev: f64,
}

impl ObservedDemand {
    pub fn moments(&self) -> Result<SampleMoments> {
        SampleMoments::new(self.mean, self.stdev)
    }

    /// Fits all three families: uniform on the observed range, triangular
    /// moment-matched on the same range, log-normal from mean and stdev.
    pub fn fit(&self) -> Result<Distributions> {
        let moments = self.moments()?;
        Ok(Distributions {
            uniform: DemandDistribution::uniform(self.min, self.max)?,
            triangular: fit_triangular_mode(self.min, self.max, moments)?,
            lognormal: fit_lognormal(moments)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Distributions {
    pub uniform: DemandDistribution,
    pub triangular: DemandDistribution,
    pub lognormal: DemandDistribution,
}

impl Distributions {
    pub fn get(&self, kind: DistributionKind) -> &DemandDistribution {
        match kind {
            DistributionKind::Uniform => &self.uniform,
            DistributionKind::Triangular => &self.triangular,
            DistributionKind::LogNormal => &self.lognormal,
        }
    }

    fn validate(&self) -> Result<()> {
        for kind in DistributionKind::ALL {
            let d = self.get(kind);
            if d.kind() != kind {
                return Err(config(format!("distributions.{} holds a {} distribution", kind.tag(), d.kind().tag())));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarryoverMean {
    Observed,
    Model,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSettings {
    pub runs: usize,
    pub base_seed: u64,
    pub quantile_samples: usize,
    pub quantile_seed: u64,
    pub carryover_mean: CarryoverMean,
    pub policies: Vec<PolicyKind>,
    pub model: DistributionKind,
    #[serde(rename = "true")]
    pub true_dist: DistributionKind,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        ExperimentSettings {
            runs: 900,
            base_seed: 20260210,
            quantile_samples: DEFAULT_SAMPLES,
            quantile_seed: 7,
            carryover_mean: CarryoverMean::Observed,
            policies: PolicyKind::TABLE.to_vec(),
            model: DistributionKind::Uniform,
            true_dist: DistributionKind::Uniform,
        }
    }
}

impl ScenarioConfig {
    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|(name, _)| *name)
    }

    pub fn preset(name: &str) -> Result<Self> {
        PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| config(format!("unknown preset `{name}`")))
            .and_then(|(_, text)| Self::from_toml(text))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Loads a preset by name, or a config file by path.
    pub fn load(name_or_path: &str) -> Result<Self> {
        if PRESETS.iter().any(|(n, _)| *n == name_or_path) {
            return Self::preset(name_or_path);
        }
        let text = std::fs::read_to_string(Path::new(name_or_path))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.economics.validate()?;
        self.simulation.validate()?;
        self.distributions.validate()?;
        self.observed_demand.moments()?;
        let x = &self.experiment;
        if x.runs < 1 {
            return Err(config("runs must be at least 1"));
        }
        if x.quantile_samples < MIN_SAMPLES {
            return Err(config(format!("quantile_samples must be at least {MIN_SAMPLES}")));
        }
        if x.policies.is_empty() {
            return Err(config("at least one policy is required"));
        }
        for (i, p) in x.policies.iter().enumerate() {
            if x.policies[..i].contains(p) {
                return Err(config(format!("policy {} listed twice", p.tag())));
            }
        }
        Ok(())
    }

    /// The scenario pairing `model` (used to size orders) with `true_dist`
    /// (used to draw demand).
    pub fn scenario(&self, model: DistributionKind, true_dist: DistributionKind) -> Result<Scenario> {
        self.validate()?;
        let x = &self.experiment;
        let carryover = match x.carryover_mean {
            CarryoverMean::Observed => CarryoverDemand::ObservedDailyMean(self.observed_demand.mean),
            CarryoverMean::Model => CarryoverDemand::ModelMean,
        };
        Ok(Scenario {
            name: self.name.clone(),
            econ: self.economics,
            model_kind: model,
            model_dist: *self.distributions.get(model),
            true_kind: true_dist,
            true_dist: *self.distributions.get(true_dist),
            policies: x.policies.clone(),
            runs: x.runs,
            calendar: self.simulation,
            base_seed: x.base_seed,
            quantile: QuantileSettings { samples: x.quantile_samples, seed: x.quantile_seed },
            carryover,
        })
    }

    /// The scenario named by the `model` and `true` settings.
    pub fn default_scenario(&self) -> Result<Scenario> {
        self.scenario(self.experiment.model, self.experiment.true_dist)
    }
}
