//! Ordering rules.
//!
//! Four rules are compared by the simulator:
//!
//! * a safety stock buffer, which reorders a fixed batch whenever stock
//!   falls below the reorder point;
//! * Model 1, the classic newsvendor, `F^-1((p - c) / p)`;
//! * Model 2, the newsvendor extended with fixed and holding costs,
//!   `F^-1((p - c_v) / (p + h))`;
//! * Model 3, the multi-period rule that matches variable costs to revenue,
//!   charges holding on average stock and nets out the stock expected to be
//!   left when the batch arrives: `F^-1((p - c_v - h/2) / (p - c_v + h/2)) - q̂0`.
//!
//! Model 2 also has an adjusted form that subtracts the opening stock; it is
//! available as [`PolicyKind::Model2Adjusted`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config, domain, Result};
use crate::periodic_quantile::PeriodicDemandModel;

/// Per-SKU prices and costs.
///
/// `holding_cost` is per unit per month; the simulator accrues it daily.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkuEconomics {
    pub price: f64,
    pub variable_cost: f64,
    pub fixed_cost_monthly: f64,
    pub holding_cost: f64,
    pub safety_buffer: f64,
}

impl SkuEconomics {
    pub fn validate(&self) -> Result<()> {
        let SkuEconomics { price: p, variable_cost: cv, fixed_cost_monthly: cf, holding_cost: h, safety_buffer } =
            *self;
        let finite = [p, cv, cf, h, safety_buffer].iter().all(|v| v.is_finite());
        if !finite {
            return Err(config("economics must be finite numbers"));
        }
        if !(p > cv && cv >= 0.0) {
            return Err(config(format!("need price > variable cost >= 0, got p={p}, c_v={cv}")));
        }
        if h < 0.0 || cf < 0.0 || safety_buffer < 0.0 {
            return Err(config("holding cost, fixed cost and safety buffer must be non-negative"));
        }
        let slack = p - cv - h / 2.0;
        if slack.is_nan() || slack <= 0.0 {
            return Err(config(format!("margin p - c_v = {} must exceed h/2 = {}", p - cv, h / 2.0)));
        }
        Ok(())
    }

    pub fn unit_margin(&self) -> f64 {
        self.price - self.variable_cost
    }
}

/// The three newsvendor variants that have a critical fractile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewsvendorKind {
    Model1,
    Model2,
    Model3,
}

impl NewsvendorKind {
    pub const ALL: [NewsvendorKind; 3] = [NewsvendorKind::Model1, NewsvendorKind::Model2, NewsvendorKind::Model3];
}

impl fmt::Display for NewsvendorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        PolicyKind::from(*self).fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    SafetyStock,
    Model1,
    Model2,
    Model2Adjusted,
    Model3,
}

impl PolicyKind {
    /// Column order of the result tables.
    pub const TABLE: [PolicyKind; 4] =
        [PolicyKind::SafetyStock, PolicyKind::Model1, PolicyKind::Model2, PolicyKind::Model3];

    pub fn tag(self) -> &'static str {
        match self {
            PolicyKind::SafetyStock => "safety_stock",
            PolicyKind::Model1 => "model1",
            PolicyKind::Model2 => "model2",
            PolicyKind::Model2Adjusted => "model2_adjusted",
            PolicyKind::Model3 => "model3",
        }
    }

    pub fn newsvendor(self) -> Option<NewsvendorKind> {
        match self {
            PolicyKind::SafetyStock => None,
            PolicyKind::Model1 => Some(NewsvendorKind::Model1),
            PolicyKind::Model2 | PolicyKind::Model2Adjusted => Some(NewsvendorKind::Model2),
            PolicyKind::Model3 => Some(NewsvendorKind::Model3),
        }
    }
}

impl From<NewsvendorKind> for PolicyKind {
    fn from(kind: NewsvendorKind) -> Self {
        match kind {
            NewsvendorKind::Model1 => PolicyKind::Model1,
            NewsvendorKind::Model2 => PolicyKind::Model2,
            NewsvendorKind::Model3 => PolicyKind::Model3,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::SafetyStock => "Safety stock",
            PolicyKind::Model1 => "Model 1",
            PolicyKind::Model2 => "Model 2",
            PolicyKind::Model2Adjusted => "Model 2 (adjusted)",
            PolicyKind::Model3 => "Model 3",
        })
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| !matches!(c, '_' | '-' | ' ')).collect::<String>().to_lowercase();
        match norm.as_str() {
            "safetystock" | "ss" => Ok(PolicyKind::SafetyStock),
            "model1" | "m1" => Ok(PolicyKind::Model1),
            "model2" | "m2" => Ok(PolicyKind::Model2),
            "model2adjusted" | "m2adj" => Ok(PolicyKind::Model2Adjusted),
            "model3" | "m3" => Ok(PolicyKind::Model3),
            _ => Err(domain(format!("unknown policy `{s}`"))),
        }
    }
}

/// Closed-form critical fractile. Model 1 uses `c_v` as its unit cost.
pub fn critical_fractile(kind: NewsvendorKind, econ: &SkuEconomics) -> Result<f64> {
    let p = econ.price;
    let cv = econ.variable_cost;
    let h = econ.holding_cost;
    let fractile = match kind {
        NewsvendorKind::Model1 => (p - cv) / p,
        NewsvendorKind::Model2 => (p - cv) / (p + h),
        NewsvendorKind::Model3 => (p - cv - h / 2.0) / (p - cv + h / 2.0),
    };
    if !(fractile > 0.0 && fractile < 1.0) {
        return Err(domain(format!("{kind} fractile {fractile} is outside (0, 1)")));
    }
    Ok(fractile)
}

/// Stock level observed on a decision day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InventorySnapshot {
    pub on_hand: f64,
    pub day: u32,
}

/// Expected stock left when the new batch lands: `q0 - E[D] * T_l / T`.
/// May be negative, which enlarges the order.
pub fn estimate_carryover(
    snapshot: InventorySnapshot,
    expected_periodic_demand: f64,
    lead_days: u32,
    period_days: u32,
) -> f64 {
    snapshot.on_hand - expected_periodic_demand * lead_days as f64 / period_days as f64
}

/// An ordering rule with its precomputed constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    SafetyStock {
        reorder_point: f64,
        order_size: f64,
    },
    /// Orders `base_q` every period regardless of stock (Models 1 and 2).
    NewsvendorStatic {
        model: NewsvendorKind,
        base_q: f64,
    },
    Model2Adjusted {
        base_q: f64,
    },
    Model3 {
        base_q: f64,
        expected_periodic_demand: f64,
        lead_days: u32,
        period_days: u32,
    },
}

impl Policy {
    /// Builds a rule from economics and the model distribution of period
    /// demand.
    ///
    /// `carryover_demand` is the expected period demand Model 3 nets out of
    /// the observed stock; it is ignored by the other rules.
    pub fn build(
        kind: PolicyKind,
        econ: &SkuEconomics,
        model: &PeriodicDemandModel,
        carryover_demand: f64,
        lead_days: u32,
    ) -> Result<Policy> {
        econ.validate()?;
        let base = |k| model.quantile(critical_fractile(k, econ)?);
        Ok(match kind {
            PolicyKind::SafetyStock => {
                Policy::SafetyStock { reorder_point: econ.safety_buffer, order_size: econ.safety_buffer }
            }
            PolicyKind::Model1 => {
                Policy::NewsvendorStatic { model: NewsvendorKind::Model1, base_q: base(NewsvendorKind::Model1)? }
            }
            PolicyKind::Model2 => {
                Policy::NewsvendorStatic { model: NewsvendorKind::Model2, base_q: base(NewsvendorKind::Model2)? }
            }
            PolicyKind::Model2Adjusted => Policy::Model2Adjusted { base_q: base(NewsvendorKind::Model2)? },
            PolicyKind::Model3 => {
                let period_days = model.period_days();
                if lead_days > period_days {
                    return Err(config(format!("lead time {lead_days} exceeds period length {period_days}")));
                }
                if !(carryover_demand >= 0.0 && carryover_demand.is_finite()) {
                    return Err(domain(format!("expected period demand {carryover_demand} is invalid")));
                }
                Policy::Model3 {
                    base_q: base(NewsvendorKind::Model3)?,
                    expected_periodic_demand: carryover_demand,
                    lead_days,
                    period_days,
                }
            }
        })
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::SafetyStock { .. } => PolicyKind::SafetyStock,
            Policy::NewsvendorStatic { model, .. } => PolicyKind::from(*model),
            Policy::Model2Adjusted { .. } => PolicyKind::Model2Adjusted,
            Policy::Model3 { .. } => PolicyKind::Model3,
        }
    }

    /// Base order size: the batch for the safety stock rule, `F^-1(·)` for
    /// the newsvendor rules. Also the opening stock of a simulation.
    pub fn base_quantity(&self) -> f64 {
        match *self {
            Policy::SafetyStock { order_size, .. } => order_size,
            Policy::NewsvendorStatic { base_q, .. }
            | Policy::Model2Adjusted { base_q }
            | Policy::Model3 { base_q, .. } => base_q,
        }
    }

    /// Whether the rule checks stock every day rather than once per period.
    pub fn reviews_daily(&self) -> bool {
        matches!(self, Policy::SafetyStock { .. })
    }

    /// Quantity to order on a decision day. Never negative.
    pub fn order_quantity(&self, snapshot: InventorySnapshot, outstanding: f64) -> f64 {
        match *self {
            Policy::SafetyStock { reorder_point, order_size } => {
                if snapshot.on_hand < reorder_point && outstanding <= 0.0 {
                    order_size
                } else {
                    0.0
                }
            }
            Policy::NewsvendorStatic { base_q, .. } => base_q,
            Policy::Model2Adjusted { base_q } => (base_q - snapshot.on_hand).max(0.0),
            Policy::Model3 { base_q, expected_periodic_demand, lead_days, period_days } => {
                let q_hat = estimate_carryover(snapshot, expected_periodic_demand, lead_days, period_days);
                (base_q - q_hat).max(0.0)
            }
        }
    }
}

pub fn order_quantity(policy: &Policy, snapshot: InventorySnapshot, outstanding: f64) -> f64 {
    policy.order_quantity(snapshot, outstanding)
}

/// Expected one-period profit of a newsvendor objective, averaged over the
/// empirical period-demand samples.
#[derive(Debug, Clone, Copy)]
pub struct ProfitObjective<'a> {
    econ: &'a SkuEconomics,
    model: &'a PeriodicDemandModel,
    fixed_cost_per_period: f64,
}

impl<'a> ProfitObjective<'a> {
    /// The monthly fixed cost is prorated to one planning period.
    pub fn new(econ: &'a SkuEconomics, model: &'a PeriodicDemandModel, days_per_month: u32) -> Self {
        let fixed_cost_per_period = econ.fixed_cost_monthly * model.period_days() as f64 / days_per_month as f64;
        ProfitObjective { econ, model, fixed_cost_per_period }
    }

    /// `q` is the order quantity for Model 1 and the order-up-to level for
    /// Models 2 and 3; `q0` is the opening stock (Model 2 only).
    pub fn expected_profit(&self, kind: NewsvendorKind, q: f64, q0: f64) -> f64 {
        let SkuEconomics { price: p, variable_cost: cv, holding_cost: h, .. } = *self.econ;
        let sold = self.model.expected_sales(q);
        let left = q - sold;
        let cf = self.fixed_cost_per_period;
        match kind {
            NewsvendorKind::Model1 => p * sold - cv * q,
            NewsvendorKind::Model2 => p * sold - cf - cv * (q - q0) - h * left,
            NewsvendorKind::Model3 => (p - cv) * sold - cf - h * (q + left) / 2.0,
        }
    }

    /// Best point of `grid` under `expected_profit`.
    pub fn grid_argmax(&self, kind: NewsvendorKind, grid: impl IntoIterator<Item = f64>, q0: f64) -> f64 {
        grid.into_iter()
            .map(|q| (q, self.expected_profit(kind, q, q0)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(q, _)| q)
            .unwrap_or(f64::NAN)
    }
}
