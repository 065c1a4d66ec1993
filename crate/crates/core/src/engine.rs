//! Day-step simulation of one SKU under one ordering rule.
//!
//! Each working day runs, in order:
//!
//! 1. receive orders due today;
//! 2. decide: the safety stock rule checks every day, newsvendor rules order
//!    once every `period_days`; orders arrive `lead_days` later;
//! 3. draw the day's demand from the true distribution;
//! 4. sell `min(demand, on_hand)` at margin `p - c_v`;
//! 5. count a stock-out day if demand was not fully met;
//! 6. charge holding at `h / days_per_month` per unit left at end of day;
//! 7. on the last working day of a month, charge the monthly fixed cost.
//!
//! The run starts with the rule's base quantity on hand and nothing on order.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::DailyDemand;
use crate::error::{config, Result};
use crate::policy::{InventorySnapshot, Policy, SkuEconomics};

/// Random stream for run `run_index` of an experiment seeded with `base_seed`.
///
/// Streams depend only on these two numbers, so results do not depend on how
/// runs are scheduled across threads.
pub fn demand_stream(base_seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(run_index);
    rng
}

/// Calendar settings shared by every run of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calendar {
    pub months: u32,
    pub days_per_month: u32,
    pub period_days: u32,
    pub lead_days: u32,
    /// Working day of the first newsvendor order (1-based).
    pub first_order_day: u32,
}

impl Default for Calendar {
    fn default() -> Self {
        Calendar { months: 120, days_per_month: 23, period_days: 7, lead_days: 7, first_order_day: 1 }
    }
}

impl Calendar {
    pub fn validate(&self) -> Result<()> {
        let Calendar { months, days_per_month, period_days, lead_days, first_order_day } = *self;
        if months < 1 || days_per_month < 1 {
            return Err(config("months and days_per_month must be at least 1"));
        }
        if !(1 <= lead_days && lead_days <= period_days && period_days <= days_per_month) {
            return Err(config(format!(
                "need 1 <= lead_days ({lead_days}) <= period_days ({period_days}) <= days_per_month ({days_per_month})"
            )));
        }
        if !(1 <= first_order_day && first_order_day <= period_days) {
            return Err(config(format!("first_order_day {first_order_day} must lie in 1..={period_days}")));
        }
        Ok(())
    }

    pub fn total_days(&self) -> u32 {
        self.months * self.days_per_month
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub calendar: Calendar,
    pub econ: SkuEconomics,
    pub policy: Policy,
}

impl SimConfig {
    pub fn new(calendar: Calendar, econ: SkuEconomics, policy: Policy) -> Result<Self> {
        calendar.validate()?;
        econ.validate()?;
        if let Policy::Model3 { lead_days, period_days, .. } = policy {
            if lead_days != calendar.lead_days || period_days != calendar.period_days {
                return Err(config("Model 3 timing does not match the simulation calendar"));
            }
        }
        Ok(SimConfig { calendar, econ, policy })
    }
}

/// Totals of one simulated run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Total operating profit divided by the number of months.
    pub monthly_profit: f64,
    pub total_profit: f64,
    /// Mean end-of-day stock over all working days.
    pub avg_inventory: f64,
    pub stockout_days: u32,
    pub units_sold: f64,
    pub units_demanded: f64,
}

/// One day of a run, for traces and invariant checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DayRecord {
    pub day: u32,
    pub start_inventory: f64,
    pub arrivals: f64,
    pub order_placed: f64,
    pub demand: f64,
    pub sold: f64,
    pub end_inventory: f64,
    pub profit_delta: f64,
}

#[derive(Debug, Clone, Copy)]
struct PendingOrder {
    quantity: f64,
    due_day: u32,
}

pub fn run_simulation<D: DailyDemand, R: Rng>(cfg: &SimConfig, true_demand: &D, rng: &mut R) -> RunResult {
    run_simulation_observed(cfg, true_demand, rng, |_| {})
}

/// Like [`run_simulation`], calling `observe` after every simulated day.
pub fn run_simulation_observed<D, R, F>(cfg: &SimConfig, true_demand: &D, rng: &mut R, mut observe: F) -> RunResult
where
    D: DailyDemand,
    R: Rng,
    F: FnMut(&DayRecord),
{
    let cal = cfg.calendar;
    let econ = cfg.econ;
    let policy = cfg.policy;
    let margin = econ.unit_margin();
    let daily_holding = econ.holding_cost / cal.days_per_month as f64;
    let total_days = cal.total_days();

    let mut on_hand = policy.base_quantity();
    let mut pending: Vec<PendingOrder> = Vec::with_capacity(2);
    // Signed so that the first order can fall on day 1.
    let mut last_order_day = cal.first_order_day as i64 - cal.period_days as i64;
    let mut profit = 0.0;
    let mut stockout_days = 0u32;
    let mut inventory_day_sum = 0.0;
    let mut units_sold = 0.0;
    let mut units_demanded = 0.0;

    for day in 1..=total_days {
        let start_inventory = on_hand;

        let mut arrivals = 0.0;
        pending.retain(|o| {
            if o.due_day == day {
                arrivals += o.quantity;
                false
            } else {
                true
            }
        });
        on_hand += arrivals;

        let decision_day = policy.reviews_daily() || day as i64 - last_order_day == cal.period_days as i64;
        let mut order_placed = 0.0;
        if decision_day {
            if !policy.reviews_daily() {
                last_order_day = day as i64;
            }
            let outstanding: f64 = pending.iter().map(|o| o.quantity).sum();
            order_placed = policy.order_quantity(InventorySnapshot { on_hand, day }, outstanding);
            if order_placed > 0.0 {
                pending.push(PendingOrder { quantity: order_placed, due_day: day + cal.lead_days });
            }
        }

        let demand = true_demand.sample(rng);
        let sold = demand.min(on_hand);
        on_hand -= sold;
        units_sold += sold;
        units_demanded += demand;
        if demand > sold {
            stockout_days += 1;
        }

        let mut profit_delta = margin * sold - on_hand * daily_holding;
        if day % cal.days_per_month == 0 {
            profit_delta -= econ.fixed_cost_monthly;
        }
        profit += profit_delta;
        inventory_day_sum += on_hand;

        observe(&DayRecord {
            day,
            start_inventory,
            arrivals,
            order_placed,
            demand,
            sold,
            end_inventory: on_hand,
            profit_delta,
        });
    }

    RunResult {
        monthly_profit: profit / cal.months as f64,
        total_profit: profit,
        avg_inventory: inventory_day_sum / total_days as f64,
        stockout_days,
        units_sold,
        units_demanded,
    }
}

pub const TRACE_HEADER: &str = "day,arrivals,order_placed,demand,sold,end_inventory,profit_delta";

/// Writes one CSV trace line per day.
pub fn write_trace<W: Write>(out: &mut W, records: &[DayRecord]) -> io::Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.day, r.arrivals, r.order_placed, r.demand, r.sold, r.end_inventory, r.profit_delta
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DemandDistribution;
    use crate::policy::NewsvendorKind;
    use proptest::prelude::*;

    fn econ(h: f64, cf: f64, buffer: f64) -> SkuEconomics {
        SkuEconomics {
            price: 100.0,
            variable_cost: 60.0,
            fixed_cost_monthly: cf,
            holding_cost: h,
            safety_buffer: buffer,
        }
    }

    fn calendar(months: u32) -> Calendar {
        Calendar { months, ..Calendar::default() }
    }

    fn static_policy(base_q: f64) -> Policy {
        Policy::NewsvendorStatic { model: NewsvendorKind::Model1, base_q }
    }

    #[test]
    fn deterministic_sawtooth() {
        // End-of-day stock cycles 600, 500, ..., 0; 23 days hold three full
        // cycles (3 * 2100) plus 600 and 500.
        let d = DemandDistribution::uniform(100.0, 100.0).unwrap();
        let cfg = SimConfig::new(calendar(1), econ(2.8, 240_000.0, 0.0), static_policy(700.0)).unwrap();
        let mut trace = Vec::new();
        let r = run_simulation_observed(&cfg, &d, &mut demand_stream(1, 0), |rec| trace.push(*rec));
        assert_eq!(r.stockout_days, 0);
        let expected = 23.0 * 100.0 * 40.0 - 240_000.0 - 7400.0 * 2.8 / 23.0;
        assert!((r.monthly_profit - expected).abs() < 1e-6, "{} vs {expected}", r.monthly_profit);
        assert!((r.avg_inventory - 7400.0 / 23.0).abs() < 1e-9);
        let first_week: Vec<f64> = trace[..7].iter().map(|t| t.end_inventory).collect();
        assert_eq!(first_week, vec![600.0, 500.0, 400.0, 300.0, 200.0, 100.0, 0.0]);
        assert_eq!(trace[7].arrivals, 700.0);
    }

    #[test]
    fn first_order_on_period_day_leaves_a_gap() {
        let d = DemandDistribution::uniform(100.0, 100.0).unwrap();
        let cal = Calendar { first_order_day: 7, ..calendar(1) };
        let cfg = SimConfig::new(cal, econ(2.8, 0.0, 0.0), static_policy(700.0)).unwrap();
        let r = run_simulation(&cfg, &d, &mut demand_stream(1, 0));
        // Stock runs out after day 7; the first batch lands on day 14.
        assert_eq!(r.stockout_days, 6);
    }

    #[test]
    fn zero_demand_closed_form() {
        let d = DemandDistribution::uniform(0.0, 0.0).unwrap();
        let e = econ(2.8, 14_000.0, 595.0);
        let ss = Policy::SafetyStock { reorder_point: 595.0, order_size: 595.0 };
        let cfg = SimConfig::new(calendar(12), e, ss).unwrap();
        let r = run_simulation(&cfg, &d, &mut demand_stream(3, 0));
        assert_eq!(r.units_sold, 0.0);
        assert_eq!(r.stockout_days, 0);
        // Stock never moves, so monthly holding is exactly h * buffer.
        let expected = -(14_000.0 + 2.8 * 595.0);
        assert!((r.monthly_profit - expected).abs() < 1e-6, "{}", r.monthly_profit);

        // A static rule keeps adding its batch every period.
        let cfg = SimConfig::new(calendar(1), e, static_policy(10.0)).unwrap();
        let r = run_simulation(&cfg, &d, &mut demand_stream(3, 0));
        // Orders on days 1, 8, 15, 22 arrive on days 8, 15, 22 (29 is past the end).
        let stock_days: f64 =
            (1..=23).map(|day| 10.0 * (1 + (day >= 8) as u32 + (day >= 15) as u32 + (day >= 22) as u32) as f64).sum();
        assert!((r.total_profit + 14_000.0 + 2.8 / 23.0 * stock_days).abs() < 1e-6);
        assert_eq!(r.stockout_days, 0);
    }

    #[test]
    fn without_costs_profit_is_margin_times_sales() {
        let d = DemandDistribution::triangular(0.0, 85.0, 2.0).unwrap();
        let policies = [
            Policy::SafetyStock { reorder_point: 595.0, order_size: 595.0 },
            static_policy(187.0),
            Policy::Model2Adjusted { base_q: 186.0 },
            Policy::Model3 { base_q: 285.0, expected_periodic_demand: 203.0, lead_days: 7, period_days: 7 },
        ];
        for p in policies {
            let cfg = SimConfig::new(calendar(24), econ(0.0, 0.0, 595.0), p).unwrap();
            let r = run_simulation(&cfg, &d, &mut demand_stream(9, 4));
            assert!((r.total_profit - 40.0 * r.units_sold).abs() < 1e-9 * r.total_profit, "{p:?}");
        }
    }

    #[test]
    fn large_buffer_never_stocks_out() {
        // An order is triggered just below the buffer, so the buffer must
        // cover lead time plus the triggering day at peak demand.
        let d = DemandDistribution::uniform(235.0, 810.0).unwrap();
        let buffer = 8.0 * 810.0;
        let ss = Policy::SafetyStock { reorder_point: buffer, order_size: buffer };
        let cfg = SimConfig::new(calendar(120), econ(2.8, 240_000.0, buffer), ss).unwrap();
        for run in 0..20 {
            let r = run_simulation(&cfg, &d, &mut demand_stream(5, run));
            assert_eq!(r.stockout_days, 0);
        }
    }

    #[test]
    fn safety_stock_keeps_one_order_outstanding() {
        let d = DemandDistribution::uniform(235.0, 810.0).unwrap();
        let ss = Policy::SafetyStock { reorder_point: 5670.0, order_size: 5670.0 };
        let cfg = SimConfig::new(calendar(12), econ(2.8, 240_000.0, 5670.0), ss).unwrap();
        let mut orders = Vec::new();
        run_simulation_observed(&cfg, &d, &mut demand_stream(2, 0), |r| {
            if r.order_placed > 0.0 {
                orders.push(r.day);
            }
        });
        assert!(orders.len() > 10);
        assert!(orders.windows(2).all(|w| w[1] - w[0] >= 7));
    }

    #[test]
    fn same_seed_same_result() {
        let d = DemandDistribution::lognormal(6.266708826, 0.284668531).unwrap();
        let p = Policy::Model3 { base_q: 4510.0, expected_periodic_demand: 3839.65, lead_days: 7, period_days: 7 };
        let cfg = SimConfig::new(calendar(120), econ(2.8, 240_000.0, 5670.0), p).unwrap();
        let a = run_simulation(&cfg, &d, &mut demand_stream(77, 3));
        let b = run_simulation(&cfg, &d, &mut demand_stream(77, 3));
        assert_eq!(a, b);
        let c = run_simulation(&cfg, &d, &mut demand_stream(77, 4));
        assert_ne!(a, c);
    }

    #[test]
    fn calendar_validation() {
        let ok = Calendar::default();
        assert!(ok.validate().is_ok());
        assert!(Calendar { months: 0, ..ok }.validate().is_err());
        assert!(Calendar { lead_days: 0, ..ok }.validate().is_err());
        assert!(Calendar { lead_days: 8, ..ok }.validate().is_err());
        assert!(Calendar { period_days: 30, lead_days: 7, ..ok }.validate().is_err());
        assert!(Calendar { first_order_day: 0, ..ok }.validate().is_err());
        assert!(Calendar { first_order_day: 8, ..ok }.validate().is_err());

        let p = Policy::Model3 { base_q: 1.0, expected_periodic_demand: 1.0, lead_days: 5, period_days: 7 };
        assert!(SimConfig::new(ok, econ(2.8, 0.0, 0.0), p).is_err());
    }

    #[test]
    fn trace_format() {
        let rec = DayRecord {
            day: 3,
            start_inventory: 10.0,
            arrivals: 0.0,
            order_placed: 5.0,
            demand: 4.0,
            sold: 4.0,
            end_inventory: 6.0,
            profit_delta: 159.5,
        };
        let mut out = Vec::new();
        write_trace(&mut out, &[rec]).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(TRACE_HEADER));
        assert_eq!(lines.next(), Some("3,0.000000,5.000000,4.000000,4.000000,6.000000,159.500000"));
    }

    fn arb_dist() -> impl Strategy<Value = DemandDistribution> {
        prop_oneof![
            (0.0f64..100.0, 0.0f64..100.0).prop_map(|(a, w)| DemandDistribution::uniform(a, a + w).unwrap()),
            (0.0f64..100.0, 0.0f64..100.0, 0.0f64..1.0).prop_map(|(a, w, t)| DemandDistribution::triangular(
                a,
                a + w,
                a + t * w
            )
            .unwrap()),
            (-1.0f64..4.0, 0.05f64..1.5).prop_map(|(m, s)| DemandDistribution::lognormal(m, s).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn conservation_and_non_negativity(
            dist in arb_dist(),
            base_q in 0.0f64..2000.0,
            carry in 0.0f64..2000.0,
            period in 1u32..=10,
            lead_frac in 0.0f64..1.0,
            first_frac in 0.0f64..1.0,
            which in 0usize..4,
            seed in any::<u64>(),
        ) {
            let lead = 1 + ((period - 1) as f64 * lead_frac) as u32;
            let first = 1 + ((period - 1) as f64 * first_frac) as u32;
            let cal = Calendar { months: 3, days_per_month: 23, period_days: period, lead_days: lead, first_order_day: first };
            let policy = match which {
                0 => Policy::SafetyStock { reorder_point: base_q, order_size: base_q },
                1 => static_policy(base_q),
                2 => Policy::Model2Adjusted { base_q },
                _ => Policy::Model3 { base_q, expected_periodic_demand: carry, lead_days: lead, period_days: period },
            };
            let cfg = SimConfig::new(cal, econ(2.8, 1000.0, base_q), policy).unwrap();
            let mut ok = true;
            let mut days = 0;
            let r = run_simulation_observed(&cfg, &dist, &mut demand_stream(seed, 0), |d| {
                days += 1;
                ok &= d.end_inventory == d.start_inventory + d.arrivals - d.sold;
                ok &= d.end_inventory >= 0.0 && d.order_placed >= 0.0;
                ok &= d.sold <= d.demand && d.sold <= d.start_inventory + d.arrivals;
            });
            prop_assert!(ok);
            prop_assert_eq!(days, cal.total_days());
            prop_assert!(r.stockout_days <= cal.total_days());
            prop_assert!(r.avg_inventory >= 0.0);
        }
    }
}
