//! Empirical distribution of demand summed over a planning period.
//!
//! Newsvendor rules need the inverse CDF of period demand, but only the daily
//! distribution is known. Sums of `T` independent daily draws are generated
//! by Monte Carlo and sorted; quantiles are then read off the order
//! statistics.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::{DailyDemand, DemandDistribution};
use crate::error::{domain, Result};
use crate::stats::interpolated_quantile;

pub const MIN_SAMPLES: usize = 100_000;
pub const DEFAULT_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone)]
pub struct PeriodicDemandModel {
    period_days: u32,
    daily_mean: f64,
    periodic_mean: f64,
    samples: Vec<f64>,
    /// `prefix[i]` is the sum of the `i` smallest samples.
    prefix: Vec<f64>,
}

/// Draws `n_samples` sums of `period_days` daily demands and sorts them.
pub fn build_periodic_model<D: DailyDemand>(
    daily: &D,
    period_days: u32,
    n_samples: usize,
    seed: u64,
) -> Result<PeriodicDemandModel> {
    if period_days == 0 {
        return Err(domain("period length must be at least one day"));
    }
    if n_samples < MIN_SAMPLES {
        return Err(domain(format!("periodic demand model needs at least {MIN_SAMPLES} samples, got {n_samples}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples: Vec<f64> =
        (0..n_samples).map(|_| (0..period_days).map(|_| daily.sample(&mut rng)).sum()).collect();
    samples.sort_unstable_by(f64::total_cmp);

    let mut prefix = Vec::with_capacity(n_samples + 1);
    let mut acc = 0.0;
    prefix.push(acc);
    for &s in &samples {
        acc += s;
        prefix.push(acc);
    }

    let daily_mean = daily.mean();
    Ok(PeriodicDemandModel { period_days, daily_mean, periodic_mean: period_days as f64 * daily_mean, samples, prefix })
}

impl PeriodicDemandModel {
    pub fn period_days(&self) -> u32 {
        self.period_days
    }

    pub fn daily_mean(&self) -> f64 {
        self.daily_mean
    }

    /// Sorted period-demand samples.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Inverse CDF of period demand, interpolated between order statistics.
    pub fn quantile(&self, fractile: f64) -> Result<f64> {
        if !(fractile > 0.0 && fractile < 1.0) {
            return Err(domain(format!("fractile {fractile} is outside (0, 1)")));
        }
        Ok(interpolated_quantile(&self.samples, fractile))
    }

    /// `T` times the analytic daily mean. Not the sample mean, so it carries
    /// no Monte Carlo noise.
    pub fn expected_periodic_demand(&self) -> f64 {
        self.periodic_mean
    }

    /// Empirical CDF: share of samples `<= q`.
    pub fn cdf(&self, q: f64) -> f64 {
        self.samples.partition_point(|&s| s <= q) as f64 / self.samples.len() as f64
    }

    /// Empirical `E[min(D, q)]`, the expected units sold from stock `q`.
    pub fn expected_sales(&self, q: f64) -> f64 {
        let n = self.samples.len();
        let below = self.samples.partition_point(|&s| s < q);
        (self.prefix[below] + q * (n - below) as f64) / n as f64
    }

    /// Empirical `E[max(q - D, 0)]`.
    pub fn expected_leftover(&self, q: f64) -> f64 {
        q - self.expected_sales(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    dist: [u64; 4],
    period_days: u32,
    n_samples: usize,
    seed: u64,
}

impl CacheKey {
    fn new(dist: &DemandDistribution, period_days: u32, n_samples: usize, seed: u64) -> Self {
        let dist = match *dist {
            DemandDistribution::Uniform { a, b } => [0, a.to_bits(), b.to_bits(), 0],
            DemandDistribution::Triangular { a, b, c } => [1, a.to_bits(), b.to_bits(), c.to_bits()],
            DemandDistribution::LogNormal { mu_l, sigma_l } => [2, mu_l.to_bits(), sigma_l.to_bits(), 0],
        };
        CacheKey { dist, period_days, n_samples, seed }
    }
}

/// Shares built models between policy construction and repeated experiments.
#[derive(Debug, Default)]
pub struct QuantileCache {
    models: Mutex<HashMap<CacheKey, Arc<PeriodicDemandModel>>>,
}

impl QuantileCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(
        &self,
        daily: &DemandDistribution,
        period_days: u32,
        n_samples: usize,
        seed: u64,
    ) -> Result<Arc<PeriodicDemandModel>> {
        let key = CacheKey::new(daily, period_days, n_samples, seed);
        if let Some(model) = self.models.lock().unwrap().get(&key) {
            return Ok(Arc::clone(model));
        }
        // Built outside the lock; a racing duplicate build yields identical data.
        let model = Arc::new(build_periodic_model(daily, period_days, n_samples, seed)?);
        let mut models = self.models.lock().unwrap();
        Ok(Arc::clone(models.entry(key).or_insert(model)))
    }

    pub fn len(&self) -> usize {
        self.models.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
