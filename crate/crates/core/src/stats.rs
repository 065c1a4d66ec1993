//! Cross-run summary statistics.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// z-value of the two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

/// Linear interpolation between order statistics at zero-based rank
/// `p * (n - 1)`. `sorted` must be ascending and nonempty.
pub(crate) fn interpolated_quantile(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let rank = p * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Summary of one metric over `n` simulation runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` when `n < 2`.
    stdev: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub median: f64,
    /// `(fractile, value)` pairs in the order requested.
    pub percentiles: Vec<(f64, f64)>,
}

impl AggregateStats {
    pub fn stdev(&self) -> Result<f64> {
        self.stdev.ok_or(Error::InsufficientData { needed: 2, got: self.n })
    }

    /// Half-width of the 95% confidence interval of the mean.
    pub fn moe95(&self) -> Result<f64> {
        Ok(moe95(self.stdev()?, self.n))
    }

    pub fn percentile(&self, fractile: f64) -> Option<f64> {
        self.percentiles.iter().find(|(p, _)| (p - fractile).abs() < 1e-12).map(|&(_, v)| v)
    }
}

pub fn moe95(stdev: f64, n: usize) -> f64 {
    Z_95 * stdev / (n as f64).sqrt()
}

/// Mean, sample standard deviation, median and interpolated percentiles.
pub fn aggregate(values: &[f64], fractiles: &[f64]) -> Result<AggregateStats> {
    if values.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if let Some(p) = fractiles.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(domain(format!("percentile fractile {p} is outside (0, 1)")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    // Summing the sorted copy keeps the result independent of input order.
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let stdev = (n >= 2).then(|| {
        let ss: f64 = sorted.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    });
    Ok(AggregateStats {
        n,
        mean,
        stdev,
        min: sorted[0],
        max: sorted[n - 1],
        median: interpolated_quantile(&sorted, 0.5),
        percentiles: fractiles.iter().map(|&p| (p, interpolated_quantile(&sorted, p))).collect(),
    })
}
