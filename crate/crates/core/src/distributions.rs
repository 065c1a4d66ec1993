//! Daily demand models.
//!
//! Three continuous families are supported: uniform on `[a, b]`, triangular
//! on `[a, b]` with mode `c`, and log-normal with log-scale parameters
//! `mu_l`, `sigma_l`. Demand is real-valued and never rounded.

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Anything that can produce one day of demand.
///
/// The simulator and the periodic-demand builder are generic over this
/// trait; [`DemandDistribution`] is the implementation used everywhere in
/// the library.
pub trait DailyDemand: Send + Sync {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;

    /// Analytic expected daily demand.
    fn mean(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistributionKind {
    Uniform,
    Triangular,
    #[serde(alias = "log-normal", alias = "log_normal")]
    LogNormal,
}

impl DistributionKind {
    pub const ALL: [DistributionKind; 3] =
        [DistributionKind::Uniform, DistributionKind::Triangular, DistributionKind::LogNormal];

    /// Config-file tag, also accepted by [`str::parse`].
    pub fn tag(self) -> &'static str {
        match self {
            DistributionKind::Uniform => "uniform",
            DistributionKind::Triangular => "triangular",
            DistributionKind::LogNormal => "lognormal",
        }
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistributionKind::Uniform => "Uniform",
            DistributionKind::Triangular => "Triangular",
            DistributionKind::LogNormal => "Log-normal",
        })
    }
}

impl std::str::FromStr for DistributionKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(DistributionKind::Uniform),
            "triangular" => Ok(DistributionKind::Triangular),
            "lognormal" | "log-normal" | "log_normal" => Ok(DistributionKind::LogNormal),
            other => Err(domain(format!("unknown distribution kind `{other}`"))),
        }
    }
}

/// A validated daily demand distribution.
///
/// Values built through the constructors or deserialized from a config file
/// always satisfy their family's invariants; sampling relies on that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawDistribution")]
pub enum DemandDistribution {
    Uniform {
        a: f64,
        b: f64,
    },
    Triangular {
        a: f64,
        b: f64,
        c: f64,
    },
    #[serde(rename = "lognormal")]
    LogNormal {
        mu_l: f64,
        sigma_l: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawDistribution {
    Uniform {
        a: f64,
        b: f64,
    },
    Triangular {
        a: f64,
        b: f64,
        c: f64,
    },
    #[serde(alias = "log-normal", alias = "log_normal")]
    LogNormal {
        mu_l: f64,
        sigma_l: f64,
    },
}

impl TryFrom<RawDistribution> for DemandDistribution {
    type Error = crate::Error;

    fn try_from(raw: RawDistribution) -> Result<Self> {
        match raw {
            RawDistribution::Uniform { a, b } => Self::uniform(a, b),
            RawDistribution::Triangular { a, b, c } => Self::triangular(a, b, c),
            RawDistribution::LogNormal { mu_l, sigma_l } => Self::lognormal(mu_l, sigma_l),
        }
    }
}

impl DemandDistribution {
    /// Uniform on `[a, b]`. `a == b` is a point mass.
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(domain(format!("uniform needs finite a <= b, got a={a}, b={b}")));
        }
        Ok(DemandDistribution::Uniform { a, b })
    }

    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || !(a <= c && c <= b) {
            return Err(domain(format!("triangular needs a <= c <= b, got a={a}, b={b}, c={c}")));
        }
        Ok(DemandDistribution::Triangular { a, b, c })
    }

    pub fn lognormal(mu_l: f64, sigma_l: f64) -> Result<Self> {
        if !mu_l.is_finite() || !(sigma_l > 0.0 && sigma_l.is_finite()) {
            return Err(domain(format!(
                "log-normal needs finite mu_l and sigma_l > 0, got mu_l={mu_l}, sigma_l={sigma_l}"
            )));
        }
        Ok(DemandDistribution::LogNormal { mu_l, sigma_l })
    }

    pub fn kind(&self) -> DistributionKind {
        match self {
            DemandDistribution::Uniform { .. } => DistributionKind::Uniform,
            DemandDistribution::Triangular { .. } => DistributionKind::Triangular,
            DemandDistribution::LogNormal { .. } => DistributionKind::LogNormal,
        }
    }

    /// Draws one day of demand.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DemandDistribution::Uniform { a, b } => {
                let u: f64 = rng.random();
                a + (b - a) * u
            }
            DemandDistribution::Triangular { a, b, c } => {
                let u: f64 = rng.random();
                triangular_inverse_cdf(a, b, c, u)
            }
            DemandDistribution::LogNormal { mu_l, sigma_l } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu_l + sigma_l * z).exp()
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DemandDistribution::Uniform { a, b } => (a + b) / 2.0,
            DemandDistribution::Triangular { a, b, c } => (a + b + c) / 3.0,
            DemandDistribution::LogNormal { mu_l, sigma_l } => (mu_l + sigma_l * sigma_l / 2.0).exp(),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            DemandDistribution::Uniform { a, b } => (b - a).powi(2) / 12.0,
            DemandDistribution::Triangular { a, b, c } => (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0,
            DemandDistribution::LogNormal { mu_l, sigma_l } => {
                let s2 = sigma_l * sigma_l;
                (s2.exp() - 1.0) * (2.0 * mu_l + s2).exp()
            }
        }
    }

    pub fn stdev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Smallest possible draw.
    pub fn lower_bound(&self) -> f64 {
        match *self {
            DemandDistribution::Uniform { a, .. } | DemandDistribution::Triangular { a, .. } => a,
            DemandDistribution::LogNormal { .. } => 0.0,
        }
    }

    /// Largest possible draw, `None` when unbounded.
    pub fn upper_bound(&self) -> Option<f64> {
        match *self {
            DemandDistribution::Uniform { b, .. } | DemandDistribution::Triangular { b, .. } => Some(b),
            DemandDistribution::LogNormal { .. } => None,
        }
    }
}

impl DailyDemand for DemandDistribution {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        DemandDistribution::sample(self, rng)
    }

    fn mean(&self) -> f64 {
        DemandDistribution::mean(self)
    }
}

impl fmt::Display for DemandDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DemandDistribution::Uniform { a, b } => write!(f, "Uniform(a={a}, b={b})"),
            DemandDistribution::Triangular { a, b, c } => {
                write!(f, "Triangular(a={a}, b={b}, c={c})")
            }
            DemandDistribution::LogNormal { mu_l, sigma_l } => {
                write!(f, "LogNormal(mu_l={mu_l}, sigma_l={sigma_l})")
            }
        }
    }
}

/// Closed-form inverse of the triangular CDF.
fn triangular_inverse_cdf(a: f64, b: f64, c: f64, u: f64) -> f64 {
    let width = b - a;
    if width == 0.0 {
        return a;
    }
    let mode_cdf = (c - a) / width;
    if u < mode_cdf {
        a + (u * width * (c - a)).sqrt()
    } else {
        b - ((1.0 - u) * width * (b - c)).sqrt()
    }
}

/// Sample mean and standard deviation of observed daily demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMoments {
    pub mean: f64,
    pub stdev: f64,
}

impl SampleMoments {
    pub fn new(mean: f64, stdev: f64) -> Result<Self> {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(domain(format!("sample mean must be positive, got {mean}")));
        }
        if !(stdev >= 0.0 && stdev.is_finite()) {
            return Err(domain(format!("sample stdev must be non-negative, got {stdev}")));
        }
        Ok(SampleMoments { mean, stdev })
    }
}

/// Method-of-moments log-normal: `mu_l = ln(m^2 / sqrt(m^2 + s^2))`,
/// `sigma_l = sqrt(ln(1 + s^2 / m^2))`.
pub fn fit_lognormal(moments: SampleMoments) -> Result<DemandDistribution> {
    let SampleMoments { mean: m, stdev: s } = moments;
    if !(m.is_finite() && s.is_finite() && m > 0.0 && s > 0.0) {
        return Err(domain(format!("log-normal fit needs m > 0 and s > 0, got m={m}, s={s}")));
    }
    let m2 = m * m;
    let mu_l = (m2 / (m2 + s * s).sqrt()).ln();
    let sigma_l = (1.0 + s * s / m2).ln().sqrt();
    DemandDistribution::lognormal(mu_l, sigma_l)
}

/// Triangular on `[a, b]` whose mode makes the mean equal the sample mean:
/// `c = 3m - a - b`.
pub fn fit_triangular_mode(a: f64, b: f64, moments: SampleMoments) -> Result<DemandDistribution> {
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(domain(format!("triangular fit needs a < b, got a={a}, b={b}")));
    }
    let c = 3.0 * moments.mean - a - b;
    if !(a <= c && c <= b) {
        return Err(domain(format!("mean {} is not reachable on [{a}, {b}]: mode would be {c}", moments.mean)));
    }
    DemandDistribution::triangular(a, b, c)
}
