use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Sample mean of independent replications with its standard error
/// `s / √n`, `s` the sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub replications: usize,
}

impl MonteCarloEstimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return domain("need at least one replication");
        }
        if let Some(v) = samples.iter().find(|v| !v.is_finite()) {
            return domain(format!("replication value {v} is not finite"));
        }
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let se = if n > 1 {
            let ss = compensated_sum(samples.iter().map(|v| (v - mean) * (v - mean)));
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { value: mean, standard_error: se, replications: n })
    }

    /// Estimate of `E(a − b)` from paired replications.
    pub fn paired_difference(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        Self::from_samples(&d)
    }

    /// `|value − target| / SE`; zero SE gives 0 on exact agreement and ∞ otherwise.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = (self.value - target).abs();
        if self.standard_error > 0.0 {
            gap / self.standard_error
        } else if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// `|value − target| ≤ k·SE + slack`.
    pub fn within(&self, target: f64, k: f64, slack: f64) -> bool {
        (self.value - target).abs() <= k * self.standard_error + slack
    }
}

/// `|a − b| ≤ k·√(SE_a² + SE_b²)` for independent estimates.
pub fn agree_independent(a: &MonteCarloEstimate, b: &MonteCarloEstimate, k: f64) -> bool {
    (a.value - b.value).abs() <= k * a.standard_error.hypot(b.standard_error)
}

/// Neumaier summation.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}
