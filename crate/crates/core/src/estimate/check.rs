use serde::{Deserialize, Serialize};

use super::empirical::estimate_j;
use crate::curve::SummaryCurve;
use crate::error::Result;
use crate::laplace::summary_curves;
use crate::model::{LgcpModel, ModelConfig};
use crate::pattern::PointPattern;

/// Empirical against Laplace `J` for a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelCheckReport {
    pub model: ModelConfig,
    pub q: usize,
    pub empirical: SummaryCurve,
    pub laplace: SummaryCurve,
    /// `max_r |Ĵ(r) − J(r)|` over radii where both are defined.
    pub max_discrepancy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argmax_radius: Option<f64>,
}

impl ModelCheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Largest absolute difference between two curves on the same radii, and
/// where it occurs.
pub fn max_discrepancy(a: &SummaryCurve, b: &SummaryCurve) -> Result<(f64, Option<f64>)> {
    a.max_abs_difference(b)?;
    let mut best = (0.0, None);
    for ((r, x), y) in a.radii.iter().zip(&a.values).zip(&b.values) {
        if let (Some(x), Some(y)) = (x, y) {
            let d = (x - y).abs();
            if best.1.is_none() || d > best.0 {
                best = (d, Some(*r));
            }
        }
    }
    Ok(best)
}

pub fn model_check_j(pattern: &PointPattern, model: &LgcpModel, radii: &[f64], q: usize, lattice: usize) -> Result<ModelCheckReport> {
    let empirical = estimate_j(pattern, radii, lattice)?;
    let laplace = summary_curves(model, radii, q)?.j;
    let (max_discrepancy, argmax_radius) = max_discrepancy(&empirical, &laplace)?;
    Ok(ModelCheckReport { model: ModelConfig::from_model(model), q, empirical, laplace, max_discrepancy, argmax_radius })
}
