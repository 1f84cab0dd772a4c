use std::f64::consts::PI;

use crate::curve::{check_radii, Method, SummaryCurve, SummaryKind};
use crate::error::{domain, Result};
use crate::model::{CovarianceFamily, CovarianceModel, LgcpModel, ModelConfig};
use crate::numerics::adaptive_simpson;

const SEGMENT_TOLERANCE: f64 = 1e-12;

/// `K(r) = 2π ∫₀ʳ s exp{c̃(s)} ds` of a planar LGCP.
pub fn theoretical_k(model: &LgcpModel, radii: &[f64]) -> Result<SummaryCurve> {
    check_radii(radii)?;
    if model.dimension() != 2 {
        return domain(format!("theoretical K is implemented for d = 2, model has d = {}", model.dimension()));
    }
    let values = k_values(model.covariance(), radii).into_iter().map(Some).collect();
    Ok(SummaryCurve::new(SummaryKind::K, Method::Theoretical, radii.to_vec(), values)
        .with_provenance(serde_json::json!({ "model": ModelConfig::from_model(model) })))
}

/// `K` at ascending nonnegative radii, accumulated segment by segment.
pub(crate) fn k_values(cov: &CovarianceModel, radii: &[f64]) -> Vec<f64> {
    if cov.family() == CovarianceFamily::Constant {
        let g = cov.variance().exp();
        return radii.iter().map(|r| g * PI * r * r).collect();
    }
    let integrand = |s: f64| 2.0 * PI * s * cov.at(s).exp();
    // the spherical covariance has a kink at, and vanishes beyond, its range
    let range = (cov.family() == CovarianceFamily::Spherical).then(|| cov.scale());
    let mut out = Vec::with_capacity(radii.len());
    let (mut acc, mut prev) = (0.0, 0.0);
    for r in radii {
        let mut a = prev;
        for b in range.filter(|b| *b > prev && *b < *r).into_iter().chain(std::iter::once(*r)) {
            acc += match range {
                Some(alpha) if a >= alpha => PI * (b * b - a * a),
                _ => adaptive_simpson(integrand, a, b, SEGMENT_TOLERANCE),
            };
            a = b;
        }
        out.push(acc);
        prev = *r;
    }
    out
}
