//! Covariance families, the stationary LGCP model, its joint intensities,
//! and reduced Palm models.
//!
//! A stationary LGCP driven by `Y` with constant mean `μ` and covariance
//! `c̃` has intensity `ρ = exp(μ + σ²/2)`, pair correlation
//! `g̃(h) = exp(c̃(‖h‖))` and `n`-th order joint intensity
//! `ρ⁽ⁿ⁾(x₁..xₙ) = ρⁿ ∏_{i<j} g̃(xᵢ − xⱼ)`.
//!
//! The reduced Palm process given pairwise distinct `x₁..xₙ` is again an
//! LGCP with the same covariance and the shifted mean
//! `μ_{x₁..xₙ}(u) = μ + Σᵢ c̃(‖u − xᵢ‖)`; see [`PalmModel`].

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_2_PI;

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CovarianceFamily {
    /// `c̃(t) = σ²`; the process is a mixed Poisson process.
    Constant,
    /// `c̃(t) = σ² exp(−t/α)`.
    Exponential,
    /// `c̃(t) = σ²[1 − (2/π){(t/α)√(1 − (t/α)²) + asin(t/α)}]` for `t ≤ α`, zero beyond.
    Spherical,
}

impl std::fmt::Display for CovarianceFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CovarianceFamily::Constant => "constant",
            CovarianceFamily::Exponential => "exponential",
            CovarianceFamily::Spherical => "spherical",
        };
        f.write_str(s)
    }
}

/// Stationary isotropic covariance function of the log-intensity field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceModel {
    family: CovarianceFamily,
    variance: f64,
    scale: f64,
}

impl CovarianceModel {
    pub fn new(family: CovarianceFamily, variance: f64, scale: f64) -> Result<Self> {
        if !(variance.is_finite() && variance >= 0.0) {
            return domain(format!("variance must be finite and nonnegative, got {variance}"));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return domain(format!("scale must be finite and positive, got {scale}"));
        }
        Ok(Self { family, variance, scale })
    }

    pub fn spherical(variance: f64, scale: f64) -> Result<Self> {
        Self::new(CovarianceFamily::Spherical, variance, scale)
    }

    pub fn exponential(variance: f64, scale: f64) -> Result<Self> {
        Self::new(CovarianceFamily::Exponential, variance, scale)
    }

    pub fn constant(variance: f64) -> Result<Self> {
        Self::new(CovarianceFamily::Constant, variance, 1.0)
    }

    pub fn family(&self) -> CovarianceFamily {
        self.family
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `c̃(distance)`. Negative distances are a domain error.
    pub fn evaluate(&self, distance: f64) -> Result<f64> {
        if distance < 0.0 || distance.is_nan() {
            return domain(format!("distance must be nonnegative, got {distance}"));
        }
        Ok(self.at(distance))
    }

    /// `c̃(‖lag‖)`.
    pub fn evaluate_lag(&self, lag: &[f64]) -> f64 {
        self.at(norm(lag))
    }

    /// Unchecked evaluation; `distance` must be nonnegative.
    pub(crate) fn at(&self, distance: f64) -> f64 {
        debug_assert!(distance >= 0.0);
        match self.family {
            CovarianceFamily::Constant => self.variance,
            CovarianceFamily::Exponential => self.variance * (-distance / self.scale).exp(),
            CovarianceFamily::Spherical => {
                let s = distance / self.scale;
                if s >= 1.0 {
                    0.0
                } else {
                    let v = self.variance * (1.0 - FRAC_2_PI * (s * (1.0 - s * s).sqrt() + s.asin()));
                    // rounding near s = 1 can leave a tiny negative residue
                    v.max(0.0)
                }
            }
        }
    }

    /// True when `c̃ ≥ 0` everywhere, which holds for all three families.
    pub fn is_nonnegative(&self) -> bool {
        self.variance >= 0.0
    }

    pub fn with_variance(&self, variance: f64) -> Result<Self> {
        Self::new(self.family, variance, self.scale)
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        Self::new(self.family, self.variance, scale)
    }
}

/// Stationary LGCP: constant mean level of `Y` plus a covariance model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgcpModel {
    mean_level: f64,
    covariance: CovarianceModel,
    dimension: usize,
}

impl LgcpModel {
    pub fn new(mean_level: f64, covariance: CovarianceModel, dimension: usize) -> Result<Self> {
        if !mean_level.is_finite() {
            return domain(format!("mean level must be finite, got {mean_level}"));
        }
        if dimension == 0 {
            return domain("dimension must be positive");
        }
        Ok(Self { mean_level, covariance, dimension })
    }

    /// Planar model.
    pub fn planar(mean_level: f64, covariance: CovarianceModel) -> Result<Self> {
        Self::new(mean_level, covariance, 2)
    }

    /// Planar model parameterised by its intensity: `μ = log ρ − σ²/2`.
    pub fn planar_with_intensity(intensity: f64, covariance: CovarianceModel) -> Result<Self> {
        if !(intensity.is_finite() && intensity > 0.0) {
            return domain(format!("intensity must be positive, got {intensity}"));
        }
        Self::planar(intensity.ln() - covariance.variance() / 2.0, covariance)
    }

    pub fn mean_level(&self) -> f64 {
        self.mean_level
    }

    pub fn covariance(&self) -> &CovarianceModel {
        &self.covariance
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `ρ = exp(μ + σ²/2)`.
    pub fn intensity(&self) -> f64 {
        self.log_intensity().exp()
    }

    /// `log ρ = μ + σ²/2`.
    pub fn log_intensity(&self) -> f64 {
        self.mean_level + self.covariance.variance() / 2.0
    }

    /// `g̃(lag) = exp(c̃(‖lag‖))`.
    pub fn pair_correlation(&self, lag: &[f64]) -> f64 {
        self.covariance.evaluate_lag(lag).exp()
    }

    /// `ρ⁽ⁿ⁾(x₁..xₙ) = ∏ᵢ ρ · ∏_{i<j} g̃(xᵢ − xⱼ)` for pairwise distinct points.
    pub fn joint_intensity<P: AsRef<[f64]>>(&self, points: &[P]) -> Result<f64> {
        if points.is_empty() {
            return domain("joint intensity needs at least one point");
        }
        check_points(points, self.dimension)?;
        Ok(self.log_joint_intensity_unchecked(points).exp())
    }

    fn log_joint_intensity_unchecked<P: AsRef<[f64]>>(&self, points: &[P]) -> f64 {
        let log_rho = self.mean_level + self.covariance.variance() / 2.0;
        let mut total = points.len() as f64 * log_rho;
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                total += self.covariance.at(distance(a.as_ref(), b.as_ref()));
            }
        }
        total
    }

    /// `μ_{x₁..xₙ}(u) = μ + Σᵢ c̃(‖u − xᵢ‖)`.
    pub fn palm_mean_function(&self, cond: &PalmConditioning, u: &[f64]) -> Result<f64> {
        self.check_dimension(u)?;
        cond.check_dimension(self.dimension)?;
        Ok(self.mean_level + cond.covariance_sum(&self.covariance, u))
    }

    /// Reduced Palm model given `cond`.
    pub fn palm_model(&self, cond: &PalmConditioning) -> Result<PalmModel> {
        cond.check_dimension(self.dimension)?;
        Ok(PalmModel { base: *self, conditioning: cond.clone() })
    }

    /// `m`-th order joint intensity of the reduced Palm process at `points`.
    pub fn palm_joint_intensity<P: AsRef<[f64]>>(
        &self,
        cond: &PalmConditioning,
        points: &[P],
    ) -> Result<f64> {
        self.palm_model(cond)?.joint_intensity(points)
    }

    fn check_dimension(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: u.len() });
        }
        Ok(())
    }

    pub fn with_covariance(&self, covariance: CovarianceModel) -> Result<Self> {
        Self::new(self.mean_level, covariance, self.dimension)
    }
}

/// Pairwise distinct conditioning locations `x₁..xₙ`, `n ≥ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PalmConditioning {
    points: Vec<Vec<f64>>,
}

impl PalmConditioning {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return domain("conditioning needs at least one point");
        }
        let dim = points[0].len();
        check_points(&points, dim)?;
        Ok(Self { points })
    }

    pub fn single(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![point])
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Concatenation with further points; the union must stay pairwise distinct.
    pub fn extend(&self, more: &PalmConditioning) -> Result<Self> {
        let mut points = self.points.clone();
        points.extend(more.points.iter().cloned());
        Self::new(points)
    }

    /// `Σᵢ c̃(‖u − xᵢ‖)`.
    pub fn covariance_sum(&self, cov: &CovarianceModel, u: &[f64]) -> f64 {
        self.points.iter().map(|x| cov.at(distance(u, x))).sum()
    }

    fn check_dimension(&self, dim: usize) -> Result<()> {
        match self.points.iter().find(|p| p.len() != dim) {
            Some(p) => Err(Error::DimensionMismatch { expected: dim, got: p.len() }),
            None => Ok(()),
        }
    }
}

/// LGCP with mean function `μ_{x₁..xₙ}` and the base covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct PalmModel {
    base: LgcpModel,
    conditioning: PalmConditioning,
}

impl PalmModel {
    pub fn base(&self) -> &LgcpModel {
        &self.base
    }

    pub fn conditioning(&self) -> &PalmConditioning {
        &self.conditioning
    }

    pub fn covariance(&self) -> &CovarianceModel {
        self.base.covariance()
    }

    pub fn mean_at(&self, u: &[f64]) -> Result<f64> {
        self.base.palm_mean_function(&self.conditioning, u)
    }

    /// `ρ_{x₁..xₙ}(u) = exp(μ_{x₁..xₙ}(u) + σ²/2)`.
    pub fn intensity_at(&self, u: &[f64]) -> Result<f64> {
        Ok((self.mean_at(u)? + self.base.covariance.variance() / 2.0).exp())
    }

    /// Unchanged from the base model.
    pub fn pair_correlation(&self, lag: &[f64]) -> f64 {
        self.base.pair_correlation(lag)
    }

    /// `∏ᵢ ρ_{x₁..xₙ}(uᵢ) ∏_{i<j} g̃(uᵢ − uⱼ)`; the `uᵢ` must be pairwise
    /// distinct and distinct from every conditioning point.
    pub fn joint_intensity<P: AsRef<[f64]>>(&self, points: &[P]) -> Result<f64> {
        if points.is_empty() {
            return domain("joint intensity needs at least one point");
        }
        let dim = self.base.dimension;
        check_points(points, dim)?;
        for u in points {
            if self.conditioning.points.iter().any(|x| x.as_slice() == u.as_ref()) {
                return domain("evaluation point coincides with a conditioning point");
            }
        }
        let mut total = self.base.log_joint_intensity_unchecked(points);
        for u in points {
            total += self.conditioning.covariance_sum(&self.base.covariance, u.as_ref());
        }
        Ok(total.exp())
    }

    /// Palm model of this Palm model: condition on further points.
    pub fn condition(&self, more: &PalmConditioning) -> Result<PalmModel> {
        let conditioning = self.conditioning.extend(more)?;
        self.base.palm_model(&conditioning)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn check_points<P: AsRef<[f64]>>(points: &[P], dim: usize) -> Result<()> {
    for p in points {
        let p = p.as_ref();
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return domain("point coordinates must be finite");
        }
    }
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a.as_ref() == b.as_ref() {
                return domain(format!("points must be pairwise distinct, {:?} repeated", a.as_ref()));
            }
        }
    }
    Ok(())
}

/// Human-editable model description. Exactly one of `mean_level` and
/// `intensity` should be given; `intensity` is converted via `μ = log ρ − σ²/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: CovarianceFamily,
    pub variance: f64,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity: Option<f64>,
}

fn default_scale() -> f64 {
    1.0
}

impl ModelConfig {
    pub fn to_model(&self) -> Result<LgcpModel> {
        let cov = CovarianceModel::new(self.family, self.variance, self.scale)?;
        match (self.mean_level, self.intensity) {
            (Some(_), Some(_)) => domain("give either mean_level or intensity, not both"),
            (Some(mu), None) => LgcpModel::planar(mu, cov),
            (None, Some(rho)) => LgcpModel::planar_with_intensity(rho, cov),
            (None, None) => domain("model needs mean_level or intensity"),
        }
    }

    pub fn from_model(model: &LgcpModel) -> Self {
        let cov = model.covariance();
        Self {
            family: cov.family(),
            variance: cov.variance(),
            scale: cov.scale(),
            mean_level: Some(model.mean_level()),
            intensity: None,
        }
    }
}
