//! Minimum-contrast fitting of the covariance parameters through `K`.
//!
//! With `ρ̂ = n/|W|` fixed, `(σ², α)` minimise
//! `∫₀^{r_max} (K̂(r)^{1/4} − K(r; σ², α)^{1/4})² dr`, the integral taken by
//! a midpoint rule. The search runs in coordinates scaled by the shorter
//! window side `L`, over `(log σ², log(α/L))`, with Nelder–Mead from fixed
//! starting simplices; parameters are clamped into the box
//! `σ² ∈ [1e-4, 25]`, `α/L ∈ [0.01, 0.5]`.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use serde::{Deserialize, Serialize};

use super::empirical::estimate_k;
use super::theory::k_values;
use crate::error::{domain, Error, Result};
use crate::model::{CovarianceFamily, CovarianceModel, LgcpModel};
use crate::pattern::PointPattern;

pub const CONTRAST_EXPONENT: f64 = 0.25;
pub const VARIANCE_BOUNDS: (f64, f64) = (1e-4, 25.0);
/// Bounds on `α` as a fraction of the shorter window side.
pub const RELATIVE_SCALE_BOUNDS: (f64, f64) = (0.01, 0.5);
/// Default `r_max` as a fraction of the shorter window side.
pub const DEFAULT_RELATIVE_R_MAX: f64 = 0.25;
pub const MIN_FIT_POINTS: usize = 10;

const CONTRAST_NODES: usize = 128;
const MAX_ITERATIONS: u64 = 500;
const SIMPLEX_TOLERANCE: f64 = 1e-10;
/// `(σ², α/L)` starting points.
const STARTS: [(f64, f64); 5] = [(1.0, 0.05), (4.0, 0.1), (0.25, 0.2), (9.0, 0.03), (2.0, 0.3)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: CovarianceFamily,
    pub variance: f64,
    pub scale: f64,
    /// Contrast at the optimum, in the pattern's units.
    pub contrast: f64,
    pub intensity: f64,
    /// `log ρ̂ − σ̂²/2`.
    pub mean_level: f64,
    pub r_max: f64,
    /// Nelder–Mead iterations summed over the starts.
    pub iterations: u64,
    /// Whether the start that produced the optimum met the simplex tolerance.
    pub converged: bool,
}

impl FitResult {
    pub fn model(&self) -> Result<LgcpModel> {
        LgcpModel::planar(self.mean_level, CovarianceModel::new(self.family, self.variance, self.scale)?)
    }
}

#[derive(Clone)]
struct Contrast {
    family: CovarianceFamily,
    radii: Vec<f64>,
    empirical: Vec<f64>,
    step: f64,
}

impl Contrast {
    fn clamp(p: &[f64]) -> (f64, f64) {
        let v = p[0].exp().clamp(VARIANCE_BOUNDS.0, VARIANCE_BOUNDS.1);
        let a = p[1].exp().clamp(RELATIVE_SCALE_BOUNDS.0, RELATIVE_SCALE_BOUNDS.1);
        (v, a)
    }

    fn value(&self, variance: f64, scale: f64) -> Result<f64> {
        let cov = CovarianceModel::new(self.family, variance, scale)?;
        let theory = k_values(&cov, &self.radii);
        let sum: f64 = self
            .empirical
            .iter()
            .zip(&theory)
            .map(|(e, t)| (e - t.powf(CONTRAST_EXPONENT)).powi(2))
            .sum();
        Ok(sum * self.step)
    }
}

impl CostFunction for Contrast {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let (v, a) = Self::clamp(p);
        self.value(v, a).map_err(|e| argmin::core::Error::msg(e.to_string()))
    }
}

/// Fits `σ²` and `α` of `family` to `pattern`. `r_max` defaults to a
/// quarter of the shorter window side. Non-convergence is reported in the
/// result rather than as an error.
pub fn fit_min_contrast(pattern: &PointPattern, family: CovarianceFamily, r_max: Option<f64>) -> Result<FitResult> {
    if family == CovarianceFamily::Constant {
        return domain("minimum contrast needs a family with a scale parameter");
    }
    let n = pattern.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::TooFewPoints(format!("fitting needs at least {MIN_FIT_POINTS} points, got {n}")));
    }
    let w = *pattern.window();
    let side = w.min_side();
    let r_max = r_max.unwrap_or(DEFAULT_RELATIVE_R_MAX * side);
    if !(r_max.is_finite() && r_max > 0.0) {
        return domain(format!("r_max must be positive, got {r_max}"));
    }
    let unit = pattern.translated([-w.x_min, -w.y_min])?;
    let unit = PointPattern::new(
        unit.points().iter().map(|p| [p[0] / side, p[1] / side]).collect(),
        crate::pattern::Window::new(0.0, w.width() / side, 0.0, w.height() / side)?,
    )?;
    let rel_max = r_max / side;
    let step = rel_max / CONTRAST_NODES as f64;
    let radii: Vec<f64> = (0..CONTRAST_NODES).map(|k| (k as f64 + 0.5) * step).collect();
    let empirical = estimate_k(&unit, &radii)?
        .values
        .iter()
        .map(|v| v.expect("K estimate defined at every radius").powf(CONTRAST_EXPONENT))
        .collect();
    let contrast = Contrast { family, radii, empirical, step };

    let mut best: Option<(f64, f64, f64, bool)> = None;
    let mut iterations = 0;
    for (v0, a0) in STARTS {
        let x0 = vec![v0.ln(), a0.ln()];
        let simplex = vec![x0.clone(), vec![x0[0] + 0.5, x0[1]], vec![x0[0], x0[1] + 0.5]];
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(SIMPLEX_TOLERANCE)
            .map_err(|e| Error::Domain(e.to_string()))?;
        let res = Executor::new(contrast.clone(), solver)
            .configure(|s| s.max_iters(MAX_ITERATIONS))
            .run()
            .map_err(|e| Error::Domain(e.to_string()))?;
        let state = res.state();
        iterations += state.get_iter();
        let converged = matches!(state.get_termination_status(), TerminationStatus::Terminated(TerminationReason::SolverConverged));
        let p = state.get_best_param().cloned().unwrap_or(x0);
        let (v, a) = Contrast::clamp(&p);
        let value = contrast.value(v, a)?;
        if best.is_none_or(|b| value < b.2) {
            best = Some((v, a, value, converged));
        }
    }
    let (variance, rel_scale, value, converged) = best.expect("at least one start");
    let intensity = pattern.intensity();
    Ok(FitResult {
        family,
        variance,
        scale: rel_scale * side,
        contrast: value * side * side,
        intensity,
        mean_level: intensity.ln() - variance / 2.0,
        r_max,
        iterations,
        converged,
    })
}
