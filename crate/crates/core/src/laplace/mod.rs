//! Deterministic Laplace approximations of the F, G and J functions of a
//! stationary planar LGCP.
//!
//! With `Y` discretised on a [`QuadratureGrid`] over `B(o, r)`,
//!
//! * `1 − F(r) = E exp{−Σᵥ wᵥ e^{Y(v)}}`,
//! * `1 − G(r) = E exp{−Σᵥ wᵥ g̃(v) e^{Y(v)}}` (the reduced Palm process at
//!   the origin is the LGCP with mean shifted by `c̃`),
//! * `J = (1 − G)/(1 − F)`, with `a/0 = 0`.
//!
//! Each expectation is an integral `∫ e^{h(y)} dy` of a strictly concave
//! `h`, approximated to second order around its maximizer.

mod grid;
mod objective;

pub use grid::{build_grid, cell_weight, QuadratureGrid};
pub use objective::{log_one_minus_summary, LatentObjective, NewtonResult, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{check_radii, Method, SummaryCurve, SummaryKind};
use crate::error::{domain, Result};
use crate::model::{norm, CovarianceFamily, LgcpModel, ModelConfig};
use crate::numerics::DenseMatrix;

/// Multiplier `ℓ` inside the exponent integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Multiplier {
    /// `ℓ ≡ 1`: empty space function.
    ForF,
    /// `ℓ = g̃`: nearest-neighbour function via the Palm mean shift.
    ForG,
}

fn check_planar(model: &LgcpModel) -> Result<()> {
    if model.dimension() != 2 {
        return domain(format!("Laplace approximations need d = 2, model has d = {}", model.dimension()));
    }
    Ok(())
}

pub(crate) fn covariance_matrix(model: &LgcpModel, nodes: &[[f64; 2]]) -> DenseMatrix {
    let cov = model.covariance();
    let m = nodes.len();
    let mut s = DenseMatrix::zeros(m, m);
    for i in 0..m {
        s[(i, i)] = cov.variance();
        for j in 0..i {
            let d = ((nodes[i][0] - nodes[j][0]).powi(2) + (nodes[i][1] - nodes[j][1]).powi(2)).sqrt();
            let c = cov.at(d);
            s[(i, j)] = c;
            s[(j, i)] = c;
        }
    }
    s
}

/// A constant covariance makes `Y` a single shared Gaussian value, so the
/// grid collapses to one coordinate carrying the total weight.
fn collapses(model: &LgcpModel) -> bool {
    model.covariance().family() == CovarianceFamily::Constant && model.covariance().variance() > 0.0
}

fn collapsed_objective(model: &LgcpModel, multiplier: f64, weight: f64) -> Result<LatentObjective> {
    let v = model.covariance().variance();
    LatentObjective::new(vec![model.mean_level()], DenseMatrix::from_element(1, 1, v), vec![multiplier], vec![weight])
}

/// Objective for `1 − F` or `1 − G` at the grid's radius.
pub fn build_objective(model: &LgcpModel, grid: &QuadratureGrid, multiplier: Multiplier) -> Result<LatentObjective> {
    check_planar(model)?;
    if collapses(model) {
        let l = match multiplier {
            Multiplier::ForF => 1.0,
            Multiplier::ForG => model.covariance().variance().exp(),
        };
        return collapsed_objective(model, l, grid.total_weight());
    }
    let m = grid.len();
    let multipliers = match multiplier {
        Multiplier::ForF => vec![1.0; m],
        Multiplier::ForG => grid.nodes().iter().map(|v| model.pair_correlation(v)).collect(),
    };
    LatentObjective::new(
        vec![model.mean_level(); m],
        covariance_matrix(model, grid.nodes()),
        multipliers,
        grid.weights().to_vec(),
    )
}

/// Objective for `ρ(1 − G) = E exp{Y(o) − Σᵥ wᵥ e^{Y(v)}}`: coordinate 0 is
/// `Y(o)` with zero weight and unit linear reward.
pub fn build_g1_objective(model: &LgcpModel, grid: &QuadratureGrid) -> Result<LatentObjective> {
    check_planar(model)?;
    if collapses(model) {
        return collapsed_objective(model, 1.0, grid.total_weight())?.with_linear_term(vec![1.0]);
    }
    let mut nodes = Vec::with_capacity(grid.len() + 1);
    nodes.push([0.0, 0.0]);
    nodes.extend_from_slice(grid.nodes());
    let m = nodes.len();
    let mut weights = Vec::with_capacity(m);
    weights.push(0.0);
    weights.extend_from_slice(grid.weights());
    let mut linear = vec![0.0; m];
    linear[0] = 1.0;
    LatentObjective::new(vec![model.mean_level(); m], covariance_matrix(model, &nodes), vec![1.0; m], weights)?
        .with_linear_term(linear)
}

/// Laplace approximation of `G(r)` through the origin-value representation.
pub fn alternative_g_via_g1(model: &LgcpModel, grid: &QuadratureGrid) -> Result<f64> {
    let obj = build_g1_objective(model, grid)?;
    let log_one_minus_g = log_one_minus_summary(&obj)? - model.log_intensity();
    Ok(-log_one_minus_g.exp_m1())
}

/// Per-radius Laplace values.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusEvaluation {
    pub log_one_minus_f: f64,
    pub log_one_minus_g: f64,
    /// `|simplified − generic|` Laplace discrepancy, max over the F and G objectives.
    pub identity_gap: f64,
    pub newton_iterations: usize,
}

/// Evaluates both objectives at one radius.
pub fn evaluate_radius(model: &LgcpModel, radius: f64, q: usize) -> Result<RadiusEvaluation> {
    let grid = build_grid(radius, q)?;
    let mut logs = [0.0; 2];
    let mut gap = 0.0f64;
    let mut iterations = 0;
    for (slot, multiplier) in [Multiplier::ForF, Multiplier::ForG].into_iter().enumerate() {
        let obj = build_objective(model, &grid, multiplier)?;
        let res = obj.newton_maximize()?;
        let generic = obj.generic_log_laplace(&res.maximizer)?;
        gap = gap.max((generic - res.log_laplace).abs());
        iterations = iterations.max(res.iterations);
        logs[slot] = res.log_laplace;
    }
    Ok(RadiusEvaluation { log_one_minus_f: logs[0], log_one_minus_g: logs[1], identity_gap: gap, newton_iterations: iterations })
}

/// F, G and J Laplace curves on a common radius grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCurves {
    pub f: SummaryCurve,
    pub g: SummaryCurve,
    pub j: SummaryCurve,
    /// Per-radius Laplace identity discrepancy (`None` where the radius failed).
    pub identity_gaps: Vec<Option<f64>>,
}

impl SummaryCurves {
    pub fn max_identity_gap(&self) -> f64 {
        self.identity_gaps.iter().flatten().fold(0.0, |m, g| m.max(*g))
    }
}

/// `J = (1 − G)/(1 − F)` with `a/0 = 0`.
pub fn j_ratio(one_minus_g: f64, one_minus_f: f64) -> f64 {
    if one_minus_f == 0.0 {
        0.0
    } else {
        one_minus_g / one_minus_f
    }
}

/// Laplace F, G and J at each radius with grid parameter `q`. Radii are
/// evaluated independently (in parallel); a failure at one radius leaves a
/// missing value and a note rather than aborting the curve.
pub fn summary_curves(model: &LgcpModel, radii: &[f64], q: usize) -> Result<SummaryCurves> {
    check_planar(model)?;
    check_radii(radii)?;
    build_grid(radii[0], q)?;
    let results: Vec<Result<RadiusEvaluation>> = radii.par_iter().map(|r| evaluate_radius(model, *r, q)).collect();

    let n = radii.len();
    let (mut f, mut g, mut j) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut gaps = Vec::with_capacity(n);
    let mut notes = Vec::new();
    for (r, res) in radii.iter().zip(results) {
        match res {
            Ok(ev) => {
                let one_minus_f = ev.log_one_minus_f.exp();
                let one_minus_g = ev.log_one_minus_g.exp();
                f.push(Some(-ev.log_one_minus_f.exp_m1()));
                g.push(Some(-ev.log_one_minus_g.exp_m1()));
                j.push(Some(j_ratio(one_minus_g, one_minus_f)));
                gaps.push(Some(ev.identity_gap));
            }
            Err(e) => {
                f.push(None);
                g.push(None);
                j.push(None);
                gaps.push(None);
                notes.push(format!("r={r}: {e}"));
            }
        }
    }
    let provenance = serde_json::json!({ "model": ModelConfig::from_model(model), "q": q });
    let make = |kind, values| {
        let mut c = SummaryCurve::new(kind, Method::Laplace, radii.to_vec(), values)
            .with_q(q)
            .with_provenance(provenance.clone());
        c.notes = notes.clone();
        c
    };
    Ok(SummaryCurves { f: make(SummaryKind::F, f), g: make(SummaryKind::G, g), j: make(SummaryKind::J, j), identity_gaps: gaps })
}

/// G via the origin-value representation on each radius, plus the
/// corresponding J using the F objective.
pub fn g1_curves(model: &LgcpModel, radii: &[f64], q: usize) -> Result<(SummaryCurve, SummaryCurve)> {
    check_planar(model)?;
    check_radii(radii)?;
    build_grid(radii[0], q)?;
    let results: Vec<Result<(f64, f64)>> = radii
        .par_iter()
        .map(|r| {
            let grid = build_grid(*r, q)?;
            let g = alternative_g_via_g1(model, &grid)?;
            let log_f = log_one_minus_summary(&build_objective(model, &grid, Multiplier::ForF)?)?;
            Ok((g, j_ratio(1.0 - g, log_f.exp())))
        })
        .collect();
    let mut g = Vec::with_capacity(radii.len());
    let mut j = Vec::with_capacity(radii.len());
    let mut notes = Vec::new();
    for (r, res) in radii.iter().zip(results) {
        match res {
            Ok((gv, jv)) => {
                g.push(Some(gv));
                j.push(Some(jv));
            }
            Err(e) => {
                g.push(None);
                j.push(None);
                notes.push(format!("r={r}: {e}"));
            }
        }
    }
    let provenance = serde_json::json!({ "model": ModelConfig::from_model(model), "q": q, "route": "origin-value" });
    let mut gc = SummaryCurve::new(SummaryKind::G, Method::Laplace, radii.to_vec(), g).with_q(q).with_provenance(provenance.clone());
    let mut jc = SummaryCurve::new(SummaryKind::J, Method::Laplace, radii.to_vec(), j).with_q(q).with_provenance(provenance);
    gc.notes = notes.clone();
    jc.notes = notes;
    Ok((gc, jc))
}

/// Multiplier values `g̃(v)` at the grid nodes.
pub fn pair_correlation_multipliers(model: &LgcpModel, grid: &QuadratureGrid) -> Vec<f64> {
    grid.nodes().iter().map(|v| model.covariance().at(norm(v)).exp()).collect()
}

#[cfg(test)]
mod tests;
