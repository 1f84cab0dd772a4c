//! Monte Carlo estimates of the exact expectations that the Laplace
//! approximations target, on the same quadrature grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::estimate::MonteCarloEstimate;
use super::field::{raster_centers, FieldSampler};
use super::rng::{substream, Purpose};
use super::simulate::LgcpSimulator;
use crate::error::{domain, Error, Result};
use crate::laplace::{build_grid, pair_correlation_multipliers};
use crate::model::{distance, LgcpModel, PalmConditioning};
use crate::pattern::Window;

/// Which representation of `1 − G` to average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GRoute {
    /// `ρ⁻¹ exp{Y(o) − Σ wᵥ e^{Y(v)}}`.
    ViaG1,
    /// `exp{−Σ wᵥ g̃(v) e^{Y(v)}}`.
    ViaG2,
}

/// Per-replication integrands from one shared field draw on `{o} ∪ grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleDraws {
    pub one_minus_f: Vec<f64>,
    pub via_g1: Vec<f64>,
    pub via_g2: Vec<f64>,
}

impl OracleDraws {
    pub fn one_minus_g(&self, route: GRoute) -> &[f64] {
        match route {
            GRoute::ViaG1 => &self.via_g1,
            GRoute::ViaG2 => &self.via_g2,
        }
    }
}

fn check_replications(replications: usize) -> Result<()> {
    if replications == 0 {
        return domain("need at least one replication");
    }
    Ok(())
}

/// Draws `Y` jointly at the origin and the grid nodes of `B(o, r)` and
/// returns the `F`, `G1` and `G2` integrands of each replication.
pub fn oracle_draws(model: &LgcpModel, radius: f64, q: usize, replications: usize, seed: u64) -> Result<OracleDraws> {
    check_replications(replications)?;
    let grid = build_grid(radius, q)?;
    let mut nodes = Vec::with_capacity(grid.len() + 1);
    nodes.push([0.0, 0.0]);
    nodes.extend_from_slice(grid.nodes());
    let sampler = FieldSampler::for_model(model, &nodes)?;
    let multipliers = pair_correlation_multipliers(model, &grid);
    let weights = grid.weights();
    let log_rho = model.log_intensity();
    let rows: Vec<[f64; 3]> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let y = sampler.sample(&mut substream(seed, rep, Purpose::Field));
            let (mut s_f, mut s_g) = (0.0, 0.0);
            for ((w, l), yv) in weights.iter().zip(&multipliers).zip(&y[1..]) {
                let e = w * yv.exp();
                s_f += e;
                s_g += l * e;
            }
            [(-s_f).exp(), (y[0] - log_rho - s_f).exp(), (-s_g).exp()]
        })
        .collect();
    Ok(OracleDraws {
        one_minus_f: rows.iter().map(|r| r[0]).collect(),
        via_g1: rows.iter().map(|r| r[1]).collect(),
        via_g2: rows.iter().map(|r| r[2]).collect(),
    })
}

pub fn mc_one_minus_f(model: &LgcpModel, radius: f64, q: usize, replications: usize, seed: u64) -> Result<MonteCarloEstimate> {
    MonteCarloEstimate::from_samples(&oracle_draws(model, radius, q, replications, seed)?.one_minus_f)
}

/// Both routes use the same draws for a given seed.
pub fn mc_one_minus_g(model: &LgcpModel, radius: f64, q: usize, replications: usize, seed: u64, route: GRoute) -> Result<MonteCarloEstimate> {
    MonteCarloEstimate::from_samples(oracle_draws(model, radius, q, replications, seed)?.one_minus_g(route))
}

/// Paired `ViaG1 − ViaG2` difference under common random numbers.
pub fn mc_g_route_difference(model: &LgcpModel, radius: f64, q: usize, replications: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let d = oracle_draws(model, radius, q, replications, seed)?;
    MonteCarloEstimate::paired_difference(&d.via_g1, &d.via_g2)
}

/// Functionals `f` of the field on the finite test location set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunctional {
    /// `f ≡ 1`.
    Constant,
    /// `1{aᵀy ≤ b}`.
    HalfSpace { direction: Vec<f64>, offset: f64 },
    /// `exp(tᵀy)`.
    ExponentialTilt { coefficients: Vec<f64> },
    /// `y_k`.
    Value { index: usize },
}

impl TestFunctional {
    pub fn evaluate(&self, y: &[f64]) -> f64 {
        match self {
            TestFunctional::Constant => 1.0,
            TestFunctional::HalfSpace { direction, offset } => {
                let s: f64 = direction.iter().zip(y).map(|(a, y)| a * y).sum();
                if s <= *offset {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunctional::ExponentialTilt { coefficients } => coefficients.iter().zip(y).map(|(t, y)| t * y).sum::<f64>().exp(),
            TestFunctional::Value { index } => y[*index],
        }
    }

    fn check(&self, k: usize) -> Result<()> {
        let len = match self {
            TestFunctional::Constant => return Ok(()),
            TestFunctional::HalfSpace { direction, .. } => direction.len(),
            TestFunctional::ExponentialTilt { coefficients } => coefficients.len(),
            TestFunctional::Value { index } => {
                if *index >= k {
                    return domain(format!("value index {index} outside {k} test locations"));
                }
                return Ok(());
            }
        };
        if len != k {
            return Err(Error::DimensionMismatch { expected: k, got: len });
        }
        Ok(())
    }
}

/// Direct and importance-weighted estimates of `E f(Ỹ + Σᵢ c(·, xᵢ))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReweightingCheck {
    pub functional: TestFunctional,
    /// Mean of `f(Ỹ + Σᵢ c(·, xᵢ))`.
    pub direct: MonteCarloEstimate,
    /// Mean of `f(Ỹ) exp{Σᵢ Ỹ(xᵢ) − ½ Σᵢⱼ c(xᵢ, xⱼ)}`.
    pub weighted: MonteCarloEstimate,
    /// Paired `direct − weighted`.
    pub difference: MonteCarloEstimate,
}

/// Checks the shifted-mean representation of the Palm field against the
/// density `exp{Σᵢ ỹ(xᵢ) − ½ Σᵢⱼ c(xᵢ, xⱼ)}` with respect to the centred
/// field `Ỹ`, on a finite set of test locations. Both estimates of one
/// functional use the same draws.
pub fn mc_reweighting_check(
    model: &LgcpModel,
    cond: &PalmConditioning,
    test_locations: &[[f64; 2]],
    functionals: &[TestFunctional],
    replications: usize,
    seed: u64,
) -> Result<Vec<ReweightingCheck>> {
    check_replications(replications)?;
    let k = test_locations.len();
    if k == 0 {
        return domain("need at least one test location");
    }
    if test_locations.iter().flatten().any(|v| !v.is_finite()) {
        return domain("test locations must be finite");
    }
    let mut nodes = test_locations.to_vec();
    for x in cond.points() {
        if x.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: x.len() });
        }
        if test_locations.iter().any(|u| u[0] == x[0] && u[1] == x[1]) {
            return domain(format!("test location {x:?} coincides with a conditioning point"));
        }
        nodes.push([x[0], x[1]]);
    }
    for f in functionals {
        f.check(k)?;
    }
    let cov = model.covariance();
    let sampler = FieldSampler::for_model(model, &nodes)?;
    let shift: Vec<f64> = test_locations.iter().map(|u| cond.covariance_sum(cov, u)).collect();
    let half_quadratic: f64 =
        0.5 * cond.points().iter().map(|a| cond.points().iter().map(|b| cov.at(distance(a, b))).sum::<f64>()).sum::<f64>();

    let rows: Vec<Vec<[f64; 2]>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let y = sampler.sample_centered(&mut substream(seed, rep, Purpose::Field));
            let (test, at_cond) = y.split_at(k);
            let shifted: Vec<f64> = test.iter().zip(&shift).map(|(a, b)| a + b).collect();
            let weight = (at_cond.iter().sum::<f64>() - half_quadratic).exp();
            functionals.iter().map(|f| [f.evaluate(&shifted), f.evaluate(test) * weight]).collect()
        })
        .collect();

    functionals
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let direct: Vec<f64> = rows.iter().map(|r| r[i][0]).collect();
            let weighted: Vec<f64> = rows.iter().map(|r| r[i][1]).collect();
            Ok(ReweightingCheck {
                functional: f.clone(),
                direct: MonteCarloEstimate::from_samples(&direct)?,
                weighted: MonteCarloEstimate::from_samples(&weighted)?,
                difference: MonteCarloEstimate::paired_difference(&direct, &weighted)?,
            })
        })
        .collect()
}

/// Two estimates of the one-point Palm void probability of a rectangle `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoidProbabilityCheck {
    /// Fraction of simulated Palm patterns with no point in `K`.
    pub palm: MonteCarloEstimate,
    /// Mean of `ρ⁻¹ Λ(x) exp{−∫_K Λ}` over base field draws.
    pub weighted: MonteCarloEstimate,
    pub difference: MonteCarloEstimate,
}

/// Palm patterns and base field draws share their normals replication by
/// replication, so the paired difference has small variance.
pub fn mc_void_probability_check(
    model: &LgcpModel,
    x: [f64; 2],
    region: Window,
    window: Window,
    resolution: (usize, usize),
    replications: usize,
    seed: u64,
) -> Result<VoidProbabilityCheck> {
    check_replications(replications)?;
    let cond = PalmConditioning::single(x.to_vec())?;
    let palm = LgcpSimulator::palm(model, &cond, window, resolution)?;
    let (nx, ny) = resolution;
    let mut nodes = raster_centers(&window, nx, ny);
    let dx = window.width() / nx as f64;
    let dy = window.height() / ny as f64;
    let overlap: Vec<f64> = nodes
        .iter()
        .map(|c| {
            let ox = ((c[0] + dx / 2.0).min(region.x_max) - (c[0] - dx / 2.0).max(region.x_min)).max(0.0);
            let oy = ((c[1] + dy / 2.0).min(region.y_max) - (c[1] - dy / 2.0).max(region.y_min)).max(0.0);
            ox * oy
        })
        .collect();
    // x last, so the raster block of the factor matches the Palm sampler's
    nodes.push(x);
    let base = FieldSampler::for_model(model, &nodes)?;
    let log_rho = model.log_intensity();

    let rows: Vec<Result<[f64; 2]>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let pattern = palm.pattern(seed, rep)?;
            let void = if pattern.points().iter().any(|p| region.contains(*p)) { 0.0 } else { 1.0 };
            let y = base.sample(&mut substream(seed, rep, Purpose::Field));
            let integral: f64 = overlap.iter().zip(&y).map(|(a, yv)| a * yv.exp()).sum();
            Ok([void, (y[y.len() - 1] - log_rho - integral).exp()])
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let a: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let b: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    Ok(VoidProbabilityCheck {
        palm: MonteCarloEstimate::from_samples(&a)?,
        weighted: MonteCarloEstimate::from_samples(&b)?,
        difference: MonteCarloEstimate::paired_difference(&a, &b)?,
    })
}
