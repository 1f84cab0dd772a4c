//! LGCP and Palm pattern simulation on a raster, and the thinning coupling.
//!
//! The driving intensity is taken constant on each raster cell (its value at
//! the cell centre). Given the field, each cell receives a Poisson number of
//! points placed uniformly in the cell.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::field::{raster_centers, FieldGrid, FieldSampler};
use super::rng::{substream, Purpose};
use crate::error::{domain, Result};
use crate::model::{LgcpModel, PalmConditioning};
use crate::pattern::{PointPattern, Window};

/// Cached raster sampler for repeated replications of one model.
#[derive(Debug, Clone)]
pub struct LgcpSimulator {
    window: Window,
    nx: usize,
    ny: usize,
    sampler: FieldSampler,
}

impl LgcpSimulator {
    pub fn new(model: &LgcpModel, window: Window, resolution: (usize, usize)) -> Result<Self> {
        let (nx, ny) = check_resolution(resolution)?;
        let sampler = FieldSampler::for_model(model, &raster_centers(&window, nx, ny))?;
        Ok(Self { window, nx, ny, sampler })
    }

    /// Sampler for the reduced Palm process: same covariance, mean shifted
    /// by `Σᵢ c̃(‖v − xᵢ‖)`.
    pub fn palm(model: &LgcpModel, cond: &PalmConditioning, window: Window, resolution: (usize, usize)) -> Result<Self> {
        let (nx, ny) = check_resolution(resolution)?;
        let sampler = FieldSampler::for_palm(model, cond, &raster_centers(&window, nx, ny))?;
        Ok(Self { window, nx, ny, sampler })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn sampler(&self) -> &FieldSampler {
        &self.sampler
    }

    pub fn field(&self, seed: u64, replication: u64) -> Result<FieldGrid> {
        let y = self.sampler.sample(&mut substream(seed, replication, Purpose::Field));
        FieldGrid::new(self.window, self.nx, self.ny, y)
    }

    pub fn pattern(&self, seed: u64, replication: u64) -> Result<PointPattern> {
        let field = self.field(seed, replication)?;
        self.pattern_from_field(&field, seed, replication)
    }

    /// Poisson points given a field draw, using the count and placement
    /// substreams of `(seed, replication)`.
    pub fn pattern_from_field(&self, field: &FieldGrid, seed: u64, replication: u64) -> Result<PointPattern> {
        if field.resolution() != (self.nx, self.ny) || field.window() != &self.window {
            return domain("field raster does not match the simulator raster");
        }
        let mut counts = substream(seed, replication, Purpose::Counts);
        let mut placement = substream(seed, replication, Purpose::Placement);
        let w = &self.window;
        let dx = w.width() / self.nx as f64;
        let dy = w.height() / self.ny as f64;
        let area = dx * dy;
        let mut points = Vec::new();
        for j in 0..self.ny {
            for i in 0..self.nx {
                let mean = field.value(i, j).exp() * area;
                let n = poisson_count(mean, &mut counts)?;
                let (x0, y0) = (w.x_min + i as f64 * dx, w.y_min + j as f64 * dy);
                for _ in 0..n {
                    let u: f64 = placement.random();
                    let v: f64 = placement.random();
                    points.push([(x0 + u * dx).min(w.x_max), (y0 + v * dy).min(w.y_max)]);
                }
            }
        }
        Ok(PointPattern::new(points, self.window)?
            .with_metadata("seed", seed.to_string())
            .with_metadata("replication", replication.to_string()))
    }
}

fn check_resolution(resolution: (usize, usize)) -> Result<(usize, usize)> {
    if resolution.0 == 0 || resolution.1 == 0 {
        return domain(format!("raster resolution must be at least 1 per axis, got {resolution:?}"));
    }
    Ok(resolution)
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if mean == 0.0 {
        return Ok(0);
    }
    match Poisson::new(mean) {
        Ok(p) => Ok(p.sample(rng) as u64),
        Err(e) => domain(format!("cell mean {mean} is not a valid Poisson mean: {e}")),
    }
}

/// One field draw on the raster centres.
pub fn simulate_grf(model: &LgcpModel, window: Window, resolution: (usize, usize), seed: u64) -> Result<FieldGrid> {
    LgcpSimulator::new(model, window, resolution)?.field(seed, 0)
}

pub fn simulate_lgcp(model: &LgcpModel, window: Window, resolution: (usize, usize), seed: u64) -> Result<PointPattern> {
    LgcpSimulator::new(model, window, resolution)?.pattern(seed, 0)
}

/// Reduced Palm pattern `X^!_{x₁..xₙ}` (the conditioning points are not included).
pub fn simulate_palm(
    model: &LgcpModel,
    cond: &PalmConditioning,
    window: Window,
    resolution: (usize, usize),
    seed: u64,
) -> Result<PointPattern> {
    LgcpSimulator::palm(model, cond, window, resolution)?.pattern(seed, 0)
}

/// Keeps each point independently with probability `exp(−Σᵢ c̃(‖x − xᵢ‖))`.
pub fn thin_palm_to_base(pattern: &PointPattern, model: &LgcpModel, cond: &PalmConditioning, seed: u64) -> Result<PointPattern> {
    thin_palm_to_base_with(pattern, model, cond, &mut substream(seed, 0, Purpose::Thinning))
}

pub fn thin_palm_to_base_with<R: Rng + ?Sized>(
    pattern: &PointPattern,
    model: &LgcpModel,
    cond: &PalmConditioning,
    rng: &mut R,
) -> Result<PointPattern> {
    if !model.covariance().is_nonnegative() {
        return domain("the thinning coupling needs a nonnegative covariance function");
    }
    if cond.points().iter().any(|x| x.len() != 2) {
        return domain("conditioning points must be planar");
    }
    let cov = model.covariance();
    let mut kept = Vec::with_capacity(pattern.len());
    for p in pattern.points() {
        let keep = (-cond.covariance_sum(cov, p)).exp();
        // always draw so the stream position does not depend on the model
        let u: f64 = rng.random();
        if u < keep {
            kept.push(*p);
        }
    }
    let mut out = PointPattern::new(kept, *pattern.window())?;
    out.metadata = pattern.metadata.clone();
    Ok(out)
}
