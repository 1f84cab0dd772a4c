//! Gaussian field draws on finite node sets.

use rand::Rng;
use rand_distr::StandardNormal;
use std::fmt::Write as _;

use crate::curve::format_number;
use crate::error::{domain, Error, Result};
use crate::laplace::covariance_matrix;
use crate::model::{LgcpModel, PalmConditioning};
use crate::numerics::{cholesky_with_jitter, DenseMatrix};
use crate::pattern::Window;

/// Largest node count a dense field sampler accepts.
pub const MAX_FIELD_NODES: usize = 4096;

/// Draws `N(M, Σ)` as `M + L z` with a cached Cholesky factor `L`.
///
/// A covariance that is identically zero gives the constant draw `M`
/// without touching the generator.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    mean: Vec<f64>,
    /// Packed row-major lower triangle; `None` for a zero covariance.
    lower: Option<Vec<f64>>,
}

impl FieldSampler {
    pub fn new(mean: Vec<f64>, covariance: &DenseMatrix) -> Result<Self> {
        let n = mean.len();
        if n > MAX_FIELD_NODES {
            return Err(Error::GridTooLarge { nodes: n, limit: MAX_FIELD_NODES });
        }
        if covariance.nrows() != n || covariance.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: covariance.nrows() });
        }
        if covariance.iter().all(|c| *c == 0.0) {
            return Ok(Self { mean, lower: None });
        }
        let scale = (0..n).fold(0.0f64, |s, i| s.max(covariance[(i, i)]));
        let fact = cholesky_with_jitter(covariance, scale)?;
        let l = fact.lower();
        let mut packed = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in 0..=i {
                packed.push(l[(i, j)]);
            }
        }
        Ok(Self { mean, lower: Some(packed) })
    }

    /// `Y` at `nodes` for the stationary model.
    pub fn for_model(model: &LgcpModel, nodes: &[[f64; 2]]) -> Result<Self> {
        check_nodes(model, nodes)?;
        Self::new(vec![model.mean_level(); nodes.len()], &covariance_matrix(model, nodes))
    }

    /// `Y` at `nodes` under the Palm mean `μ + Σᵢ c̃(‖v − xᵢ‖)`.
    pub fn for_palm(model: &LgcpModel, cond: &PalmConditioning, nodes: &[[f64; 2]]) -> Result<Self> {
        check_nodes(model, nodes)?;
        let mean = nodes.iter().map(|v| model.palm_mean_function(cond, v)).collect::<Result<_>>()?;
        Self::new(mean, &covariance_matrix(model, nodes))
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower.is_none()
    }

    /// Same factor, different mean vector.
    pub fn with_mean(&self, mean: Vec<f64>) -> Result<Self> {
        if mean.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: mean.len() });
        }
        Ok(Self { mean, lower: self.lower.clone() })
    }

    /// The mean-zero part `L z` of one draw; used when the same normals
    /// feed several mean vectors.
    pub fn sample_centered<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.len();
        let Some(l) = &self.lower else {
            return vec![0.0; n];
        };
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut out = vec![0.0; n];
        let mut row = 0;
        for (i, o) in out.iter_mut().enumerate() {
            let li = &l[row..row + i + 1];
            *o = li.iter().zip(&z).map(|(a, b)| a * b).sum();
            row += i + 1;
        }
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut y = self.sample_centered(rng);
        y.iter_mut().zip(&self.mean).for_each(|(y, m)| *y += m);
        y
    }
}

fn check_nodes(model: &LgcpModel, nodes: &[[f64; 2]]) -> Result<()> {
    if model.dimension() != 2 {
        return domain(format!("field sampling needs d = 2, model has d = {}", model.dimension()));
    }
    if nodes.len() > MAX_FIELD_NODES {
        return Err(Error::GridTooLarge { nodes: nodes.len(), limit: MAX_FIELD_NODES });
    }
    Ok(())
}

/// Field values at the centres of an `nx × ny` raster over a window.
/// Value `(i, j)` sits at column `i` (x) and row `j` (y), stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    window: Window,
    nx: usize,
    ny: usize,
    values: Vec<f64>,
}

impl FieldGrid {
    pub fn new(window: Window, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return domain(format!("raster resolution must be at least 1 per axis, got {nx}x{ny}"));
        }
        if values.len() != nx * ny {
            return Err(Error::DimensionMismatch { expected: nx * ny, got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return domain(format!("field value {v} is not finite"));
        }
        Ok(Self { window, nx, ny, values })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn resolution(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn cell_area(&self) -> f64 {
        self.window.area() / (self.nx * self.ny) as f64
    }

    pub fn centers(&self) -> Vec<[f64; 2]> {
        raster_centers(&self.window, self.nx, self.ny)
    }

    /// Dense raster: comment lines for window and resolution, then `ny`
    /// rows of `nx` comma separated values, lowest `y` first.
    pub fn to_csv(&self, metadata: &[(String, String)]) -> String {
        let w = &self.window;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# window: {},{},{},{}",
            format_number(w.x_min),
            format_number(w.x_max),
            format_number(w.y_min),
            format_number(w.y_max)
        );
        let _ = writeln!(out, "# resolution: {},{}", self.nx, self.ny);
        for (k, v) in metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for row in self.values.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// Cell centres of an `nx × ny` raster, row by row.
pub fn raster_centers(window: &Window, nx: usize, ny: usize) -> Vec<[f64; 2]> {
    let dx = window.width() / nx as f64;
    let dy = window.height() / ny as f64;
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            out.push([window.x_min + (i as f64 + 0.5) * dx, window.y_min + (j as f64 + 0.5) * dy]);
        }
    }
    out
}
