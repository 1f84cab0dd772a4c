//! The concave log-integrand `h` on the quadrature nodes and its Newton
//! maximization.
//!
//! For coefficients `aᵥ = wᵥ ℓᵥ` and an optional linear reward `b`,
//!
//! ```text
//! h(y) = bᵀy − Σᵥ aᵥ exp(yᵥ) − ½ (y − M)ᵀ Σ⁻¹ (y − M) − ½ log{(2π)ᵐ |Σ|}
//! ```
//!
//! `b = 0` gives the F/G integrands; `b = e_o` (the field value at the
//! origin as an extra coordinate with zero weight) gives the classical
//! nearest-neighbour representation.

use nalgebra::DMatrix;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{
    cholesky, cholesky_with_jitter, inverse_spd, log_abs_det_from_qr, qr, solve_qr, solve_spd,
    DenseMatrix, SymmetricFactorization,
};

pub const NEWTON_TOLERANCE: f64 = 1e-8;
pub const NEWTON_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone)]
pub struct LatentObjective {
    mean: Vec<f64>,
    covariance: DenseMatrix,
    /// `None` when `Σ ≡ 0`: the latent vector is then the constant `M`.
    factor: Option<SymmetricFactorization>,
    multipliers: Vec<f64>,
    weights: Vec<f64>,
    coefficients: Vec<f64>,
    linear: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResult {
    pub maximizer: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Log of the Laplace approximation of `∫ exp{h(y)} dy`, in the
    /// simplified stationary-point form.
    pub log_laplace: f64,
}

impl LatentObjective {
    /// `multipliers` are the `ℓᵥ ≥ 0`, `weights` the `wᵥ ≥ 0`.
    pub fn new(mean: Vec<f64>, covariance: DenseMatrix, multipliers: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let m = mean.len();
        if m == 0 {
            return Err(Error::Domain("objective needs at least one node".into()));
        }
        for len in [covariance.nrows(), covariance.ncols(), multipliers.len(), weights.len()] {
            if len != m {
                return Err(Error::DimensionMismatch { expected: m, got: len });
            }
        }
        if multipliers.iter().chain(&weights).any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::Domain("weights and multipliers must be finite and nonnegative".into()));
        }
        let scale = (0..m).fold(0.0f64, |s, i| s.max(covariance[(i, i)]));
        let mut covariance = covariance;
        let factor = if covariance.iter().all(|c| *c == 0.0) {
            None
        } else {
            let f = match cholesky(&covariance) {
                Ok(f) => f,
                Err(_) => {
                    let f = cholesky_with_jitter(&covariance, scale)?;
                    for i in 0..m {
                        covariance[(i, i)] += crate::numerics::CHOLESKY_JITTER * scale;
                    }
                    f
                }
            };
            Some(f)
        };
        let coefficients = weights.iter().zip(&multipliers).map(|(w, l)| w * l).collect();
        Ok(Self { mean, covariance, factor, multipliers, weights, coefficients, linear: vec![0.0; m] })
    }

    /// Adds the linear term `bᵀy` to `h`.
    pub fn with_linear_term(mut self, linear: Vec<f64>) -> Result<Self> {
        if linear.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: linear.len() });
        }
        self.linear = linear;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> &DenseMatrix {
        &self.covariance
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn is_degenerate(&self) -> bool {
        self.factor.is_none()
    }

    fn factor(&self) -> Result<&SymmetricFactorization> {
        self.factor.as_ref().ok_or(Error::DegenerateCovariance)
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: y.len() });
        }
        Ok(())
    }

    /// `d(y)ᵥ = wᵥ ℓᵥ exp(yᵥ)`.
    pub fn d(&self, y: &[f64]) -> Vec<f64> {
        self.coefficients.iter().zip(y).map(|(a, y)| a * y.exp()).collect()
    }

    /// `h(y)`.
    pub fn h(&self, y: &[f64]) -> Result<f64> {
        self.check_len(y)?;
        let factor = self.factor()?;
        let x: Vec<f64> = y.iter().zip(&self.mean).map(|(y, m)| y - m).collect();
        let sinv_x = solve_spd(factor, &x)?;
        let quad: f64 = x.iter().zip(&sinv_x).map(|(a, b)| a * b).sum();
        let m = self.dim() as f64;
        Ok(dot(&self.linear, y) - self.d(y).iter().sum::<f64>()
            - 0.5 * quad
            - 0.5 * (m * (2.0 * PI).ln() + factor.log_det()))
    }

    /// `∇h(y) = b − d(y) − Σ⁻¹(y − M)`.
    pub fn grad_h(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        let x: Vec<f64> = y.iter().zip(&self.mean).map(|(y, m)| y - m).collect();
        self.gradient_at_deviation(y, &x)
    }

    fn gradient_at_deviation(&self, y: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        let sinv_x = solve_spd(self.factor()?, x)?;
        Ok(self
            .linear
            .iter()
            .zip(self.d(y))
            .zip(sinv_x)
            .map(|((b, d), s)| b - d - s)
            .collect())
    }

    /// `D(y)Σ + I`.
    fn tilted_system(&self, d: &[f64]) -> DenseMatrix {
        let m = self.dim();
        DMatrix::from_fn(m, m, |i, j| d[i] * self.covariance[(i, j)] + if i == j { 1.0 } else { 0.0 })
    }

    /// Newton–Raphson from `y = M`. Each step solves `(D(y)Σ + I) z̃ = ∇h`
    /// by QR and moves by `Σ z̃`, which equals `H(y)⁻¹ ∇h(y)`.
    pub fn newton_maximize(&self) -> Result<NewtonResult> {
        self.newton_maximize_from(&self.mean.clone())
    }

    /// Newton–Raphson from an arbitrary starting point.
    pub fn newton_maximize_from(&self, start: &[f64]) -> Result<NewtonResult> {
        self.check_len(start)?;
        if self.factor.is_none() {
            let y = self.mean.clone();
            let log_laplace = dot(&self.linear, &y) - self.d(&y).iter().sum::<f64>();
            return Ok(NewtonResult { maximizer: y, iterations: 0, gradient_norm: 0.0, log_laplace });
        }
        // iterate on the deviation x = y − M so Σ⁻¹x never sees cancellation in y − M
        let mut x: Vec<f64> = start.iter().zip(&self.mean).map(|(s, m)| s - m).collect();
        let mut y = start.to_vec();
        for iteration in 0..=NEWTON_MAX_ITERATIONS {
            let grad = self.gradient_at_deviation(&y, &x)?;
            let gradient_norm = max_abs(&grad);
            if gradient_norm <= NEWTON_TOLERANCE {
                // one polishing step takes the quadratic convergence to round-off level
                let (xp, yp) = self.newton_step(&x, &y, &grad)?;
                let polished = max_abs(&self.gradient_at_deviation(&yp, &xp)?);
                let (x, y, gradient_norm, iterations) = if polished <= gradient_norm {
                    (xp, yp, polished, iteration + 1)
                } else {
                    (x, y, gradient_norm, iteration)
                };
                let log_laplace = self.simplified_log_laplace(&y, &x)?;
                return Ok(NewtonResult { maximizer: y, iterations, gradient_norm, log_laplace });
            }
            if iteration == NEWTON_MAX_ITERATIONS || !gradient_norm.is_finite() {
                return Err(Error::NonConvergence { iterations: iteration, gradient_norm });
            }
            (x, y) = self.newton_step(&x, &y, &grad)?;
        }
        unreachable!("loop returns on the final iteration")
    }

    fn newton_step(&self, x: &[f64], y: &[f64], grad: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let system = self.tilted_system(&self.d(y));
        let z = solve_qr(&qr(&system)?, grad)?;
        let step = &self.covariance * nalgebra::DVector::from_vec(z);
        let x: Vec<f64> = x.iter().zip(step.iter()).map(|(x, s)| x + s).collect();
        let y = x.iter().zip(&self.mean).map(|(x, m)| m + x).collect();
        Ok((x, y))
    }

    /// `bᵀŷ − Σ aᵥ e^{ŷᵥ} − ½ (ŷ − M)ᵀ {b − d(ŷ)} − ½ log|D(ŷ)Σ + I|`.
    fn simplified_log_laplace(&self, y: &[f64], x: &[f64]) -> Result<f64> {
        let d = self.d(y);
        let log_det = log_abs_det_from_qr(&qr(&self.tilted_system(&d))?)?;
        let cross: f64 = x.iter().zip(&self.linear).zip(&d).map(|((x, b), d)| x * (b - d)).sum();
        Ok(dot(&self.linear, y) - d.iter().sum::<f64>() - 0.5 * cross - 0.5 * log_det)
    }

    /// The textbook Laplace value `h(ŷ) + (m/2) log 2π − ½ log|H(ŷ)|` with
    /// `H = D + Σ⁻¹` formed explicitly. Shares no algebra with
    /// [`NewtonResult::log_laplace`] beyond `h`'s definition.
    pub fn generic_log_laplace(&self, y_hat: &[f64]) -> Result<f64> {
        if self.factor.is_none() {
            self.check_len(y_hat)?;
            return Ok(dot(&self.linear, y_hat) - self.d(y_hat).iter().sum::<f64>());
        }
        let h = self.h(y_hat)?;
        let mut hessian = inverse_spd(self.factor()?);
        for (i, d) in self.d(y_hat).into_iter().enumerate() {
            hessian[(i, i)] += d;
        }
        // symmetrize away round-off of the explicit inverse
        let hessian = (&hessian + hessian.transpose()) * 0.5;
        let log_det_h = cholesky(&hessian)?.log_det();
        Ok(h + 0.5 * self.dim() as f64 * (2.0 * PI).ln() - 0.5 * log_det_h)
    }
}

/// Log of the Laplace approximation of `∫ exp{h(y)} dy` at the Newton maximizer.
pub fn log_one_minus_summary(obj: &LatentObjective) -> Result<f64> {
    Ok(obj.newton_maximize()?.log_laplace)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
