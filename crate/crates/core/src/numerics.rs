//! Dense factorizations used by the Laplace machinery and the field samplers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type DenseMatrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative diagonal jitter applied once when a covariance Cholesky fails.
pub const CHOLESKY_JITTER: f64 = 1e-10;

/// Lower-triangular `L` with positive diagonal and `L Lᵀ = A`.
#[derive(Debug, Clone)]
pub struct SymmetricFactorization {
    lower: DenseMatrix,
}

impl SymmetricFactorization {
    pub fn lower(&self) -> &DenseMatrix {
        &self.lower
    }

    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    /// `log |A| = 2 Σ log Lᵢᵢ`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.lower.diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// `L x` for a vector `x`.
    pub fn mul_lower(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for (j, xj) in x.iter().enumerate().take(i + 1) {
                s += self.lower[(i, j)] * xj;
            }
            *o = s;
        }
        out
    }
}

/// Cholesky factorization of a symmetric positive definite matrix.
///
/// Only the lower triangle of `a` is read.
pub fn cholesky(a: &DenseMatrix) -> Result<SymmetricFactorization> {
    let n = square_dim(a)?;
    check_finite(a)?;
    // row-major working copy so the inner products run over contiguous memory
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
            let dot: f64 = ri.iter().zip(rj).map(|(x, y)| x * y).sum();
            let s = a[(i, j)] - dot;
            if i == j {
                if !(s.is_finite() && s > 0.0) {
                    return Err(Error::Factorization { pivot: i });
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(SymmetricFactorization { lower: DenseMatrix::from_row_slice(n, n, &l) })
}

/// Cholesky with the covariance jitter policy: on failure add
/// `CHOLESKY_JITTER · scale` to the diagonal once and retry.
pub fn cholesky_with_jitter(a: &DenseMatrix, scale: f64) -> Result<SymmetricFactorization> {
    match cholesky(a) {
        Ok(f) => Ok(f),
        Err(Error::Factorization { .. }) if scale > 0.0 => {
            let mut shifted = a.clone();
            for i in 0..shifted.nrows() {
                shifted[(i, i)] += CHOLESKY_JITTER * scale;
            }
            cholesky(&shifted)
        }
        Err(e) => Err(e),
    }
}

/// Solve `A z = b` given `A = L Lᵀ`.
pub fn solve_spd(fact: &SymmetricFactorization, b: &[f64]) -> Result<Vec<f64>> {
    let n = fact.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let l = &fact.lower;
    let mut z = b.to_vec();
    for i in 0..n {
        let mut s = z[i];
        for j in 0..i {
            s -= l[(i, j)] * z[j];
        }
        z[i] = s / l[(i, i)];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for j in i + 1..n {
            s -= l[(j, i)] * z[j];
        }
        z[i] = s / l[(i, i)];
    }
    Ok(z)
}

/// `A⁻¹` from its Cholesky factor.
pub fn inverse_spd(fact: &SymmetricFactorization) -> DenseMatrix {
    let n = fact.dim();
    let mut inv = DenseMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        let col = solve_spd(fact, &e).expect("dimension matches by construction");
        inv.set_column(j, &Vector::from_vec(col));
    }
    inv
}

/// Householder `A = Q R`.
#[derive(Debug, Clone)]
pub struct OrthogonalTriangularFactorization {
    qr: nalgebra::linalg::QR<f64, nalgebra::Dyn, nalgebra::Dyn>,
    r: DenseMatrix,
}

impl OrthogonalTriangularFactorization {
    pub fn q(&self) -> DenseMatrix {
        self.qr.q()
    }

    pub fn r(&self) -> DenseMatrix {
        self.r.clone()
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    fn diagonal(&self) -> Vec<f64> {
        self.r.diagonal().iter().copied().collect()
    }
}

/// Rank threshold: `|Rᵢᵢ| ≤ n · ε · max |Rⱼⱼ|` counts as singular.
fn rank_threshold(diag: &[f64]) -> f64 {
    let max = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    diag.len() as f64 * f64::EPSILON * max
}

fn check_rank(diag: &[f64]) -> Result<()> {
    let tol = rank_threshold(diag);
    match diag.iter().position(|d| d.is_nan() || d.abs() <= tol) {
        Some(index) => Err(Error::Singular { index, value: diag[index] }),
        None => Ok(()),
    }
}

/// QR factorization of a square full-rank matrix.
pub fn qr(a: &DenseMatrix) -> Result<OrthogonalTriangularFactorization> {
    square_dim(a)?;
    check_finite(a)?;
    let qr = a.clone().qr();
    let r = qr.r();
    let fact = OrthogonalTriangularFactorization { qr, r };
    check_rank(&fact.diagonal())?;
    Ok(fact)
}

/// Solve `A z = b` from `A = Q R`.
pub fn solve_qr(fact: &OrthogonalTriangularFactorization, b: &[f64]) -> Result<Vec<f64>> {
    let n = fact.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut rhs = Vector::from_column_slice(b);
    fact.qr.q_tr_mul(&mut rhs);
    check_rank(&fact.diagonal())?;
    let r = &fact.r;
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= r[(i, j)] * rhs[j];
        }
        rhs[i] = s / r[(i, i)];
    }
    Ok(rhs.iter().copied().collect())
}

/// `log |det A| = Σ log |Rᵢᵢ|`.
pub fn log_abs_det_from_qr(fact: &OrthogonalTriangularFactorization) -> Result<f64> {
    let mut total = 0.0;
    for (index, d) in fact.diagonal().iter().enumerate() {
        if *d == 0.0 {
            return Err(Error::Singular { index, value: 0.0 });
        }
        total += d.abs().ln();
    }
    Ok(total)
}

/// Central differences `(f(y + s eᵢ) − f(y − s eᵢ)) / 2s`.
pub fn finite_difference_gradient<F>(mut f: F, y: &[f64], step: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    assert!(step > 0.0, "finite difference step must be positive");
    let mut work = y.to_vec();
    (0..y.len())
        .map(|i| {
            work[i] = y[i] + step;
            let up = f(&work);
            work[i] = y[i] - step;
            let down = f(&work);
            work[i] = y[i];
            (up - down) / (2.0 * step)
        })
        .collect()
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with Richardson
/// correction. `tolerance` is relative to the first three-point estimate
/// and is split evenly between halves on each refinement.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tolerance: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let abs_tol = tolerance * whole.abs().max(f64::MIN_POSITIVE);
    simpson_step(&f, a, b, fa, fm, fb, whole, abs_tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn square_dim(a: &DenseMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    if a.nrows() == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    Ok(a.nrows())
}

fn check_finite(a: &DenseMatrix) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Domain("matrix has non-finite entries".into()))
    }
}
