//! Exponential covariance kernel and Gaussian likelihood shared by all models.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Relative diagonal jitter applied once when a nugget-free covariance fails
/// to factor.
const JITTER: f64 = 1e-10;

/// Which distance enters the covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceMode {
    /// Along-curve distance `|t - t'|`.
    Curve,
    /// Planar distance `||s - s'||`.
    Euclidean,
}

impl DistanceMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceMode::Curve => "curve",
            DistanceMode::Euclidean => "euclidean",
        }
    }
}

impl std::str::FromStr for DistanceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curve" => Ok(DistanceMode::Curve),
            "euclidean" => Ok(DistanceMode::Euclidean),
            other => Err(Error::InvalidParameter(format!(
                "unknown distance mode '{other}'"
            ))),
        }
    }
}

/// Partial sill, decay and nugget of the exponential covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub sigma2: f64,
    pub phi: f64,
    pub tau2: f64,
}

impl KernelParams {
    pub fn new(sigma2: f64, phi: f64, tau2: f64) -> Result<Self> {
        let p = Self { sigma2, phi, tau2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be > 0, got {}",
                self.sigma2
            )));
        }
        if !(self.phi > 0.0) || self.phi.is_nan() {
            return Err(Error::InvalidParameter(format!(
                "phi must be > 0, got {}",
                self.phi
            )));
        }
        if !(self.tau2 >= 0.0 && self.tau2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tau2 must be >= 0, got {}",
                self.tau2
            )));
        }
        Ok(())
    }

    /// `sigma2 * exp(-phi * d)`; the nugget is never included.
    #[inline]
    pub fn kernel_value(&self, d: f64) -> f64 {
        kernel_value(self, d)
    }
}

/// Exponential covariance `sigma2 * exp(-phi * d)` without the nugget.
#[inline]
pub fn kernel_value(params: &KernelParams, d: f64) -> f64 {
    params.sigma2 * (-params.phi * d).exp()
}

/// A symmetric positive definite covariance with its Cholesky factor.
#[derive(Debug, Clone)]
pub struct CovMatrix {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
    logdet: f64,
}

impl CovMatrix {
    /// Factors an explicit SPD matrix.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let chol = Cholesky::new(matrix.clone())
            .ok_or(Error::NotPositiveDefinite("cholesky failed"))?;
        let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        if !logdet.is_finite() {
            return Err(Error::NotPositiveDefinite("non-finite log-determinant"));
        }
        Ok(Self {
            matrix,
            chol,
            logdet,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    /// Lower-triangular factor `L` with `L L^T = K`.
    pub fn lower(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(b)
    }

    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }

    /// `L^{-1} b`.
    pub fn whiten(&self, b: &DVector<f64>) -> DVector<f64> {
        self.chol
            .l_dirty()
            .solve_lower_triangular(b)
            .expect("cholesky factor has a positive diagonal")
    }

    /// `b^T K^{-1} b`.
    pub fn quad_form(&self, b: &DVector<f64>) -> f64 {
        self.whiten(b).norm_squared()
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.chol.inverse()
    }
}

/// Covariance matrix `K[i][j] = kernel(D[i][j]) + [i == j] * tau2` (nugget
/// only when `include_nugget`).
///
/// A nugget-free matrix that fails to factor (duplicated locations) is
/// retried once with `1e-10 * sigma2` on the diagonal.
pub fn build_cov(
    params: &KernelParams,
    distances: &DMatrix<f64>,
    include_nugget: bool,
) -> Result<CovMatrix> {
    params.validate()?;
    let n = distances.nrows();
    if distances.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: distances.ncols(),
        });
    }
    let nugget = if include_nugget { params.tau2 } else { 0.0 };
    let mut k = distances.map(|d| kernel_value(params, d));
    for i in 0..n {
        k[(i, i)] += nugget;
    }
    match CovMatrix::from_matrix(k.clone()) {
        Ok(c) => Ok(c),
        Err(e) if nugget > 0.0 => Err(e),
        Err(_) => {
            log::warn!("covariance not positive definite without nugget; adding jitter");
            for i in 0..n {
                k[(i, i)] += JITTER * params.sigma2;
            }
            CovMatrix::from_matrix(k)
        }
    }
}

/// Factor of the correlation matrix `R(phi) + alpha I`, `alpha = tau2 /
/// sigma2`, kept across successive parameter draws that share the decay and
/// the noise ratio (as every draw of the conjugate model does). The full
/// covariance is `sigma2` times this matrix.
#[derive(Debug, Clone)]
pub struct CorrelationCache {
    distances: DMatrix<f64>,
    current: Option<(f64, f64, CovMatrix)>,
}

impl CorrelationCache {
    pub fn new(distances: DMatrix<f64>) -> Self {
        Self {
            distances,
            current: None,
        }
    }

    pub fn distances(&self) -> &DMatrix<f64> {
        &self.distances
    }

    /// Factor for `params`, refactoring only when `phi` or `alpha` changed
    /// (alpha compared to a relative 1e-12).
    pub fn factor(&mut self, params: &KernelParams) -> Result<&CovMatrix> {
        params.validate()?;
        let alpha = params.tau2 / params.sigma2;
        let reuse = matches!(&self.current, Some((phi, a, _))
            if *phi == params.phi && (a - alpha).abs() <= 1e-12 * a.max(alpha));
        if !reuse {
            let unit = KernelParams {
                sigma2: 1.0,
                phi: params.phi,
                tau2: alpha,
            };
            self.current = Some((params.phi, alpha, build_cov(&unit, &self.distances, true)?));
        }
        Ok(&self.current.as_ref().expect("factor just set").2)
    }
}

/// Log-density of `N(mean, cov)` at `y`.
pub fn mvn_logpdf(y: &DVector<f64>, mean: &DVector<f64>, cov: &CovMatrix) -> Result<f64> {
    let n = cov.dim();
    for len in [y.len(), mean.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    let r = y - mean;
    Ok(-0.5 * (n as f64 * (2.0 * PI).ln() + cov.logdet() + cov.quad_form(&r)))
}
