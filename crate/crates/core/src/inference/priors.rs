use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use crate::covkernel::CovMatrix;
use crate::error::{Error, Result};

/// Inverse-gamma distribution with density
/// `b^a / Gamma(a) * x^{-(a+1)} * exp(-b / x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGamma {
    pub shape: f64,
    pub scale: f64,
}

impl InverseGamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "inverse-gamma shape and scale must be > 0, got ({shape}, {scale})"
            )));
        }
        Ok(Self { shape, scale })
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || !x.is_finite() {
            return f64::NEG_INFINITY;
        }
        self.shape * self.scale.ln() - ln_gamma(self.shape) - (self.shape + 1.0) * x.ln()
            - self.scale / x
    }

    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.scale / (self.shape - 1.0))
    }

    pub fn mode(&self) -> f64 {
        self.scale / (self.shape + 1.0)
    }
}

/// Uniform distribution on the open interval `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformPrior {
    pub lower: f64,
    pub upper: f64,
}

impl UniformPrior {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && upper > lower && upper.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "uniform prior on phi needs 0 < lower < upper, got ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if self.contains(x) {
            -(self.upper - self.lower).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Prior on the regression coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum BetaPrior {
    /// Improper flat prior (zero prior precision).
    Flat,
    /// `N(mean, cov)`. In the conjugate model the covariance is scaled by
    /// `sigma2`.
    Normal {
        mean: DVector<f64>,
        cov: DMatrix<f64>,
    },
}

impl BetaPrior {
    /// Prior precision and precision-times-mean, or `None` for the flat prior.
    pub(crate) fn precision(&self, p: usize) -> Result<Option<(DMatrix<f64>, DVector<f64>)>> {
        match self {
            BetaPrior::Flat => Ok(None),
            BetaPrior::Normal { mean, cov } => {
                if mean.len() != p || cov.nrows() != p {
                    return Err(Error::DimensionMismatch {
                        expected: p,
                        found: mean.len(),
                    });
                }
                let c = CovMatrix::from_matrix(cov.clone())?;
                let prec = c.inverse();
                let pm = &prec * mean;
                Ok(Some((prec, pm)))
            }
        }
    }

    pub fn ln_pdf(&self, beta: &DVector<f64>) -> Result<f64> {
        match self {
            BetaPrior::Flat => Ok(0.0),
            BetaPrior::Normal { mean, cov } => {
                let c = CovMatrix::from_matrix(cov.clone())?;
                crate::covkernel::mvn_logpdf(beta, mean, &c)
            }
        }
    }
}

/// Prior configuration shared by the hierarchical and conjugate models.
#[derive(Debug, Clone, PartialEq)]
pub struct Priors {
    pub phi: UniformPrior,
    pub tau2: InverseGamma,
    pub sigma2: InverseGamma,
    pub beta: BetaPrior,
}

impl Default for Priors {
    /// IG(2, 2) on both variances, U(0.8, 30) on the decay and a flat prior
    /// on the coefficients.
    fn default() -> Self {
        Self {
            phi: UniformPrior {
                lower: 0.8,
                upper: 30.0,
            },
            tau2: InverseGamma {
                shape: 2.0,
                scale: 2.0,
            },
            sigma2: InverseGamma {
                shape: 2.0,
                scale: 2.0,
            },
            beta: BetaPrior::Flat,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverse_gamma_density() {
        let ig = InverseGamma::new(2.0, 2.0).unwrap();
        // 4 * x^-3 * exp(-2/x) at x = 1
        assert_relative_eq!(ig.ln_pdf(1.0), 4f64.ln() - 2.0, epsilon = 1e-14);
        assert_eq!(ig.ln_pdf(0.0), f64::NEG_INFINITY);
        assert_eq!(ig.mean(), Some(2.0));
    }

    #[test]
    fn uniform_support_is_open() {
        let u = UniformPrior::new(0.8, 30.0).unwrap();
        assert_eq!(u.ln_pdf(0.8), f64::NEG_INFINITY);
        assert_eq!(u.ln_pdf(31.0), f64::NEG_INFINITY);
        assert_relative_eq!(u.ln_pdf(1.0), -(29.2f64).ln());
        assert!(UniformPrior::new(2.0, 1.0).is_err());
        assert!(UniformPrior::new(0.0, 1.0).is_err());
    }
}
