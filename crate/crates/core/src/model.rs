//! Named model configurations: distance, design, priors and fitting route.

use crate::covkernel::DistanceMode;
use crate::data::{Dataset, Design};
use crate::error::{Error, Result};
use crate::inference::{run_conjugate, run_mcmc, ConjugateConfig, McmcConfig, PosteriorDraws, Priors};
use crate::modelcomp::{empirical_variogram, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC};

/// Chain-length divisor for the per-fold fits of cross-validation.
pub const CV_CHAIN_FACTOR: usize = 10;

/// How the posterior is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum FitMethod {
    /// Full hierarchical model, decay and both variances sampled.
    Mcmc(McmcConfig),
    /// Conjugate model with decay and noise-to-signal ratio fixed.
    Conjugate { phi: f64, alpha: f64, n_draws: usize },
    /// Conjugate model whose fixed values are estimated from the empirical
    /// variogram of the data it is fitted to.
    ConjugateVariogram { n_draws: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub mode: DistanceMode,
    pub design: Design,
    pub priors: Priors,
    pub method: FitMethod,
}

/// Fixed `(phi, alpha)` for the conjugate model from the empirical variogram.
pub fn variogram_hyperparameters(data: &Dataset, mode: DistanceMode) -> Result<(f64, f64)> {
    let v = empirical_variogram(data, mode, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC)?;
    let total = v.sigma2_hat + v.tau2_hat;
    if !(total > 0.0) {
        return Err(Error::InsufficientData(
            "empirical variogram is identically zero".into(),
        ));
    }
    let alpha = v.tau2_hat / v.sigma2_hat.max(1e-6 * total);
    Ok((v.phi_hat, alpha))
}

/// [`variogram_hyperparameters`], or when the data cannot support a variogram
/// fit, a practical range of half the largest distance and equal signal and
/// noise.
pub fn conjugate_hyperparameters(data: &Dataset, mode: DistanceMode) -> (f64, f64) {
    variogram_hyperparameters(data, mode).unwrap_or_else(|e| {
        log::warn!("variogram fit failed ({e}); using fallback conjugate hyperparameters");
        let max_d = data.distances(mode).max();
        (if max_d > 0.0 { 6.0 / max_d } else { 1.0 }, 1.0)
    })
}

impl ModelSpec {
    pub fn mcmc(name: &str, mode: DistanceMode, design: Design, cfg: McmcConfig) -> Self {
        Self {
            name: name.into(),
            mode,
            design,
            priors: Priors::default(),
            method: FitMethod::Mcmc(cfg),
        }
    }

    pub fn conjugate(name: &str, mode: DistanceMode, design: Design, phi: f64, alpha: f64, n_draws: usize) -> Self {
        Self {
            name: name.into(),
            mode,
            design,
            priors: Priors::default(),
            method: FitMethod::Conjugate { phi, alpha, n_draws },
        }
    }

    /// Resolves [`FitMethod::ConjugateVariogram`] against `data`, see
    /// [`conjugate_hyperparameters`].
    pub fn with_fixed_hyperparameters(&self, data: &Dataset) -> Result<Self> {
        match self.method {
            FitMethod::ConjugateVariogram { n_draws } => {
                let (phi, alpha) = conjugate_hyperparameters(&self.prepare(data)?, self.mode);
                Ok(Self {
                    method: FitMethod::Conjugate { phi, alpha, n_draws },
                    ..self.clone()
                })
            }
            _ => Ok(self.clone()),
        }
    }

    /// `data` with this model's design.
    pub fn prepare(&self, data: &Dataset) -> Result<Dataset> {
        if data.design == self.design {
            Ok(data.clone())
        } else {
            data.with_design(self.design.clone())
        }
    }

    /// Variant used inside cross-validation: chains shortened ten-fold.
    pub fn for_cross_validation(&self) -> Self {
        match &self.method {
            FitMethod::Mcmc(cfg) => Self {
                method: FitMethod::Mcmc(cfg.shortened(CV_CHAIN_FACTOR)),
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    pub fn fit(&self, data: &Dataset, seed: u64) -> Result<PosteriorDraws> {
        let data = self.prepare(data)?;
        let mut draws = match &self.method {
            FitMethod::Mcmc(cfg) => {
                let cfg = McmcConfig {
                    rng_seed: seed,
                    ..cfg.clone()
                };
                run_mcmc(&data, &self.priors, &cfg, self.mode)?
            }
            FitMethod::Conjugate { phi, alpha, n_draws } => {
                let cfg = ConjugateConfig {
                    phi_fixed: *phi,
                    alpha_fixed: *alpha,
                    n_draws: *n_draws,
                    rng_seed: seed,
                };
                run_conjugate(&data, &cfg, &self.priors, self.mode)?
            }
            FitMethod::ConjugateVariogram { .. } => {
                return self.with_fixed_hyperparameters(&data)?.fit(&data, seed);
            }
        };
        draws.model = self.name.clone();
        Ok(draws)
    }

    /// Whether decay is sampled (`false` for the conjugate routes).
    pub fn samples_phi(&self) -> bool {
        matches!(self.method, FitMethod::Mcmc(_))
    }
}
