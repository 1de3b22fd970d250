//! Posterior sampling for the coastal kriging models.
//!
//! Two routes are provided:
//!
//! * [`run_mcmc`]: Metropolis-within-Gibbs on the collapsed posterior where the
//!   latent field is integrated out. Coefficients get an exact Gibbs draw;
//!   `log sigma2`, `log tau2` and a logit-rescaled decay get adaptive
//!   random-walk Metropolis updates.
//! * [`run_conjugate`]: exact draws when the decay and the noise-to-signal
//!   ratio `tau2 / sigma2` are fixed.
//!
//! [`sample_omega`] recovers the latent field afterwards by composition
//! sampling.

mod collapsed;
mod conjugate;
mod diagnostics;
mod mcmc;
mod omega;
mod priors;

pub use collapsed::{
    log_posterior_collapsed, CollapsedLikelihood, GaussianLikelihood, PriorOnly,
};
pub use conjugate::{conjugate_posterior, run_conjugate, ConjugateConfig, ConjugatePosterior};
pub use diagnostics::{effective_sample_size, monte_carlo_se};
pub use mcmc::{initial_values, run_chain, run_mcmc, McmcConfig};
pub use omega::sample_omega;
pub use priors::{BetaPrior, InverseGamma, Priors, UniformPrior};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::covkernel::{DistanceMode, KernelParams};

/// One point in parameter space: coefficients plus covariance parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub beta: DVector<f64>,
    pub sigma2: f64,
    pub tau2: f64,
    pub phi: f64,
}

impl ModelParams {
    pub fn kernel(&self) -> KernelParams {
        KernelParams {
            sigma2: self.sigma2,
            phi: self.phi,
            tau2: self.tau2,
        }
    }
}

/// Retained posterior draws of one fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub model: String,
    pub mode: DistanceMode,
    pub draws: Vec<ModelParams>,
    /// Latent field per draw, once [`sample_omega`] has run.
    pub omega: Option<Vec<DVector<f64>>>,
    /// Post-burn-in Metropolis acceptance rates for (sigma2, tau2, phi);
    /// `None` for exact samplers.
    pub acceptance: Option<[f64; 3]>,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn n_coefficients(&self) -> usize {
        self.draws.first().map_or(0, |d| d.beta.len())
    }

    /// Component-wise posterior mean.
    pub fn mean(&self) -> Option<ModelParams> {
        let first = self.draws.first()?;
        let m = self.draws.len() as f64;
        let mut beta = DVector::zeros(first.beta.len());
        let (mut s, mut t, mut f) = (0.0, 0.0, 0.0);
        for d in &self.draws {
            beta += &d.beta;
            s += d.sigma2;
            t += d.tau2;
            f += d.phi;
        }
        Some(ModelParams {
            beta: beta / m,
            sigma2: s / m,
            tau2: t / m,
            phi: f / m,
        })
    }

    /// Values of one named parameter (`beta_<k>`, `sigma2`, `tau2`, `phi`)
    /// across draws.
    pub fn series(&self, name: &str) -> Option<Vec<f64>> {
        let pick: Box<dyn Fn(&ModelParams) -> f64> = match name {
            "sigma2" => Box::new(|d| d.sigma2),
            "tau2" => Box::new(|d| d.tau2),
            "phi" => Box::new(|d| d.phi),
            other => {
                let k: usize = other.strip_prefix("beta_")?.parse().ok()?;
                if k >= self.n_coefficients() {
                    return None;
                }
                Box::new(move |d| d.beta[k])
            }
        };
        Some(self.draws.iter().map(pick).collect())
    }

    /// Parameter names in column order.
    pub fn parameter_names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.n_coefficients()).map(|k| format!("beta_{k}")).collect();
        names.extend(["sigma2", "tau2", "phi"].map(String::from));
        names
    }
}

/// Independent random stream `stream` derived from `seed`.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Child seed for sub-task `tag` of a run seeded with `seed` (SplitMix64
/// finalizer, so nearby inputs give unrelated outputs).
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
