use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::collapsed::{CollapsedLikelihood, GaussianLikelihood};
use super::priors::Priors;
use super::{seeded_rng, ModelParams, PosteriorDraws};
use crate::covkernel::DistanceMode;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::modelcomp::{empirical_variogram, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC};

const ADAPT_BATCH: usize = 50;
const TARGET_ACCEPT: (f64, f64) = (0.25, 0.45);

/// Metropolis-within-Gibbs settings.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    pub n_iter: usize,
    pub n_burn: usize,
    pub thin: usize,
    pub rng_seed: u64,
    /// Random-walk scales for `log sigma2`, `log tau2` and the logit-rescaled
    /// decay.
    pub proposal_sd: [f64; 3],
    /// Tune the scales during burn-in towards 25-45% acceptance.
    pub adapt: bool,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            n_iter: 10_000,
            n_burn: 5_000,
            thin: 1,
            rng_seed: 0,
            proposal_sd: [0.5, 0.5, 0.5],
            adapt: true,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_burn >= self.n_iter {
            return Err(Error::InvalidParameter(format!(
                "n_burn ({}) must be < n_iter ({})",
                self.n_burn, self.n_iter
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidParameter("thin must be >= 1".into()));
        }
        if self.proposal_sd.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::InvalidParameter("proposal scales must be > 0".into()));
        }
        Ok(())
    }

    /// Number of retained draws.
    pub fn n_draws(&self) -> usize {
        (self.n_iter - self.n_burn).div_ceil(self.thin)
    }

    /// Same chain with iteration counts divided by `factor` (at least 200
    /// iterations, half of them burn-in).
    pub fn shortened(&self, factor: usize) -> Self {
        let n_iter = (self.n_iter / factor.max(1)).max(200);
        let n_burn = (self.n_burn / factor.max(1)).min(n_iter / 2);
        Self {
            n_iter,
            n_burn,
            ..self.clone()
        }
    }
}

/// Starting point: OLS coefficients and covariance parameters from the
/// empirical variogram, pulled inside the prior support. Falls back to an
/// even split of the residual variance when the variogram cannot be fitted.
pub fn initial_values(data: &Dataset, priors: &Priors, mode: DistanceMode) -> Result<ModelParams> {
    let beta = data.ols()?;
    let resid = &data.y - &data.x * &beta;
    let n = data.n() as f64;
    let var = resid.norm_squared() / (n - 1.0).max(1.0);
    let floor = if var > 0.0 { 1e-3 * var } else { 1e-3 };

    let (mut sigma2, mut tau2, mut phi) = match empirical_variogram(data, mode, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC) {
        Ok(v) => (v.sigma2_hat, v.tau2_hat, v.phi_hat),
        Err(_) => (0.5 * var, 0.5 * var, f64::NAN),
    };
    if var == 0.0 {
        sigma2 = priors.sigma2.mode();
        tau2 = priors.tau2.mode();
    }
    sigma2 = sigma2.max(floor);
    tau2 = tau2.max(floor);
    let (lo, hi) = (priors.phi.lower, priors.phi.upper);
    let margin = 1e-3 * (hi - lo);
    phi = if phi.is_finite() {
        phi.clamp(lo + margin, hi - margin)
    } else {
        0.5 * (lo + hi)
    };
    Ok(ModelParams {
        beta,
        sigma2,
        tau2,
        phi,
    })
}

/// Fits the collapsed hierarchical model by Metropolis-within-Gibbs.
pub fn run_mcmc(
    data: &Dataset,
    priors: &Priors,
    cfg: &McmcConfig,
    mode: DistanceMode,
) -> Result<PosteriorDraws> {
    if data.n() < data.p() + 1 {
        return Err(Error::InsufficientData(format!(
            "{} observations for {} coefficients",
            data.n(),
            data.p()
        )));
    }
    let init = initial_values(data, priors, mode)?;
    let lik = GaussianLikelihood::new(data, mode);
    let mut draws = run_chain(&lik, priors, cfg, init)?;
    draws.mode = mode;
    Ok(draws)
}

struct Transform {
    lower: f64,
    width: f64,
}

impl Transform {
    fn to_unconstrained(&self, theta: &ModelParams) -> [f64; 3] {
        let s = (theta.phi - self.lower) / self.width;
        [theta.sigma2.ln(), theta.tau2.ln(), (s / (1.0 - s)).ln()]
    }

    fn to_constrained(&self, z: &[f64; 3]) -> (f64, f64, f64) {
        let s = 1.0 / (1.0 + (-z[2]).exp());
        (z[0].exp(), z[1].exp(), self.lower + self.width * s)
    }

    /// Covariance-block log prior plus the log Jacobian of the transform.
    fn log_density(&self, priors: &Priors, sigma2: f64, tau2: f64, phi: f64) -> f64 {
        let jac = sigma2.ln() + tau2.ln()
            + ((phi - self.lower) * (self.lower + self.width - phi) / self.width).ln();
        let v = priors.sigma2.ln_pdf(sigma2) + priors.tau2.ln_pdf(tau2) + priors.phi.ln_pdf(phi) + jac;
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    }
}

/// Draws `x ~ N(mean, precision^{-1})`.
fn draw_from_precision<R: Rng>(
    mean: &DVector<f64>,
    precision: &DMatrix<f64>,
    rng: &mut R,
) -> Result<DVector<f64>> {
    let chol = nalgebra::Cholesky::new(precision.clone()).ok_or(Error::RankDeficient)?;
    let z = DVector::from_fn(mean.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    let shift = chol
        .l_dirty()
        .tr_solve_lower_triangular(&z)
        .ok_or(Error::RankDeficient)?;
    Ok(mean + shift)
}

/// Runs one Metropolis-within-Gibbs chain for an arbitrary collapsed
/// likelihood from `init`.
///
/// Each sweep draws the coefficients from their exact conditional, then
/// updates `log sigma2`, `log tau2` and `logit((phi - a) / (b - a))` one at a
/// time by random-walk Metropolis. Proposal scales adapt only during burn-in.
pub fn run_chain<L: CollapsedLikelihood>(
    lik: &L,
    priors: &Priors,
    cfg: &McmcConfig,
    init: ModelParams,
) -> Result<PosteriorDraws> {
    cfg.validate()?;
    if init.beta.len() != lik.n_coefficients() {
        return Err(Error::DimensionMismatch {
            expected: lik.n_coefficients(),
            found: init.beta.len(),
        });
    }
    let tr = Transform {
        lower: priors.phi.lower,
        width: priors.phi.width(),
    };
    if !priors.phi.contains(init.phi) {
        return Err(Error::OutOfDomain {
            value: init.phi,
            lower: priors.phi.lower,
            upper: priors.phi.upper,
        });
    }
    let mut rng = seeded_rng(cfg.rng_seed, 0);
    let mut z = tr.to_unconstrained(&init);
    let mut state = lik.prepare(&init.kernel()).map_err(|_| Error::NonFiniteLikelihood)?;
    let mut beta = init.beta.clone();
    let mut cur_prior = tr.log_density(priors, init.sigma2, init.tau2, init.phi);
    let mut cur_ll = lik.log_likelihood(&state, &beta);
    if !cur_ll.is_finite() || !cur_prior.is_finite() {
        return Err(Error::NonFiniteLikelihood);
    }
    let (mut sigma2, mut tau2, mut phi) = (init.sigma2, init.tau2, init.phi);

    let mut sd = cfg.proposal_sd;
    let mut batch_accepts = [0usize; 3];
    let mut kept_accepts = [0usize; 3];
    let mut draws = Vec::with_capacity(cfg.n_draws());

    for iter in 0..cfg.n_iter {
        let (mean, precision) = lik.beta_conditional(&state, &priors.beta)?;
        beta = draw_from_precision(&mean, &precision, &mut rng)?;
        cur_ll = lik.log_likelihood(&state, &beta);

        for k in 0..3 {
            let mut zp = z;
            zp[k] += sd[k] * rng.sample::<f64, _>(StandardNormal);
            let (s, t, f) = tr.to_constrained(&zp);
            let prop_prior = tr.log_density(priors, s, t, f);
            let log_u: f64 = rng.random::<f64>().ln();
            if prop_prior == f64::NEG_INFINITY {
                continue;
            }
            let Ok(prop_state) = lik.prepare(&crate::covkernel::KernelParams {
                sigma2: s,
                phi: f,
                tau2: t,
            }) else {
                continue;
            };
            let prop_ll = lik.log_likelihood(&prop_state, &beta);
            if log_u < (prop_ll + prop_prior) - (cur_ll + cur_prior) {
                z = zp;
                (sigma2, tau2, phi) = (s, t, f);
                state = prop_state;
                cur_ll = prop_ll;
                cur_prior = prop_prior;
                if iter < cfg.n_burn {
                    batch_accepts[k] += 1;
                } else {
                    kept_accepts[k] += 1;
                }
            }
        }

        if iter < cfg.n_burn && cfg.adapt && (iter + 1) % ADAPT_BATCH == 0 {
            for k in 0..3 {
                let rate = batch_accepts[k] as f64 / ADAPT_BATCH as f64;
                if rate < TARGET_ACCEPT.0 {
                    sd[k] *= 0.7;
                } else if rate > TARGET_ACCEPT.1 {
                    sd[k] *= 1.3;
                }
                batch_accepts[k] = 0;
            }
        }

        if iter >= cfg.n_burn && (iter - cfg.n_burn).is_multiple_of(cfg.thin) {
            draws.push(ModelParams {
                beta: beta.clone(),
                sigma2,
                tau2,
                phi,
            });
        }
    }

    let kept = (cfg.n_iter - cfg.n_burn) as f64;
    Ok(PosteriorDraws {
        model: "mcmc".into(),
        mode: DistanceMode::Curve,
        draws,
        omega: None,
        acceptance: Some(kept_accepts.map(|a| a as f64 / kept)),
    })
}
