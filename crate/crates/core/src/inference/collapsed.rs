use std::cell::RefCell;

use nalgebra::{DMatrix, DVector};

use super::priors::{BetaPrior, Priors};
use super::ModelParams;
use crate::covkernel::{mvn_logpdf, CovMatrix, DistanceMode, KernelParams};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Likelihood of the collapsed model as seen by the Metropolis-within-Gibbs
/// sampler.
///
/// `State` caches whatever depends on the covariance parameters only (the
/// Cholesky factor for the Gaussian case) so the coefficient update and the
/// likelihood evaluations share one factorization.
pub trait CollapsedLikelihood {
    type State;

    fn n_coefficients(&self) -> usize;

    fn prepare(&self, kernel: &KernelParams) -> Result<Self::State>;

    fn log_likelihood(&self, state: &Self::State, beta: &DVector<f64>) -> f64;

    /// Mean and precision of the coefficients given the covariance
    /// parameters.
    fn beta_conditional(
        &self,
        state: &Self::State,
        prior: &BetaPrior,
    ) -> Result<(DVector<f64>, DMatrix<f64>)>;
}

/// A decay and its correlation matrix `exp(-phi D)`.
type CorrelationEntry = Option<(f64, DMatrix<f64>)>;

/// `N(y | X beta, K_theta + tau2 I)`.
#[derive(Debug, Clone)]
pub struct GaussianLikelihood<'a> {
    data: &'a Dataset,
    distances: DMatrix<f64>,
    /// Correlation matrices `exp(-phi D)` for the two most recent decays, so
    /// variance-only proposals skip the elementwise exponentials.
    recent: RefCell<[CorrelationEntry; 2]>,
}

impl<'a> GaussianLikelihood<'a> {
    pub fn new(data: &'a Dataset, mode: DistanceMode) -> Self {
        Self {
            data,
            distances: data.distances(mode),
            recent: RefCell::new([None, None]),
        }
    }

    fn covariance(&self, kernel: &KernelParams) -> Result<CovMatrix> {
        kernel.validate()?;
        let mut recent = self.recent.borrow_mut();
        let hit = recent
            .iter()
            .position(|e| e.as_ref().is_some_and(|(phi, _)| *phi == kernel.phi));
        let slot = match hit {
            Some(i) => i,
            None => {
                recent.swap(0, 1);
                let phi = kernel.phi;
                recent[1] = Some((phi, self.distances.map(|d| (-phi * d).exp())));
                1
            }
        };
        let corr = &recent[slot].as_ref().expect("slot filled").1;
        let mut k = corr * kernel.sigma2;
        for i in 0..k.nrows() {
            k[(i, i)] += kernel.tau2;
        }
        CovMatrix::from_matrix(k)
    }
}

impl CollapsedLikelihood for GaussianLikelihood<'_> {
    type State = CovMatrix;

    fn n_coefficients(&self) -> usize {
        self.data.p()
    }

    fn prepare(&self, kernel: &KernelParams) -> Result<CovMatrix> {
        self.covariance(kernel)
    }

    fn log_likelihood(&self, cov: &CovMatrix, beta: &DVector<f64>) -> f64 {
        let mean = &self.data.x * beta;
        mvn_logpdf(&self.data.y, &mean, cov).unwrap_or(f64::NEG_INFINITY)
    }

    fn beta_conditional(
        &self,
        cov: &CovMatrix,
        prior: &BetaPrior,
    ) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let p = self.data.p();
        let wx = DMatrix::from_columns(
            &(0..p)
                .map(|j| cov.whiten(&self.data.x.column(j).into_owned()))
                .collect::<Vec<_>>(),
        );
        let wy = cov.whiten(&self.data.y);
        let mut precision = wx.transpose() * &wx;
        let mut rhs = wx.transpose() * wy;
        if let Some((prec0, pm0)) = prior.precision(p)? {
            precision += prec0;
            rhs += pm0;
        }
        let chol = nalgebra::Cholesky::new(precision.clone()).ok_or(Error::RankDeficient)?;
        Ok((chol.solve(&rhs), precision))
    }
}

/// A likelihood that is identically zero on the log scale: the chain then
/// targets the prior. Used to validate the sampler.
#[derive(Debug, Clone, Copy)]
pub struct PriorOnly {
    pub n_coefficients: usize,
}

impl CollapsedLikelihood for PriorOnly {
    type State = ();

    fn n_coefficients(&self) -> usize {
        self.n_coefficients
    }

    fn prepare(&self, kernel: &KernelParams) -> Result<()> {
        kernel.validate()
    }

    fn log_likelihood(&self, _: &(), _: &DVector<f64>) -> f64 {
        0.0
    }

    fn beta_conditional(&self, _: &(), prior: &BetaPrior) -> Result<(DVector<f64>, DMatrix<f64>)> {
        match prior.precision(self.n_coefficients)? {
            Some((prec, _)) => match prior {
                BetaPrior::Normal { mean, .. } => Ok((mean.clone(), prec)),
                BetaPrior::Flat => unreachable!(),
            },
            None => Err(Error::InvalidParameter(
                "sampling the prior requires a proper coefficient prior".into(),
            )),
        }
    }
}

/// Sum of the log-prior terms of the collapsed hierarchical model.
pub(crate) fn log_prior(theta: &ModelParams, priors: &Priors) -> Result<f64> {
    Ok(priors.phi.ln_pdf(theta.phi)
        + priors.tau2.ln_pdf(theta.tau2)
        + priors.sigma2.ln_pdf(theta.sigma2)
        + priors.beta.ln_pdf(&theta.beta)?)
}

/// Unnormalized log posterior
/// `U(phi) IG(tau2) IG(sigma2) p(beta) N(y | X beta, K_theta + tau2 I)`.
///
/// Parameters outside the prior support give `-inf`.
pub fn log_posterior_collapsed(
    theta: &ModelParams,
    data: &Dataset,
    priors: &Priors,
    mode: DistanceMode,
) -> Result<f64> {
    if theta.beta.len() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            found: theta.beta.len(),
        });
    }
    let lp = log_prior(theta, priors)?;
    if lp == f64::NEG_INFINITY {
        return Ok(lp);
    }
    let lik = GaussianLikelihood::new(data, mode);
    match lik.prepare(&theta.kernel()) {
        Ok(cov) => Ok(lp + lik.log_likelihood(&cov, &theta.beta)),
        Err(Error::NotPositiveDefinite(_)) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}
