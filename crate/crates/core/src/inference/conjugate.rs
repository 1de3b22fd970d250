use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::priors::Priors;
use super::{seeded_rng, ModelParams, PosteriorDraws};
use crate::covkernel::{build_cov, DistanceMode, KernelParams};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Fixed hyperparameters and draw count for the conjugate model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateConfig {
    pub phi_fixed: f64,
    /// Noise-to-signal ratio `tau2 / sigma2`.
    pub alpha_fixed: f64,
    pub n_draws: usize,
    pub rng_seed: u64,
}

impl ConjugateConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi_fixed > 0.0) || !(self.alpha_fixed >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "conjugate model needs phi > 0 and alpha >= 0, got ({}, {})",
                self.phi_fixed, self.alpha_fixed
            )));
        }
        if self.n_draws == 0 {
            return Err(Error::InvalidParameter("n_draws must be >= 1".into()));
        }
        Ok(())
    }
}

/// Closed-form posterior of the conjugate model: `sigma2 ~ IG(shape, scale)`
/// and `beta | sigma2 ~ N(mean, sigma2 * cov)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatePosterior {
    pub shape: f64,
    pub scale: f64,
    /// `B b`.
    pub mean: DVector<f64>,
    /// `B = (X^T V_y^{-1} X + V_beta^{-1})^{-1}`.
    pub cov: DMatrix<f64>,
}

/// Posterior of `y ~ N(X beta, sigma2 (R(phi) + alpha I))` with
/// `sigma2 ~ IG(a, b)` and `beta | sigma2 ~ N(mu, sigma2 V_beta)`.
///
/// The flat coefficient prior is the `V_beta^{-1} -> 0` limit of that
/// family, so the shape is `a + n / 2` in both cases. The scale uses the
/// quadratic form `y^T V_y^{-1} y`.
pub fn conjugate_posterior(
    data: &Dataset,
    mode: DistanceMode,
    phi: f64,
    alpha: f64,
    priors: &Priors,
) -> Result<ConjugatePosterior> {
    let corr = KernelParams::new(1.0, phi, alpha)?;
    let vy = build_cov(&corr, &data.distances(mode), true)?;
    let p = data.p();
    let vinv_x = vy.solve_matrix(&data.x);
    let vinv_y = vy.solve(&data.y);
    let mut b_inv = data.x.transpose() * &vinv_x;
    let mut b = data.x.transpose() * &vinv_y;
    let mut quad = data.y.dot(&vinv_y);
    if let Some((prec0, pm0)) = priors.beta.precision(p)? {
        b_inv += prec0;
        if let super::BetaPrior::Normal { mean, .. } = &priors.beta {
            quad += mean.dot(&pm0);
        }
        b += pm0;
    }
    let chol = Cholesky::new(b_inv).ok_or(Error::RankDeficient)?;
    let mean = chol.solve(&b);
    let cov = chol.inverse();
    let n = data.n() as f64;
    let resid = (quad - b.dot(&mean)).max(0.0);
    Ok(ConjugatePosterior {
        shape: priors.sigma2.shape + n / 2.0,
        scale: priors.sigma2.scale + 0.5 * resid,
        mean,
        cov,
    })
}

/// Exact posterior draws of the conjugate model: `sigma2` first, then
/// `beta | sigma2`. Reported `tau2` is `alpha * sigma2` and `phi` stays at
/// its fixed value.
pub fn run_conjugate(
    data: &Dataset,
    cfg: &ConjugateConfig,
    priors: &Priors,
    mode: DistanceMode,
) -> Result<PosteriorDraws> {
    cfg.validate()?;
    let post = conjugate_posterior(data, mode, cfg.phi_fixed, cfg.alpha_fixed, priors)?;
    let lower = Cholesky::new(post.cov.clone())
        .ok_or(Error::RankDeficient)?
        .l();
    let gamma = Gamma::new(post.shape, 1.0)
        .map_err(|e| Error::InvalidParameter(format!("posterior shape: {e}")))?;
    let mut rng = seeded_rng(cfg.rng_seed, 0);
    let p = post.mean.len();
    let draws = (0..cfg.n_draws)
        .map(|_| {
            let sigma2 = post.scale / gamma.sample(&mut rng);
            let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
            let beta = &post.mean + (&lower * z) * sigma2.sqrt();
            ModelParams {
                beta,
                sigma2,
                tau2: cfg.alpha_fixed * sigma2,
                phi: cfg.phi_fixed,
            }
        })
        .collect();
    Ok(PosteriorDraws {
        model: "conjugate".into(),
        mode,
        draws,
        omega: None,
        acceptance: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvegeom::PlanePoint;
    use crate::data::Design;
    use approx::assert_relative_eq;

    fn ones_data(y: Vec<f64>) -> Dataset {
        let t: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
        let pts = t.iter().map(|&v| PlanePoint::new(v, 0.0)).collect();
        Dataset::from_design(t, pts, y, Design::Intercept).unwrap()
    }

    #[test]
    fn exact_fit_case() {
        // phi huge => R = I to machine precision; alpha = 0
        let post = conjugate_posterior(
            &ones_data(vec![1.0, 1.0, 1.0]),
            DistanceMode::Curve,
            1e6,
            0.0,
            &Priors::default(),
        )
        .unwrap();
        assert_relative_eq!(post.mean[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(post.scale, 2.0, epsilon = 1e-14);
        assert_relative_eq!(post.shape, 3.5);
        assert_relative_eq!(post.cov[(0, 0)], 1.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn residual_sum_enters_scale() {
        let post = conjugate_posterior(
            &ones_data(vec![1.0, 2.0, 3.0]),
            DistanceMode::Curve,
            1e6,
            0.0,
            &Priors::default(),
        )
        .unwrap();
        assert_relative_eq!(post.mean[0], 2.0, epsilon = 1e-14);
        assert_relative_eq!(post.scale, 2.0 + 0.5 * 2.0, epsilon = 1e-13);
    }

    #[test]
    fn draws_are_reproducible_and_consistent() {
        let data = ones_data(vec![0.3, 1.1, 0.7, 1.9, 1.4]);
        let cfg = ConjugateConfig {
            phi_fixed: 0.9,
            alpha_fixed: 0.25,
            n_draws: 500,
            rng_seed: 5,
        };
        let a = run_conjugate(&data, &cfg, &Priors::default(), DistanceMode::Curve).unwrap();
        let b = run_conjugate(&data, &cfg, &Priors::default(), DistanceMode::Curve).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 500);
        for d in &a.draws {
            assert_eq!(d.phi, 0.9);
            assert_relative_eq!(d.tau2, 0.25 * d.sigma2);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let data = ones_data(vec![1.0, 2.0]);
        let cfg = ConjugateConfig {
            phi_fixed: 0.0,
            alpha_fixed: 0.1,
            n_draws: 10,
            rng_seed: 0,
        };
        assert!(run_conjugate(&data, &cfg, &Priors::default(), DistanceMode::Curve).is_err());
    }
}
