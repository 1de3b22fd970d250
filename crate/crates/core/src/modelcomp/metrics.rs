use nalgebra::{DMatrix, DVector};

use std::f64::consts::PI;

use crate::covkernel::{CorrelationCache, CovMatrix};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::{ModelParams, PosteriorDraws};
use crate::kriging::PredictionResult;

/// Mean squared error of predictive means against held-out values.
pub fn mspe(pred: &[PredictionResult], y_true: &[f64]) -> Result<f64> {
    if pred.len() != y_true.len() {
        return Err(Error::DimensionMismatch {
            expected: pred.len(),
            found: y_true.len(),
        });
    }
    if pred.is_empty() {
        return Err(Error::InsufficientData("empty holdout set".into()));
    }
    Ok(pred
        .iter()
        .zip(y_true)
        .map(|(p, y)| (p.mean - y).powi(2))
        .sum::<f64>()
        / pred.len() as f64)
}

/// Fraction of held-out values inside their central 95% predictive interval.
pub fn interval_coverage(pred: &[PredictionResult], y_true: &[f64]) -> Result<f64> {
    if pred.len() != y_true.len() || pred.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: pred.len(),
            found: y_true.len(),
        });
    }
    let hits = pred
        .iter()
        .zip(y_true)
        .filter(|(p, y)| p.q025 <= **y && **y <= p.q975)
        .count();
    Ok(hits as f64 / pred.len() as f64)
}

/// `KL(N0 || N1)`, the truth first.
pub fn kl_divergence_mvn(
    mean0: &DVector<f64>,
    cov0: &DMatrix<f64>,
    mean1: &DVector<f64>,
    cov1: &DMatrix<f64>,
) -> Result<f64> {
    let n = mean0.len();
    for found in [cov0.nrows(), cov0.ncols(), mean1.len(), cov1.nrows(), cov1.ncols()] {
        if found != n {
            return Err(Error::DimensionMismatch { expected: n, found });
        }
    }
    let c0 = CovMatrix::from_matrix(cov0.clone())?;
    let c1 = CovMatrix::from_matrix(cov1.clone())?;
    // tr(S1^-1 S0) = ||L1^-1 L0||_F^2
    let l1 = c1.lower();
    let m = l1
        .solve_lower_triangular(&c0.lower())
        .ok_or(Error::NotPositiveDefinite("KL second covariance"))?;
    let trace = m.norm_squared();
    let maha = c1.quad_form(&(mean1 - mean0));
    Ok((0.5 * (trace + maha - n as f64 + c1.logdet() - c0.logdet())).max(0.0))
}

/// DIC on the collapsed likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dic {
    pub dic: f64,
    /// Effective number of parameters `D_bar - D(theta_bar)`.
    pub p_d: f64,
    pub d_bar: f64,
    pub d_hat: f64,
}

/// `-2 log N(y; X beta, K_theta + tau2 I)`.
pub fn deviance(theta: &ModelParams, data: &Dataset, dist: &DMatrix<f64>) -> Result<f64> {
    deviance_cached(theta, data, &mut CorrelationCache::new(dist.clone()))
}

fn deviance_cached(theta: &ModelParams, data: &Dataset, cache: &mut CorrelationCache) -> Result<f64> {
    if theta.beta.len() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            found: theta.beta.len(),
        });
    }
    // covariance sigma2 C: log det = n ln sigma2 + log det C
    let corr = cache.factor(&theta.kernel())?;
    let n = data.n() as f64;
    let r = &data.y - &data.x * &theta.beta;
    Ok(n * (2.0 * PI * theta.sigma2).ln() + corr.logdet() + corr.quad_form(&r) / theta.sigma2)
}

/// `DIC = D_bar + p_D` with `theta_bar` the posterior mean of all
/// parameters. Uses the distance mode recorded in `draws`.
pub fn dic(draws: &PosteriorDraws, data: &Dataset) -> Result<Dic> {
    let theta_bar = draws.mean().ok_or(Error::EmptyDraws)?;
    let mut cache = CorrelationCache::new(data.distances(draws.mode));
    let mut d_bar = 0.0;
    for theta in &draws.draws {
        d_bar += deviance_cached(theta, data, &mut cache)?;
    }
    d_bar /= draws.len() as f64;
    let d_hat = deviance_cached(&theta_bar, data, &mut cache)?;
    if !d_hat.is_finite() || !d_bar.is_finite() {
        return Err(Error::NonFiniteLikelihood);
    }
    let p_d = d_bar - d_hat;
    Ok(Dic {
        dic: d_bar + p_d,
        p_d,
        d_bar,
        d_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covkernel::DistanceMode;
    use crate::curvegeom::PlanePoint;
    use crate::data::Design;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pred(mean: f64) -> PredictionResult {
        PredictionResult {
            t0: 0.0,
            point: PlanePoint::new(0.0, 0.0),
            mean,
            sd: 1.0,
            q025: mean - 2.0,
            q500: mean,
            q975: mean + 2.0,
            samples: None,
        }
    }

    #[test]
    fn mspe_cases() {
        let y = [0.5, -1.0, 2.0];
        let exact: Vec<_> = y.iter().map(|&v| pred(v)).collect();
        assert_eq!(mspe(&exact, &y).unwrap(), 0.0);
        let offset: Vec<_> = y.iter().map(|&v| pred(v + 1.0)).collect();
        assert_relative_eq!(mspe(&offset, &y).unwrap(), 1.0);
        assert!(mspe(&offset, &y[..2]).is_err());
        assert_eq!(interval_coverage(&offset, &y).unwrap(), 1.0);
    }

    #[test]
    fn kl_scalar_case() {
        let m = DVector::from_element(1, 0.0);
        let kl = kl_divergence_mvn(&m, &DMatrix::from_element(1, 1, 1.0), &m, &DMatrix::from_element(1, 1, 2.0))
            .unwrap();
        assert_relative_eq!(kl, 0.5 * (0.5 - 1.0 + 2f64.ln()), epsilon = 1e-15);
        assert!((kl - 0.09657).abs() < 1e-5);
    }

    #[test]
    fn kl_rejects_non_pd() {
        let m = DVector::zeros(2);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(kl_divergence_mvn(&m, &DMatrix::identity(2, 2), &m, &bad).is_err());
    }

    fn random_pd(seed: &[f64], n: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |i, j| seed[(i * n + j) % seed.len()]);
        &a * a.transpose() + DMatrix::identity(n, n) * 0.1
    }

    proptest! {
        #[test]
        fn kl_nonnegative_and_zero_on_identity(
            vals in prop::collection::vec(-2.0f64..2.0, 9..20),
            shift in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let s0 = random_pd(&vals, 3);
            let s1 = random_pd(&vals[1..], 3);
            let m0 = DVector::zeros(3);
            let m1 = DVector::from_vec(shift);
            prop_assert!(kl_divergence_mvn(&m0, &s0, &m1, &s1).unwrap() >= 0.0);
            prop_assert!(kl_divergence_mvn(&m0, &s0, &m0, &s0).unwrap().abs() < 1e-10);
        }

        #[test]
        fn mspe_permutation_invariant(vals in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..12), rot in 0usize..12) {
            let preds: Vec<_> = vals.iter().map(|v| pred(v.0)).collect();
            let y: Vec<_> = vals.iter().map(|v| v.1).collect();
            let k = rot % vals.len();
            let mut p2 = preds.clone();
            let mut y2 = y.clone();
            p2.rotate_left(k);
            y2.rotate_left(k);
            prop_assert!((mspe(&preds, &y).unwrap() - mspe(&p2, &y2).unwrap()).abs() < 1e-12);
        }
    }

    fn fixture() -> Dataset {
        let t = vec![0.0, 0.4, 1.1, 1.5];
        let pts = t.iter().map(|&v| PlanePoint::new(v, 0.0)).collect();
        Dataset::from_design(t, pts, vec![0.2, 0.5, -0.1, 0.3], Design::Intercept).unwrap()
    }

    fn params(b: f64, s: f64, tau: f64, phi: f64) -> ModelParams {
        ModelParams {
            beta: DVector::from_element(1, b),
            sigma2: s,
            tau2: tau,
            phi,
        }
    }

    fn draws(d: Vec<ModelParams>) -> PosteriorDraws {
        PosteriorDraws {
            model: "test".into(),
            mode: DistanceMode::Curve,
            draws: d,
            omega: None,
            acceptance: None,
        }
    }

    #[test]
    fn point_mass_has_no_effective_parameters() {
        let data = fixture();
        let th = params(0.1, 0.7, 0.2, 1.3);
        let r = dic(&draws(vec![th.clone(); 5]), &data).unwrap();
        assert_relative_eq!(r.p_d, 0.0, epsilon = 1e-10);
        assert_relative_eq!(r.dic, deviance(&th, &data, &data.distances(DistanceMode::Curve)).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn two_draw_hand_computation() {
        let data = fixture();
        let dist = data.distances(DistanceMode::Curve);
        let a = params(0.0, 0.5, 0.1, 1.0);
        let b = params(0.4, 1.5, 0.3, 2.0);
        let mid = params(0.2, 1.0, 0.2, 1.5);
        let (da, db, dm) = (
            deviance(&a, &data, &dist).unwrap(),
            deviance(&b, &data, &dist).unwrap(),
            deviance(&mid, &data, &dist).unwrap(),
        );
        let r = dic(&draws(vec![a, b]), &data).unwrap();
        let d_bar = 0.5 * (da + db);
        assert_relative_eq!(r.d_bar, d_bar, epsilon = 1e-12);
        assert_relative_eq!(r.d_hat, dm, epsilon = 1e-12);
        assert_relative_eq!(r.dic, 2.0 * d_bar - dm, epsilon = 1e-12);
    }

    #[test]
    fn deviance_matches_direct_density() {
        use crate::covkernel::{build_cov, mvn_logpdf};
        let data = fixture();
        let dist = data.distances(DistanceMode::Curve);
        let th = params(0.3, 1.7, 0.4, 0.6);
        let cov = build_cov(&th.kernel(), &dist, true).unwrap();
        let direct = -2.0 * mvn_logpdf(&data.y, &(&data.x * &th.beta), &cov).unwrap();
        assert_relative_eq!(deviance(&th, &data, &dist).unwrap(), direct, epsilon = 1e-12);
    }

    #[test]
    fn empty_draws_rejected() {
        assert!(matches!(dic(&draws(vec![]), &fixture()), Err(Error::EmptyDraws)));
    }
}
