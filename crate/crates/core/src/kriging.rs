//! Posterior predictive distribution at new curve points.
//!
//! For every retained parameter draw the response at a target is normal with
//! the classical kriging mean and variance evaluated at that draw; sampling
//! one value per draw and summarizing gives the posterior predictive.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::covkernel::{CorrelationCache, CovMatrix, DistanceMode};
use crate::curvegeom::{PlanePoint, Polyline};
use crate::data::{Dataset, PredictionTarget};
use crate::error::{Error, Result};
use crate::inference::{seeded_rng, ModelParams, PosteriorDraws};

/// Round-off tolerance on negative kriging variances before clamping.
const VARIANCE_TOL: f64 = 1e-10;

/// What is being predicted at a target location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredictiveKind {
    /// A new noisy measurement `Y(t0)`: prior variance `sigma2 + tau2`.
    #[default]
    Response,
    /// The latent smooth surface `x0' beta + omega(t0)`: prior variance
    /// `sigma2`.
    Latent,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PredictOptions {
    pub kind: PredictiveKind,
    pub keep_samples: bool,
}

/// Predictive summary at one target.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionResult {
    pub t0: f64,
    pub point: PlanePoint,
    pub mean: f64,
    pub sd: f64,
    pub q025: f64,
    pub q500: f64,
    pub q975: f64,
    pub samples: Option<Vec<f64>>,
}

/// Kriging system for one parameter draw, in correlation form: with
/// `S = sigma2 C` the weights `C^{-1} (y - X beta)` give the mean directly and
/// the variance reduction is `sigma2 r0' C^{-1} r0`.
struct KrigingSystem<'a> {
    data: &'a Dataset,
    theta: &'a ModelParams,
    mode: DistanceMode,
    corr: &'a CovMatrix,
    weights: DVector<f64>,
}

impl<'a> KrigingSystem<'a> {
    fn new(
        theta: &'a ModelParams,
        data: &'a Dataset,
        mode: DistanceMode,
        cache: &'a mut CorrelationCache,
    ) -> Result<Self> {
        if theta.beta.len() != data.p() {
            return Err(Error::DimensionMismatch {
                expected: data.p(),
                found: theta.beta.len(),
            });
        }
        let corr = cache.factor(&theta.kernel())?;
        let weights = corr.solve(&(&data.y - &data.x * &theta.beta));
        Ok(Self {
            data,
            theta,
            mode,
            corr,
            weights,
        })
    }

    fn moments(&self, target: &PredictionTarget, kind: PredictiveKind) -> Result<(f64, f64)> {
        if target.x0.len() != self.data.p() {
            return Err(Error::DimensionMismatch {
                expected: self.data.p(),
                found: target.x0.len(),
            });
        }
        let phi = self.theta.phi;
        let r0 = self
            .data
            .distances_to(self.mode, target.t0, &target.point)
            .map(|d| (-phi * d).exp());
        let mean = target.x0.dot(&self.theta.beta) + r0.dot(&self.weights);
        let prior_var = match kind {
            PredictiveKind::Response => self.theta.sigma2 + self.theta.tau2,
            PredictiveKind::Latent => self.theta.sigma2,
        };
        let var = prior_var - self.theta.sigma2 * self.corr.quad_form(&r0);
        debug_assert!(
            var >= -VARIANCE_TOL * prior_var.max(1.0),
            "kriging variance {var} below round-off tolerance"
        );
        Ok((mean, var.max(0.0)))
    }
}

/// Classical kriging mean and variance at one parameter value.
///
/// `m = x0' beta + k0' S^{-1} (y - X beta)` and `v = k00 - k0' S^{-1} k0`
/// with `S = K_theta + tau2 I`. `k00` includes the nugget for
/// [`PredictiveKind::Response`].
pub fn krige_moments(
    theta: &ModelParams,
    data: &Dataset,
    target: &PredictionTarget,
    mode: DistanceMode,
    kind: PredictiveKind,
) -> Result<(f64, f64)> {
    let mut cache = CorrelationCache::new(data.distances(mode));
    KrigingSystem::new(theta, data, mode, &mut cache)?.moments(target, kind)
}

/// Empirical quantile with linear interpolation between order statistics
/// (type 7). `sorted` must be ascending and nonempty.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(target: &PredictionTarget, mut samples: Vec<f64>, keep: bool) -> PredictionResult {
    let m = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / m;
    let sd = if samples.len() > 1 {
        (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        0.0
    };
    let kept = keep.then(|| samples.clone());
    samples.sort_by(f64::total_cmp);
    PredictionResult {
        t0: target.t0,
        point: target.point,
        mean,
        sd,
        q025: quantile_sorted(&samples, 0.025),
        q500: quantile_sorted(&samples, 0.5),
        q975: quantile_sorted(&samples, 0.975),
        samples: kept,
    }
}

/// Composition sampling of the posterior predictive at every target: one
/// normal draw per (parameter draw, target). Uses the distance mode recorded
/// in `draws`.
pub fn predict(
    draws: &PosteriorDraws,
    data: &Dataset,
    targets: &[PredictionTarget],
    rng_seed: u64,
    opts: PredictOptions,
) -> Result<Vec<PredictionResult>> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let mut rng = seeded_rng(rng_seed, 2);
    let mut samples = vec![Vec::with_capacity(draws.len()); targets.len()];
    let mut cache = CorrelationCache::new(data.distances(draws.mode));
    for theta in &draws.draws {
        let sys = KrigingSystem::new(theta, data, draws.mode, &mut cache)?;
        for (target, acc) in targets.iter().zip(samples.iter_mut()) {
            let (m, v) = sys.moments(target, opts.kind)?;
            let z: f64 = rng.sample(StandardNormal);
            acc.push(m + v.sqrt() * z);
        }
    }
    Ok(targets
        .iter()
        .zip(samples)
        .map(|(t, s)| summarize(t, s, opts.keep_samples))
        .collect())
}

/// Posterior predictive along `n_points` equally spaced arc-length positions
/// spanning the whole polyline. Target covariates follow the fitted design.
pub fn interpolate_path(
    draws: &PosteriorDraws,
    data: &Dataset,
    poly: &Polyline,
    n_points: usize,
    rng_seed: u64,
    opts: PredictOptions,
) -> Result<Vec<PredictionResult>> {
    let targets = path_targets(data, poly, n_points)?;
    predict(draws, data, &targets, rng_seed, opts)
}

pub fn path_targets(data: &Dataset, poly: &Polyline, n_points: usize) -> Result<Vec<PredictionTarget>> {
    poly.equally_spaced(n_points)?
        .into_iter()
        .map(|t0| {
            let point = poly.point_at(t0);
            Ok(PredictionTarget {
                t0,
                point,
                x0: data.design.row_at(&point)?,
            })
        })
        .collect()
}
