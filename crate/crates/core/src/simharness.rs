//! Simulation study on an ellipse: coastal models against Euclidean simple
//! and universal kriging.
//!
//! Locations are uniform in the ellipse angle, the field is an exponential
//! Gaussian process in true arc length and a random subset is held out. Six
//! models are fitted to the training rows:
//!
//! | name | distance | parameter | fit |
//! |------|----------|-----------|-----|
//! | `1a` | curve | exact arc length | MCMC |
//! | `1b` | curve | cumulative chord length | MCMC |
//! | `2a` | curve | exact arc length | conjugate, variogram-fixed |
//! | `2b` | curve | cumulative chord length | conjugate, variogram-fixed |
//! | `sk` | Euclidean | - | conjugate, variogram-fixed |
//! | `uk` | Euclidean, trend in coordinates | - | MCMC |

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::covkernel::{build_cov, DistanceMode, KernelParams};
use crate::curvegeom::{cumulative_chord_length, ParametricCurve, PlanePoint};
use crate::data::{Dataset, Design};
use crate::error::{Error, Result};
use crate::inference::{derive_seed, seeded_rng, McmcConfig, PosteriorDraws};
use crate::kriging::{quantile_sorted, PredictionResult};
use crate::model::{conjugate_hyperparameters, ModelSpec};
use crate::modelcomp::{evaluate, kl_divergence_mvn, ComparisonReport, ModelReport};

/// Study settings. Defaults reproduce the reference design: 100 points, 75
/// for training, `beta0 = 0`, `sigma2 = 1`, `phi = 1`, `tau2 = 0.1` on the
/// ellipse with semi-axes 2 and 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub n_train: usize,
    pub beta0: f64,
    pub sigma2: f64,
    pub phi: f64,
    pub tau2: f64,
    pub a: f64,
    pub b: f64,
    pub seed: u64,
    pub mcmc: McmcConfig,
    pub conjugate_draws: usize,
    /// Folds for cross-validation; capped at the training size, 0 skips it.
    pub cv_folds: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 100,
            n_train: 75,
            beta0: 0.0,
            sigma2: 1.0,
            phi: 1.0,
            tau2: 0.1,
            a: 2.0,
            b: 1.0,
            seed: 0,
            mcmc: McmcConfig::default(),
            conjugate_draws: 5000,
            cv_folds: 10,
        }
    }
}

impl SimConfig {
    /// Default design resized to `n` points with a 75% training share.
    pub fn with_size(n: usize) -> Self {
        Self {
            n,
            n_train: ((0.75 * n as f64).round() as usize).clamp(1, n.saturating_sub(1).max(1)),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n_train == 0 || self.n_train >= self.n {
            return Err(Error::InvalidParameter(format!(
                "need 0 < n_train < n, got n = {}, n_train = {}",
                self.n, self.n_train
            )));
        }
        // Zero variances are allowed for the generator's degenerate cases.
        if !(self.sigma2 >= 0.0 && self.tau2 >= 0.0 && self.phi > 0.0) || !self.beta0.is_finite() {
            return Err(Error::InvalidParameter(
                "need sigma2 >= 0, tau2 >= 0, phi > 0 and finite beta0".into(),
            ));
        }
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(Error::InvalidParameter("ellipse semi-axes must be > 0".into()));
        }
        self.mcmc.validate()
    }

    fn ellipse(&self) -> Result<ParametricCurve> {
        ParametricCurve::ellipse(self.a, self.b, 0.0, TAU)
    }
}

/// How the arc-length parameter of the generated points is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parametrization {
    /// Quadrature of the ellipse speed.
    Exact,
    /// Cumulative chord length through the sorted points.
    Chord,
}

/// A generated dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SimData {
    /// Ellipse angles, ascending.
    pub lambda: Vec<f64>,
    pub points: Vec<PlanePoint>,
    pub t_exact: Vec<f64>,
    pub t_chord: Vec<f64>,
    pub omega: Vec<f64>,
    pub y: Vec<f64>,
    /// Sorted training indices.
    pub train: Vec<usize>,
    /// Sorted holdout indices.
    pub test: Vec<usize>,
}

impl SimData {
    pub fn parameter(&self, param: Parametrization) -> &[f64] {
        match param {
            Parametrization::Exact => &self.t_exact,
            Parametrization::Chord => &self.t_chord,
        }
    }

    /// All generated points with an intercept-only design.
    pub fn dataset(&self, param: Parametrization) -> Dataset {
        Dataset::from_design(
            self.parameter(param).to_vec(),
            self.points.clone(),
            self.y.clone(),
            Design::Intercept,
        )
        .expect("generated data is finite")
    }

    pub fn train_set(&self, param: Parametrization) -> Dataset {
        self.dataset(param).subset(&self.train)
    }

    pub fn test_set(&self, param: Parametrization) -> Dataset {
        self.dataset(param).subset(&self.test)
    }
}

/// Draws a dataset: sorted uniform angles, exact and chordal arc lengths, a
/// latent field in exact arc length, noisy responses and a random split.
pub fn generate(cfg: &SimConfig) -> Result<SimData> {
    cfg.validate()?;
    let curve = cfg.ellipse()?;
    let mut rng = seeded_rng(cfg.seed, 4);
    let mut lambda: Vec<f64> = (0..cfg.n).map(|_| rng.random_range(0.0..TAU)).collect();
    lambda.sort_by(f64::total_cmp);
    let points: Vec<PlanePoint> = lambda.iter().map(|&l| curve.point_at(l)).collect();
    let t_exact = curve.cumulative_arc_length(&lambda)?;
    let t_chord = cumulative_chord_length(&points);

    let z = DVector::from_fn(cfg.n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let omega = if cfg.sigma2 > 0.0 {
        let kernel = KernelParams::new(cfg.sigma2, cfg.phi, 0.0)?;
        let cov = build_cov(&kernel, &crate::curvegeom::pairwise_curve_distance(&t_exact), false)?;
        cov.lower() * z
    } else {
        DVector::zeros(cfg.n)
    };
    let noise_sd = cfg.tau2.sqrt();
    let y: Vec<f64> = omega
        .iter()
        .map(|w| cfg.beta0 + w + noise_sd * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut idx: Vec<usize> = (0..cfg.n).collect();
    idx.shuffle(&mut rng);
    let mut train = idx[..cfg.n_train].to_vec();
    let mut test = idx[cfg.n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(SimData {
        lambda,
        points,
        t_exact,
        t_chord,
        omega: omega.iter().copied().collect(),
        y,
        train,
        test,
    })
}

/// One fitted model of the study.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutcome {
    pub spec: ModelSpec,
    pub parametrization: Parametrization,
    pub draws: PosteriorDraws,
    /// Predictive summaries at the holdout points, in `SimData::test` order.
    pub holdout: Vec<PredictionResult>,
    pub report: ModelReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    pub data: SimData,
    pub models: Vec<ModelOutcome>,
    pub report: ComparisonReport,
}

impl SimResult {
    pub fn model(&self, name: &str) -> Option<&ModelOutcome> {
        self.models.iter().find(|m| m.spec.name == name)
    }
}

/// The six study models with their parametrizations; conjugate fixed values
/// come from the training data.
pub fn study_models(cfg: &SimConfig, data: &SimData) -> Vec<(ModelSpec, Parametrization)> {
    use DistanceMode::{Curve, Euclidean};
    use Parametrization::{Chord, Exact};
    let conj = |name: &str, mode: DistanceMode, param: Parametrization| {
        let (phi, alpha) = conjugate_hyperparameters(&data.train_set(param), mode);
        ModelSpec::conjugate(name, mode, Design::Intercept, phi, alpha, cfg.conjugate_draws)
    };
    vec![
        (ModelSpec::mcmc("1a", Curve, Design::Intercept, cfg.mcmc.clone()), Exact),
        (ModelSpec::mcmc("1b", Curve, Design::Intercept, cfg.mcmc.clone()), Chord),
        (conj("2a", Curve, Exact), Exact),
        (conj("2b", Curve, Chord), Chord),
        (conj("sk", Euclidean, Exact), Exact),
        (ModelSpec::mcmc("uk", Euclidean, Design::Coordinates, cfg.mcmc.clone()), Exact),
    ]
}

/// Distribution of the training responses under the generator.
pub fn true_training_distribution(cfg: &SimConfig, data: &SimData) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let train = data.train_set(Parametrization::Exact);
    let kernel = KernelParams::new(cfg.sigma2, cfg.phi, cfg.tau2)?;
    let cov = build_cov(&kernel, &train.distances(DistanceMode::Curve), true)?;
    Ok((DVector::from_element(train.n(), cfg.beta0), cov.matrix().clone()))
}

fn fit_one(
    cfg: &SimConfig,
    data: &SimData,
    spec: &ModelSpec,
    param: Parametrization,
    tag: u64,
    truth: &(DVector<f64>, DMatrix<f64>),
) -> Result<ModelOutcome> {
    let train = spec.prepare(&data.train_set(param))?;
    let folds = if cfg.cv_folds >= 2 { cfg.cv_folds.min(train.n()) } else { 0 };
    let ev = evaluate(
        spec,
        &train,
        &data.test_set(param),
        folds,
        derive_seed(cfg.seed, tag),
        derive_seed(cfg.seed, 100 + tag),
    )?;

    let theta_bar = ev.draws.mean().ok_or(Error::EmptyDraws)?;
    let fitted_cov = build_cov(&theta_bar.kernel(), &train.distances(spec.mode), true)?;
    let kl = kl_divergence_mvn(&truth.0, &truth.1, &(&train.x * &theta_bar.beta), fitted_cov.matrix())?;

    Ok(ModelOutcome {
        spec: ev.spec,
        parametrization: param,
        draws: ev.draws,
        holdout: ev.holdout,
        report: ModelReport {
            kl: Some(kl),
            ..ev.report
        },
    })
}

/// Generates a dataset and fits, predicts and scores all six models. Fits run
/// in parallel; results do not depend on the thread count.
pub fn run_study(cfg: &SimConfig) -> Result<SimResult> {
    let data = generate(cfg)?;
    let truth = true_training_distribution(cfg, &data)?;
    let specs = study_models(cfg, &data);
    let models = specs
        .par_iter()
        .enumerate()
        .map(|(k, (spec, param))| fit_one(cfg, &data, spec, *param, k as u64, &truth))
        .collect::<Result<Vec<_>>>()?;
    let report = ComparisonReport {
        models: models.iter().map(|m| m.report.clone()).collect(),
        cv_folds: cfg.cv_folds.min(cfg.n_train),
    };
    report.validate()?;
    Ok(SimResult {
        config: cfg.clone(),
        data,
        models,
        report,
    })
}

/// Posterior mean and 95% band of the correlation `exp(-phi d)` at each `d`.
pub fn correlation_curve(draws: &PosteriorDraws, d: &[f64]) -> Vec<(f64, f64, f64, f64)> {
    d.iter()
        .map(|&d| {
            let mut r: Vec<f64> = draws.draws.iter().map(|th| (-th.phi * d).exp()).collect();
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            r.sort_by(f64::total_cmp);
            (d, mean, quantile_sorted(&r, 0.025), quantile_sorted(&r, 0.975))
        })
        .collect()
}

/// Distance grid of the exported correlation curves.
pub fn correlation_grid() -> Vec<f64> {
    (0..=100).map(|i| 0.04 * i as f64).collect()
}

/// Writes `table1.csv`, `table1.txt`, `fig1_correlation.csv` (models with a
/// sampled decay) and `fig2_holdout.csv` into `dir`.
pub fn write_outputs(result: &SimResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    result.report.write_csv(fs::File::create(dir.join("table1.csv"))?)?;
    fs::write(dir.join("table1.txt"), result.report.to_text())?;

    let mut fig1 = csv::Writer::from_path(dir.join("fig1_correlation.csv"))?;
    fig1.write_record(["model", "d", "mean", "lo", "hi"])?;
    let grid = correlation_grid();
    for m in result.models.iter().filter(|m| m.spec.samples_phi()) {
        for (d, mean, lo, hi) in correlation_curve(&m.draws, &grid) {
            fig1.write_record([m.spec.name.clone(), d.to_string(), mean.to_string(), lo.to_string(), hi.to_string()])?;
        }
    }
    fig1.flush()?;

    let mut fig2 = csv::Writer::from_path(dir.join("fig2_holdout.csv"))?;
    fig2.write_record(["true", "predicted", "lo", "hi", "model"])?;
    for m in &result.models {
        for (p, &i) in m.holdout.iter().zip(&result.data.test) {
            fig2.write_record([
                result.data.y[i].to_string(),
                p.mean.to_string(),
                p.q025.to_string(),
                p.q975.to_string(),
                m.spec.name.clone(),
            ])?;
        }
    }
    fig2.flush()?;
    Ok(())
}
