use crate::data::Dataset;
use crate::error::Result;
use crate::inference::PosteriorDraws;
use crate::kriging::{predict, PredictOptions, PredictionResult};
use crate::model::ModelSpec;

use super::{cross_validate, dic, interval_coverage, mspe, summarize_draws, ModelReport};

/// A model fitted to training rows and scored.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// The spec with any variogram-fixed values resolved on the training rows.
    pub spec: ModelSpec,
    pub draws: PosteriorDraws,
    /// Predictive summaries at the holdout rows, in order.
    pub holdout: Vec<PredictionResult>,
    pub report: ModelReport,
}

/// Fits `spec` to `train`, predicts `test` and scores DIC on the training
/// fit, MSPE and interval coverage on `test` (skipped when empty) and
/// `cv_folds`-fold cross-validation on `train` (skipped below 2). KL needs a
/// known generator and is left to the caller.
pub fn evaluate(
    spec: &ModelSpec,
    train: &Dataset,
    test: &Dataset,
    cv_folds: usize,
    seed: u64,
    cv_seed: u64,
) -> Result<Evaluation> {
    let train = spec.prepare(train)?;
    let spec = spec.with_fixed_hyperparameters(&train)?;
    let draws = spec.fit(&train, seed)?;

    let (holdout, mspe_v, coverage) = if test.n() > 0 {
        let test = spec.prepare(test)?;
        let targets: Vec<_> = (0..test.n()).map(|i| test.target(i)).collect();
        let holdout = predict(&draws, &train, &targets, seed, PredictOptions::default())?;
        let y: Vec<f64> = test.y.iter().copied().collect();
        let m = mspe(&holdout, &y)?;
        let c = interval_coverage(&holdout, &y)?;
        (holdout, Some(m), Some(c))
    } else {
        (Vec::new(), None, None)
    };

    let cv = if cv_folds >= 2 {
        Some(cross_validate(&train, &spec, cv_folds, cv_seed)?)
    } else {
        None
    };

    let report = ModelReport {
        model: spec.name.clone(),
        params: summarize_draws(&draws)?,
        mspe: mspe_v,
        dic: Some(dic(&draws, &train)?.dic),
        kl: None,
        cv,
        coverage,
    };
    Ok(Evaluation {
        spec,
        draws,
        holdout,
        report,
    })
}
