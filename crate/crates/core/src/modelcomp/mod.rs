//! Model assessment: empirical variogram, MSPE, KL divergence against a
//! known generator, DIC and k-fold cross-validation.

mod cv;
mod evaluate;
mod metrics;
mod report;
mod variogram;

pub use cv::{cross_validate, fold_assignment, fold_seed, fold_squared_errors};
pub use evaluate::{evaluate, Evaluation};
pub use metrics::{deviance, dic, interval_coverage, kl_divergence_mvn, mspe, Dic};
pub use report::{summarize_draws, ComparisonReport, ModelReport, ParamSummary};
pub use variogram::{
    empirical_variogram, VariogramBin, VariogramEstimate, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC,
};
