//! Bayesian kriging for measurements taken along a coastline.
//!
//! Locations live on a one-dimensional curve and the spatial covariance
//! depends on distance travelled along that curve rather than straight-line
//! distance, so two points on opposite sides of a bay are not treated as
//! neighbours.
//!
//! The crate is organised as a pipeline:
//!
//! * [`curvegeom`]: arc length on parametric curves and polylines, projection
//!   of observations onto a digitized coastline.
//! * [`covkernel`]: exponential covariance with a nugget and cached Cholesky
//!   factors.
//! * [`inference`]: the full hierarchical model by Metropolis-within-Gibbs and
//!   the conjugate model with fixed decay and noise ratio.
//! * [`kriging`]: posterior predictive distribution at new curve points.
//! * [`modelcomp`]: variogram, MSPE, DIC, KL divergence, cross-validation.
//! * [`simharness`]: the ellipse simulation study comparing coastal models
//!   with Euclidean simple and universal kriging.
//!
//! Runnable walkthroughs live in `examples/`; `coastkrig` wraps the same
//! pipeline for CSV inputs.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod covkernel;
pub mod curvegeom;
pub mod data;
pub mod error;
pub mod inference;
pub mod io;
pub mod kriging;
pub mod model;
pub mod modelcomp;
pub mod simharness;

pub use covkernel::{DistanceMode, KernelParams};
pub use curvegeom::{ParametricCurve, PlanePoint, Polyline};
pub use data::{Dataset, Design, PredictionTarget};
pub use error::{Error, Result};
pub use inference::{McmcConfig, PosteriorDraws, Priors};
pub use kriging::{PredictOptions, PredictionResult, PredictiveKind};
pub use model::{FitMethod, ModelSpec};
