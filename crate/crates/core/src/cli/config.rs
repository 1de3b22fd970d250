//! TOML run configuration. Every key is optional; command-line flags take
//! precedence over the file, which takes precedence over built-in defaults.
//!
//! ```toml
//! seed = 7
//!
//! [mcmc]
//! iters = 10000
//! burn = 5000
//! thin = 1
//! conjugate_draws = 5000
//!
//! [priors]
//! phi = [0.8, 30.0]      # uniform bounds
//! sigma2 = [2.0, 2.0]    # inverse-gamma shape, scale
//! tau2 = [2.0, 2.0]
//!
//! [simulate]
//! out = "sim"
//! n = 100
//! cv = 10
//!
//! [fit]
//! observations = "obs.csv"
//! coastline = "coast.csv"
//! model = "full-mcmc"
//! log_transform = true
//! covariates = ["depth"]
//! out = "fit"
//!
//! [predict]
//! draws = "fit/draws.csv"
//! observations = "obs.csv"
//! coastline = "coast.csv"
//! n_points = 100          # or: targets = "targets.csv"
//! latent = false
//! out = "pred.csv"
//!
//! [compare]
//! observations = "obs.csv"
//! coastline = "coast.csv"
//! models = ["full-mcmc", "conjugate", "euclidean", "uk"]
//! holdout = 12            # count, or a fraction such as 0.2
//! cv = 10
//! out = "cmp"
//! ```
//!
//! Paths are taken relative to the working directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub mcmc: McmcSection,
    #[serde(default)]
    pub priors: PriorSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub predict: PredictSection,
    #[serde(default)]
    pub compare: CompareSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McmcSection {
    pub iters: Option<usize>,
    pub burn: Option<usize>,
    pub thin: Option<usize>,
    pub conjugate_draws: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSection {
    pub phi: Option<[f64; 2]>,
    pub sigma2: Option<[f64; 2]>,
    pub tau2: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub out: Option<PathBuf>,
    pub n: Option<usize>,
    pub cv: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub observations: Option<PathBuf>,
    pub coastline: Option<PathBuf>,
    pub model: Option<String>,
    pub log_transform: Option<bool>,
    pub covariates: Option<Vec<String>>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredictSection {
    pub draws: Option<PathBuf>,
    pub observations: Option<PathBuf>,
    pub coastline: Option<PathBuf>,
    pub n_points: Option<usize>,
    pub targets: Option<PathBuf>,
    pub distance: Option<String>,
    pub latent: Option<bool>,
    pub out: Option<PathBuf>,
}

/// Holdout as a row count or a fraction of the rows.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum HoldoutSize {
    Count(usize),
    Fraction(f64),
}

impl std::str::FromStr for HoldoutSize {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if let Ok(n) = s.parse::<usize>() {
            return Ok(HoldoutSize::Count(n));
        }
        match s.parse::<f64>() {
            Ok(f) if f > 0.0 && f < 1.0 => Ok(HoldoutSize::Fraction(f)),
            _ => Err(format!("'{s}' is neither a row count nor a fraction in (0, 1)")),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub observations: Option<PathBuf>,
    pub coastline: Option<PathBuf>,
    pub models: Option<Vec<String>>,
    pub log_transform: Option<bool>,
    pub covariates: Option<Vec<String>>,
    pub holdout: Option<HoldoutSize>,
    pub holdout_ids: Option<Vec<usize>>,
    pub cv: Option<usize>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() as u64 + 1);
            Error::Parse {
                path: path.display().to_string(),
                line,
                message: e.message().to_string(),
            }
        })
    }
}
