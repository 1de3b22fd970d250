use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::inference::{derive_seed, seeded_rng};
use crate::kriging::{predict, PredictOptions};
use crate::model::ModelSpec;

/// Held-out indices of each of `k` folds from a seeded random permutation.
/// Fold sizes differ by at most one.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("cross-validation needs k >= 2, got {k}")));
    }
    if n < k {
        return Err(Error::InvalidParameter(format!(
            "k exceeds usable rows ({k} folds, {n} rows)"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seeded_rng(seed, 3));
    let mut folds = vec![Vec::new(); k];
    for (pos, i) in perm.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Seed used for fitting and predicting fold `fold`.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    derive_seed(seed, 1000 + fold as u64)
}

/// Squared errors of fold `fold`: fit on the rest, predict the held-out rows.
pub fn fold_squared_errors(data: &Dataset, spec: &ModelSpec, held_out: &[usize], seed: u64) -> Result<Vec<f64>> {
    let train: Vec<usize> = (0..data.n()).filter(|i| held_out.binary_search(i).is_err()).collect();
    if train.is_empty() {
        return Err(Error::InsufficientData("fold with zero training points".into()));
    }
    let prepared = spec.prepare(data)?;
    let train_data = prepared.subset(&train);
    let draws = spec.fit(&train_data, seed)?;
    let targets: Vec<_> = held_out.iter().map(|&i| prepared.target(i)).collect();
    let pred = predict(&draws, &train_data, &targets, seed, PredictOptions::default())?;
    Ok(pred
        .iter()
        .zip(held_out)
        .map(|(p, &i)| (p.mean - data.y[i]).powi(2))
        .collect())
}

/// k-fold cross-validated mean squared prediction error. MCMC models run a
/// ten-fold shortened chain per fold. Folds run in parallel.
pub fn cross_validate(data: &Dataset, spec: &ModelSpec, k: usize, rng_seed: u64) -> Result<f64> {
    let folds = fold_assignment(data.n(), k, rng_seed)?;
    let spec = spec.for_cross_validation();
    let errors = folds
        .par_iter()
        .enumerate()
        .map(|(f, held)| fold_squared_errors(data, &spec, held, fold_seed(rng_seed, f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(errors.iter().flatten().sum::<f64>() / data.n() as f64)
}
