use std::collections::BTreeSet;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::config::{FileConfig, HoldoutSize};
use super::{CompareArgs, FitArgs, McmcArgs, ModelChoice, PredictArgs, PriorArgs, SimulateArgs};
use crate::covkernel::DistanceMode;
use crate::data::{Dataset, Design, PredictionTarget};
use crate::error::{Error, Result};
use crate::inference::{derive_seed, seeded_rng, InverseGamma, McmcConfig, Priors, UniformPrior};
use crate::io::{
    build_dataset, polyline_hash, read_coastline, read_draws, read_locations, read_observations, write_draws,
    write_predictions, write_summary, DrawsMetadata, Frame, ObservationTable, Transform,
};
use crate::kriging::{path_targets, predict, PredictOptions, PredictiveKind};
use crate::model::{FitMethod, ModelSpec};
use crate::modelcomp::{evaluate, fold_assignment, ComparisonReport};
use crate::simharness::{run_study, write_outputs, SimConfig};

const DEFAULT_N_POINTS: usize = 100;
const DEFAULT_CV: usize = 10;
/// Stream of the random holdout split.
const HOLDOUT_STREAM: u64 = 5;

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("{flag} is required")))
}

fn mcmc_config(flags: &McmcArgs, file: &FileConfig) -> Result<(McmcConfig, usize)> {
    let d = McmcConfig::default();
    let n_iter = flags.iters.or(file.mcmc.iters).unwrap_or(d.n_iter);
    let cfg = McmcConfig {
        n_iter,
        n_burn: flags.burn.or(file.mcmc.burn).unwrap_or(n_iter / 2),
        thin: flags.thin.or(file.mcmc.thin).unwrap_or(d.thin),
        ..d
    };
    cfg.validate()?;
    let conj = flags.conjugate_draws.or(file.mcmc.conjugate_draws).unwrap_or(5000);
    if conj == 0 {
        return Err(Error::InvalidParameter("--conjugate-draws must be >= 1".into()));
    }
    Ok((cfg, conj))
}

fn pair(flag: &Option<Vec<f64>>, file: Option<[f64; 2]>) -> Option<[f64; 2]> {
    flag.as_ref().map(|v| [v[0], v[1]]).or(file)
}

fn priors(flags: &PriorArgs, file: &FileConfig) -> Result<Priors> {
    let mut p = Priors::default();
    if let Some([lo, hi]) = pair(&flags.phi_prior, file.priors.phi) {
        p.phi = UniformPrior::new(lo, hi)?;
    }
    if let Some([a, b]) = pair(&flags.sigma2_prior, file.priors.sigma2) {
        p.sigma2 = InverseGamma::new(a, b)?;
    }
    if let Some([a, b]) = pair(&flags.tau2_prior, file.priors.tau2) {
        p.tau2 = InverseGamma::new(a, b)?;
    }
    Ok(p)
}

fn seed(flag: Option<u64>, file: &FileConfig) -> u64 {
    flag.or(file.seed).unwrap_or(0)
}

fn transform(flag: bool, file: Option<bool>) -> Transform {
    if flag || file.unwrap_or(false) {
        Transform::Log
    } else {
        Transform::None
    }
}

fn base_design(covariates: Option<Vec<String>>) -> Design {
    match covariates {
        Some(c) if !c.is_empty() => Design::Columns(c),
        _ => Design::Intercept,
    }
}

fn model_spec(choice: ModelChoice, base: &Design, mcmc: &McmcConfig, conj: usize, priors: &Priors) -> ModelSpec {
    let (mode, design, method) = match choice {
        ModelChoice::FullMcmc => (DistanceMode::Curve, base.clone(), FitMethod::Mcmc(mcmc.clone())),
        ModelChoice::Conjugate => (DistanceMode::Curve, base.clone(), FitMethod::ConjugateVariogram { n_draws: conj }),
        ModelChoice::Euclidean => (
            DistanceMode::Euclidean,
            base.clone(),
            FitMethod::ConjugateVariogram { n_draws: conj },
        ),
        ModelChoice::Uk => {
            if base != &Design::Intercept {
                log::warn!("uk uses the coordinate trend; covariate columns are ignored");
            }
            (DistanceMode::Euclidean, Design::Coordinates, FitMethod::Mcmc(mcmc.clone()))
        }
    };
    ModelSpec {
        name: choice.name().into(),
        mode,
        design,
        priors: priors.clone(),
        method,
    }
}

fn load_inputs(obs: &Path, coast: &Path) -> Result<(ObservationTable, Frame)> {
    let table = read_observations(obs)?;
    let frame = Frame::new(&read_coastline(coast)?)?;
    Ok((table, frame))
}

pub fn cmd_simulate(args: &SimulateArgs, file: &FileConfig) -> Result<()> {
    let out = required(args.out.clone().or(file.simulate.out.clone()), "--out")?;
    let (mcmc, conj) = mcmc_config(&args.mcmc, file)?;
    let mut cfg = match args.n.or(file.simulate.n) {
        Some(n) => SimConfig::with_size(n),
        None => SimConfig::default(),
    };
    cfg.seed = seed(args.seed.seed, file);
    cfg.mcmc = mcmc;
    cfg.conjugate_draws = conj;
    cfg.cv_folds = args.cv.or(file.simulate.cv).unwrap_or(DEFAULT_CV);
    cfg.validate()?;
    let result = run_study(&cfg)?;
    write_outputs(&result, &out)?;
    print!("{}", result.report.to_text());
    Ok(())
}

pub fn cmd_fit(args: &FitArgs, file: &FileConfig) -> Result<()> {
    let f = &file.fit;
    let obs_path = required(args.input.observations.clone().or(f.observations.clone()), "--observations")?;
    let coast_path = required(args.input.coastline.clone().or(f.coastline.clone()), "--coastline")?;
    let out = required(args.out.clone().or(f.out.clone()), "--out")?;
    let choice = match (args.model, &f.model) {
        (Some(m), _) => m,
        (None, Some(s)) => ModelChoice::parse(s)?,
        (None, None) => ModelChoice::FullMcmc,
    };
    let (mcmc, conj) = mcmc_config(&args.mcmc, file)?;
    let priors = priors(&args.priors, file)?;
    let tf = transform(args.input.log_transform, f.log_transform);
    let base = base_design(args.input.covariates.clone().or(f.covariates.clone()));
    let spec = model_spec(choice, &base, &mcmc, conj, &priors);

    let (table, frame) = load_inputs(&obs_path, &coast_path)?;
    let data = build_dataset(&table, &frame, &spec.design, tf, &obs_path)?;
    let spec = spec.with_fixed_hyperparameters(&data)?;
    let draws = spec.fit(&data, seed(args.seed.seed, file))?;

    fs::create_dir_all(&out)?;
    let meta = DrawsMetadata {
        model: spec.name.clone(),
        mode: spec.mode,
        design: spec.design.clone(),
        transform: tf,
        polyline_hash: polyline_hash(&frame.polyline),
    };
    write_draws(&out.join("draws.csv"), &draws, &meta)?;
    write_summary(BufWriter::new(File::create(out.join("summary.csv"))?), &draws)?;
    write_summary(std::io::stdout().lock(), &draws)?;
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs, file: &FileConfig) -> Result<()> {
    let f = &file.predict;
    let draws_path = required(args.draws.clone().or(f.draws.clone()), "--draws")?;
    let obs_path = required(args.observations.clone().or(f.observations.clone()), "--observations")?;
    let coast_path = required(args.coastline.clone().or(f.coastline.clone()), "--coastline")?;
    let out = required(args.out.clone().or(f.out.clone()), "--out")?;
    let targets_path = args.targets.clone().or(if args.n_points.is_some() { None } else { f.targets.clone() });
    let n_points = match args.n_points {
        Some(n) => n as usize,
        None => f.n_points.unwrap_or(DEFAULT_N_POINTS),
    };
    if targets_path.is_none() && n_points < 2 {
        return Err(Error::InvalidParameter("--n-points must be at least 2".into()));
    }

    let (draws, meta) = read_draws(&draws_path)?;
    if let Some(d) = args.distance.as_ref().or(f.distance.as_ref()) {
        let expected: DistanceMode = d.parse()?;
        if expected != meta.mode {
            return Err(Error::Mismatch(format!(
                "draws were fitted with {} distance, {} requested",
                meta.mode.as_str(),
                expected.as_str()
            )));
        }
    }
    let (table, frame) = load_inputs(&obs_path, &coast_path)?;
    if polyline_hash(&frame.polyline) != meta.polyline_hash {
        return Err(Error::Mismatch("coastline differs from the one the draws were fitted with".into()));
    }
    let data = build_dataset(&table, &frame, &meta.design, meta.transform, &obs_path)?;
    if draws.n_coefficients() != data.p() {
        return Err(Error::DimensionMismatch {
            expected: data.p(),
            found: draws.n_coefficients(),
        });
    }

    let targets = match targets_path {
        Some(p) => {
            let (kind, coords) = read_locations(&p)?;
            if kind != frame.kind {
                return Err(Error::Mismatch(
                    "targets and coastline use different coordinate systems".into(),
                ));
            }
            let (t, points) = frame.locate(&coords);
            t.into_iter()
                .zip(points)
                .map(|(t0, point)| {
                    Ok(PredictionTarget {
                        t0,
                        x0: meta.design.row_at(&point)?,
                        point,
                    })
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => path_targets(&data, &frame.polyline, n_points)?,
    };
    let latent = args.latent || f.latent.unwrap_or(false);
    let opts = PredictOptions {
        kind: if latent { PredictiveKind::Latent } else { PredictiveKind::Response },
        keep_samples: false,
    };
    let preds = predict(&draws, &data, &targets, seed(args.seed.seed, file), opts)?;
    write_predictions(BufWriter::new(File::create(&out)?), &preds, meta.transform)?;
    log::info!("wrote {} predictions to {}", preds.len(), out.display());
    Ok(())
}

/// Sorted holdout rows.
fn holdout_rows(n: usize, size: Option<HoldoutSize>, ids: Option<Vec<usize>>, seed: u64) -> Result<Vec<usize>> {
    if let Some(ids) = ids {
        let set: BTreeSet<usize> = ids.iter().copied().collect();
        if set.len() != ids.len() {
            return Err(Error::InvalidParameter("duplicate holdout ids".into()));
        }
        if let Some(&bad) = set.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidParameter(format!("holdout id {bad} out of range ({n} rows)")));
        }
        if set.len() >= n {
            return Err(Error::InvalidParameter("holdout leaves no training rows".into()));
        }
        return Ok(set.into_iter().collect());
    }
    let h = match size {
        None => 0,
        Some(HoldoutSize::Count(h)) => h,
        Some(HoldoutSize::Fraction(f)) => (f * n as f64).round() as usize,
    };
    if h >= n {
        return Err(Error::InvalidParameter(format!(
            "holdout of {h} rows is larger than the dataset ({n} rows)"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut seeded_rng(seed, HOLDOUT_STREAM));
    let mut rows = idx[..h].to_vec();
    rows.sort_unstable();
    Ok(rows)
}

pub fn cmd_compare(args: &CompareArgs, file: &FileConfig) -> Result<()> {
    let f = &file.compare;
    let obs_path = required(args.input.observations.clone().or(f.observations.clone()), "--observations")?;
    let coast_path = required(args.input.coastline.clone().or(f.coastline.clone()), "--coastline")?;
    let out: PathBuf = required(args.out.clone().or(f.out.clone()), "--out")?;
    let choices = match (&args.models, &f.models) {
        (Some(m), _) => m.clone(),
        (None, Some(m)) => m.iter().map(|s| ModelChoice::parse(s)).collect::<Result<_>>()?,
        (None, None) => vec![ModelChoice::FullMcmc, ModelChoice::Conjugate, ModelChoice::Euclidean, ModelChoice::Uk],
    };
    if choices.iter().collect::<BTreeSet<_>>().len() != choices.len() || choices.is_empty() {
        return Err(Error::InvalidParameter("--models must list distinct models".into()));
    }
    let (mcmc, conj) = mcmc_config(&args.mcmc, file)?;
    let priors = priors(&args.priors, file)?;
    let tf = transform(args.input.log_transform, f.log_transform);
    let base = base_design(args.input.covariates.clone().or(f.covariates.clone()));
    let seed = seed(args.seed.seed, file);
    let cv = args.cv.or(f.cv).unwrap_or(DEFAULT_CV);

    let (table, frame) = load_inputs(&obs_path, &coast_path)?;
    let data = build_dataset(&table, &frame, &base, tf, &obs_path)?;
    let (size, ids) = match (args.holdout, &args.holdout_ids) {
        (Some(h), _) => (Some(h), None),
        (None, Some(ids)) => (None, Some(ids.clone())),
        (None, None) => (f.holdout, f.holdout_ids.clone()),
    };
    let test_rows = holdout_rows(data.n(), size, ids, seed)?;
    let train_rows: Vec<usize> = (0..data.n()).filter(|i| test_rows.binary_search(i).is_err()).collect();
    let (train, test): (Dataset, Dataset) = (data.subset(&train_rows), data.subset(&test_rows));
    if cv != 0 {
        // fail before any fitting
        fold_assignment(train.n(), cv, 0)?;
    }

    let specs: Vec<ModelSpec> = choices.iter().map(|&c| model_spec(c, &base, &mcmc, conj, &priors)).collect();
    let reports = specs
        .par_iter()
        .enumerate()
        .map(|(k, spec)| {
            let k = k as u64;
            evaluate(spec, &train, &test, cv, derive_seed(seed, k), derive_seed(seed, 100 + k)).map(|e| e.report)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ComparisonReport {
        models: reports,
        cv_folds: cv,
    };
    report.validate()?;

    fs::create_dir_all(&out)?;
    report.write_csv(BufWriter::new(File::create(out.join("report.csv"))?))?;
    let text = report.to_text();
    fs::write(out.join("report.txt"), &text)?;
    print!("{text}");
    Ok(())
}
