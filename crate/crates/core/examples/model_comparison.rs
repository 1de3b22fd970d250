//! Coastal against Euclidean models on one dataset: holdout MSPE and
//! coverage, DIC and 10-fold cross-validation, as `coastkrig compare` does.
//!
//! ```text
//! cargo run --release --example model_comparison
//! ```

use std::path::Path;

use coastal_kriging::inference::derive_seed;
use coastal_kriging::io::{build_dataset, read_coastline, read_observations, Frame, Transform};
use coastal_kriging::model::FitMethod;
use coastal_kriging::modelcomp::{evaluate, ComparisonReport};
use coastal_kriging::{Design, DistanceMode, McmcConfig, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let obs_path = fixtures.join("observations.csv");
    let obs = read_observations(&obs_path)?;
    let frame = Frame::new(&read_coastline(&fixtures.join("coast.csv"))?)?;
    let data = build_dataset(&obs, &frame, &Design::Intercept, Transform::Log, &obs_path)?;

    // every fifth row held out
    let (test_rows, train_rows): (Vec<usize>, Vec<usize>) = (0..data.n()).partition(|i| i % 5 == 2);
    let (train, test) = (data.subset(&train_rows), data.subset(&test_rows));

    let conj = |name: &str, mode| ModelSpec {
        method: FitMethod::ConjugateVariogram { n_draws: 5000 },
        ..ModelSpec::mcmc(name, mode, Design::Intercept, McmcConfig::default())
    };
    let specs = [
        ModelSpec::mcmc("1b", DistanceMode::Curve, Design::Intercept, McmcConfig::default()),
        conj("2b", DistanceMode::Curve),
        conj("sk", DistanceMode::Euclidean),
        ModelSpec::mcmc("uk", DistanceMode::Euclidean, Design::Coordinates, McmcConfig::default()),
    ];
    let mut report = ComparisonReport {
        models: Vec::new(),
        cv_folds: 10,
    };
    for (k, spec) in specs.iter().enumerate() {
        let k = k as u64;
        let ev = evaluate(spec, &train, &test, 10, derive_seed(7, k), derive_seed(7, 100 + k))?;
        report.models.push(ev.report);
    }
    println!("{} training and {} holdout rows (log scale)\n", train.n(), test.n());
    print!("{}", report.to_text());
    Ok(())
}
