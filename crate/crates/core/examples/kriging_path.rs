//! Posterior predictive surface along a digitized coastline: fit on the log
//! scale, interpolate 100 equally spaced points and report them on the
//! original scale.
//!
//! ```text
//! cargo run --release --example kriging_path
//! ```

use std::path::Path;

use coastal_kriging::io::{build_dataset, read_coastline, read_observations, Frame, Transform};
use coastal_kriging::kriging::interpolate_path;
use coastal_kriging::{Design, DistanceMode, McmcConfig, ModelSpec, PredictOptions, PredictiveKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let obs_path = fixtures.join("observations.csv");
    let obs = read_observations(&obs_path)?;
    let frame = Frame::new(&read_coastline(&fixtures.join("coast.csv"))?)?;
    let data = build_dataset(&obs, &frame, &Design::Intercept, Transform::Log, &obs_path)?;

    let spec = ModelSpec::mcmc("1b", DistanceMode::Curve, Design::Intercept, McmcConfig::default());
    let draws = spec.fit(&data, 1)?;
    let opts = PredictOptions {
        kind: PredictiveKind::Latent,
        keep_samples: false,
    };
    let path = interpolate_path(&draws, &data, &frame.polyline, 100, 1, opts)?;

    println!("{} observations on a {:.2} km coastline", data.n(), frame.polyline.total_length());
    println!("{:>7} {:>9} {:>9} {:>9}", "t (km)", "median", "2.5%", "97.5%");
    for p in path.iter().step_by(9) {
        // quantiles map through exp; the mean does not
        println!("{:>7.2} {:>9.2} {:>9.2} {:>9.2}", p.t0, p.q500.exp(), p.q025.exp(), p.q975.exp());
    }
    Ok(())
}
