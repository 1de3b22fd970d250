//! Empirical variogram of a simulated coastline field and the exponential
//! model fitted to it.
//!
//! ```text
//! cargo run --release --example variogram -- [seed]
//! ```

use coastal_kriging::modelcomp::{empirical_variogram, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC};
use coastal_kriging::simharness::{generate, Parametrization, SimConfig};
use coastal_kriging::DistanceMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let data = generate(&SimConfig {
        seed,
        ..SimConfig::default()
    })?;
    let train = data.train_set(Parametrization::Exact);
    for mode in [DistanceMode::Curve, DistanceMode::Euclidean] {
        let v = empirical_variogram(&train, mode, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC)?;
        println!("{} distance", mode.as_str());
        println!("{:>8} {:>12} {:>6} {:>10}", "lag", "semivar", "pairs", "fitted");
        for b in &v.bins {
            let fitted = v.tau2_hat + v.sigma2_hat * (1.0 - (-v.phi_hat * b.mid).exp());
            println!("{:>8.3} {:>12.4} {:>6} {:>10.4}", b.mid, b.semivariance, b.pairs, fitted);
        }
        println!(
            "nugget {:.3}, partial sill {:.3}, decay {:.3} (practical range {:.2})\n",
            v.tau2_hat,
            v.sigma2_hat,
            v.phi_hat,
            3.0 / v.phi_hat
        );
    }
    Ok(())
}
