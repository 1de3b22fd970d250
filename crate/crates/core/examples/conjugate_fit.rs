//! Conjugate model with the decay and noise ratio held fixed: exact draws,
//! no Markov chain. Compares fixed values from the training variogram with a
//! hand-picked pair.
//!
//! ```text
//! cargo run --release --example conjugate_fit -- [seed]
//! ```

use coastal_kriging::inference::{conjugate_posterior, run_conjugate, ConjugateConfig};
use coastal_kriging::model::variogram_hyperparameters;
use coastal_kriging::modelcomp::summarize_draws;
use coastal_kriging::simharness::{generate, Parametrization, SimConfig};
use coastal_kriging::{DistanceMode, Priors};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let train = generate(&SimConfig {
        seed,
        ..SimConfig::default()
    })?
    .train_set(Parametrization::Exact);
    let priors = Priors::default();

    let from_variogram = variogram_hyperparameters(&train, DistanceMode::Curve)?;
    for (label, (phi, alpha)) in [("variogram", from_variogram), ("fixed", (1.07, 0.25))] {
        let post = conjugate_posterior(&train, DistanceMode::Curve, phi, alpha, &priors)?;
        println!(
            "{label}: phi {phi:.3}, alpha {alpha:.3} -> sigma2 ~ IG({:.1}, {:.3}), beta0 | sigma2 ~ N({:.3}, sigma2 * {:.4})",
            post.shape, post.scale, post.mean[0], post.cov[(0, 0)]
        );
        let cfg = ConjugateConfig {
            phi_fixed: phi,
            alpha_fixed: alpha,
            n_draws: 5000,
            rng_seed: seed,
        };
        for s in summarize_draws(&run_conjugate(&train, &cfg, &priors, DistanceMode::Curve)?)? {
            if !s.fixed {
                println!("  {:<7} {:.3} ({:.3}, {:.3})", s.name, s.median, s.lo, s.hi);
            }
        }
    }
    Ok(())
}
