//! Full hierarchical fit by Metropolis-within-Gibbs on simulated ellipse data.
//!
//! ```text
//! cargo run --release --example mcmc_fit -- [seed]
//! ```

use coastal_kriging::inference::{effective_sample_size, run_mcmc};
use coastal_kriging::modelcomp::summarize_draws;
use coastal_kriging::simharness::{generate, Parametrization, SimConfig};
use coastal_kriging::{DistanceMode, McmcConfig, Priors};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let sim = SimConfig {
        seed,
        ..SimConfig::default()
    };
    let train = generate(&sim)?.train_set(Parametrization::Exact);
    let cfg = McmcConfig {
        rng_seed: seed,
        ..McmcConfig::default()
    };
    let draws = run_mcmc(&train, &Priors::default(), &cfg, DistanceMode::Curve)?;

    println!(
        "{} training points, {} retained draws; truth beta0 {}, sigma2 {}, tau2 {}, phi {}",
        train.n(),
        draws.len(),
        sim.beta0,
        sim.sigma2,
        sim.tau2,
        sim.phi
    );
    println!("{:<8} {:>8} {:>8} {:>8} {:>8}", "", "median", "2.5%", "97.5%", "ESS");
    for s in summarize_draws(&draws)? {
        let ess = effective_sample_size(&draws.series(&s.name).unwrap());
        println!("{:<8} {:>8.3} {:>8.3} {:>8.3} {:>8.0}", s.name, s.median, s.lo, s.hi, ess);
    }
    if let Some([a, b, c]) = draws.acceptance {
        println!("acceptance: log sigma2 {a:.2}, log tau2 {b:.2}, decay {c:.2}");
    }
    Ok(())
}
