use std::path::Path;

use coastal_kriging::covkernel::{build_cov, KernelParams};
use coastal_kriging::io::{build_dataset, read_coastline, read_observations, Frame, Transform};
use coastal_kriging::kriging::predict;
use coastal_kriging::modelcomp::{empirical_variogram, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC};
use coastal_kriging::simharness::{generate, Parametrization, SimConfig};
use coastal_kriging::{Design, DistanceMode, ModelSpec, PredictOptions};
use statrs::distribution::{ContinuousCDF, Normal};

/// Whitened by the true covariance at their own locations, generated
/// responses are i.i.d. standard normal: pooled over many seeds their mean,
/// variance and lag-one correlation match.
#[test]
fn generated_field_has_the_target_covariance() {
    let kernel = KernelParams::new(1.0, 1.0, 0.1).unwrap();
    let mut z = Vec::new();
    for seed in 0..200 {
        let cfg = SimConfig {
            seed,
            ..SimConfig::with_size(24)
        };
        let d = generate(&cfg).unwrap();
        let data = d.dataset(Parametrization::Exact);
        let cov = build_cov(&kernel, &data.distances(DistanceMode::Curve), true).unwrap();
        let w = cov.whiten(&data.y.add_scalar(-cfg.beta0));
        z.extend(w.iter().copied());
    }
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let lag1 = z.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1.0);
    assert!(mean.abs() < 4.0 / n.sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() < 4.0 * (2.0 / n).sqrt(), "var {var}");
    assert!(lag1.abs() < 4.0 / n.sqrt(), "lag-one {lag1}");

    // and the pooled values pass a normality check on their extremes
    let std = Normal::standard();
    let above = z.iter().filter(|&&v| v > 1.96).count() as f64 / n;
    assert!((above - (1.0 - std.cdf(1.96))).abs() < 0.01);
}

#[test]
fn white_noise_variogram_is_flat_at_the_nugget() {
    let cfg = SimConfig {
        sigma2: 0.0,
        tau2: 1.0,
        seed: 9,
        ..SimConfig::with_size(400)
    };
    let d = generate(&cfg).unwrap();
    let v = empirical_variogram(&d.dataset(Parametrization::Exact), DistanceMode::Curve, VARIOGRAM_BINS, VARIOGRAM_MAX_FRAC)
        .unwrap();
    for b in &v.bins {
        assert!((b.semivariance - 1.0).abs() < 0.2, "bin at {}: {}", b.mid, b.semivariance);
    }
    let sill = v.sigma2_hat + v.tau2_hat;
    assert!((sill - 1.0).abs() < 0.15, "sill {sill}");
    // a flat variogram cannot tell a nugget from a range below the first
    // lag, so only the fitted curve is checked: at the sill from the start
    let first = v.bins[0].mid;
    let fitted = v.tau2_hat + v.sigma2_hat * (1.0 - (-v.phi_hat * first).exp());
    assert!(fitted > 0.9 * sill, "fitted {fitted} at lag {first}, sill {sill}");
}

/// A conjugate fit with a tiny noise ratio nearly interpolates, so the
/// predictive distribution at an observed site covers the observation.
#[test]
fn conjugate_prediction_at_an_observed_site() {
    let fx = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let obs_path = fx.join("observations.csv");
    let obs = read_observations(&obs_path).unwrap();
    let frame = Frame::new(&read_coastline(&fx.join("coast.csv")).unwrap()).unwrap();
    let data = build_dataset(&obs, &frame, &Design::Intercept, Transform::Log, &obs_path).unwrap();
    assert_eq!(data.n(), 60);

    let spec = ModelSpec::conjugate("2b", DistanceMode::Curve, Design::Intercept, 1.0, 1e-3, 2000);
    let draws = spec.fit(&data, 4).unwrap();
    let targets: Vec<_> = [0, 17, 42].iter().map(|&i| data.target(i)).collect();
    let preds = predict(&draws, &data, &targets, 4, PredictOptions::default()).unwrap();
    for (p, &i) in preds.iter().zip(&[0, 17, 42]) {
        assert!((p.mean - data.y[i]).abs() < 2.0 * p.sd, "row {i}: {} vs {} (sd {})", p.mean, data.y[i], p.sd);
    }
}
