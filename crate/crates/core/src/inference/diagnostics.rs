/// Effective sample size by Geyer's initial positive sequence estimator.
pub fn effective_sample_size(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return n as f64;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0 = centered.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return n as f64;
    }
    let acf = |lag: usize| -> f64 {
        centered[..n - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / (n as f64 * c0)
    };
    let mut tau = -1.0;
    let mut lag = 0;
    while lag + 1 < n {
        let pair = acf(lag) + acf(lag + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        lag += 2;
    }
    (n as f64 / tau.max(1.0 / n as f64)).min(n as f64)
}

/// Monte Carlo standard error of the sample mean, accounting for
/// autocorrelation.
pub fn monte_carlo_se(series: &[f64]) -> f64 {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (var / effective_sample_size(series)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn iid_series_has_full_ess() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
        let ess = effective_sample_size(&x);
        assert!(ess > 4000.0, "ess {ess}");
    }

    #[test]
    fn ar1_series_has_reduced_ess() {
        // AR(1) with rho = 0.9: ESS ~ n (1 - rho) / (1 + rho)
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut v = 0.0;
        let x: Vec<f64> = (0..20000)
            .map(|_| {
                v = 0.9 * v + rng.random::<f64>() - 0.5;
                v
            })
            .collect();
        let ess = effective_sample_size(&x);
        let expect = 20000.0 * 0.1 / 1.9;
        assert!((ess / expect - 1.0).abs() < 0.3, "ess {ess} vs {expect}");
    }
}
