use crate::covkernel::DistanceMode;
use crate::data::Dataset;
use crate::error::{Error, Result};

pub const VARIOGRAM_BINS: usize = 15;
/// Maximum lag as a fraction of the largest pairwise distance.
pub const VARIOGRAM_MAX_FRAC: f64 = 0.5;

const PHI_GRID: usize = 240;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariogramBin {
    pub mid: f64,
    pub semivariance: f64,
    pub pairs: usize,
}

/// Binned Matheron semivariogram and its weighted least-squares exponential
/// fit `gamma(h) = tau2 + sigma2 (1 - exp(-phi h))`.
#[derive(Debug, Clone, PartialEq)]
pub struct VariogramEstimate {
    pub bins: Vec<VariogramBin>,
    pub sigma2_hat: f64,
    pub phi_hat: f64,
    pub tau2_hat: f64,
}

/// Empirical semivariogram of OLS residuals with `n_bins` equal-width bins
/// up to `max_dist_frac` times the largest pairwise distance. Empty bins are
/// omitted.
pub fn empirical_variogram(
    data: &Dataset,
    mode: DistanceMode,
    n_bins: usize,
    max_dist_frac: f64,
) -> Result<VariogramEstimate> {
    let n = data.n();
    if n < 10 {
        return Err(Error::InsufficientData(format!(
            "variogram needs at least 10 observations, got {n}"
        )));
    }
    if n_bins == 0 || !(max_dist_frac > 0.0 && max_dist_frac <= 1.0) {
        return Err(Error::InvalidParameter(
            "variogram needs n_bins >= 1 and 0 < max_dist_frac <= 1".into(),
        ));
    }
    let beta = data.ols()?;
    let resid = &data.y - &data.x * beta;
    let dist = data.distances(mode);
    let max_dist = max_dist_frac * dist.max();
    if !(max_dist > 0.0) {
        return Err(Error::InsufficientData("all locations coincide".into()));
    }
    let width = max_dist / n_bins as f64;
    let mut sums = vec![0.0; n_bins];
    let mut counts = vec![0usize; n_bins];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = dist[(i, j)];
            if d > max_dist {
                continue;
            }
            let b = ((d / width) as usize).min(n_bins - 1);
            sums[b] += (resid[i] - resid[j]).powi(2);
            counts[b] += 1;
        }
    }
    let bins: Vec<VariogramBin> = (0..n_bins)
        .filter(|&b| counts[b] > 0)
        .map(|b| VariogramBin {
            mid: (b as f64 + 0.5) * width,
            semivariance: sums[b] / (2.0 * counts[b] as f64),
            pairs: counts[b],
        })
        .collect();
    if bins.len() < 3 {
        return Err(Error::InsufficientData(
            "too few populated variogram bins to fit a model".into(),
        ));
    }
    let (tau2_hat, sigma2_hat, phi_hat) = fit_exponential(&bins);
    Ok(VariogramEstimate {
        bins,
        sigma2_hat,
        phi_hat,
        tau2_hat,
    })
}

/// Weighted sum of squares and nonnegative (nugget, partial sill) for a fixed
/// decay.
fn fit_linear(bins: &[VariogramBin], phi: f64) -> (f64, f64, f64) {
    let f: Vec<f64> = bins.iter().map(|b| 1.0 - (-phi * b.mid).exp()).collect();
    let sse = |tau2: f64, sigma2: f64| -> f64 {
        bins.iter()
            .zip(&f)
            .map(|(b, fi)| b.pairs as f64 * (b.semivariance - tau2 - sigma2 * fi).powi(2))
            .sum()
    };
    let (mut sw, mut sf, mut sff, mut sg, mut sfg) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (b, fi) in bins.iter().zip(&f) {
        let w = b.pairs as f64;
        sw += w;
        sf += w * fi;
        sff += w * fi * fi;
        sg += w * b.semivariance;
        sfg += w * fi * b.semivariance;
    }
    let mut candidates = Vec::with_capacity(3);
    let det = sw * sff - sf * sf;
    if det > 1e-12 * sw * sff {
        let tau2 = (sff * sg - sf * sfg) / det;
        let sigma2 = (sw * sfg - sf * sg) / det;
        if tau2 >= 0.0 && sigma2 >= 0.0 {
            candidates.push((tau2, sigma2));
        }
    }
    // boundary solutions
    candidates.push((0.0, (sfg / sff).max(0.0)));
    candidates.push(((sg / sw).max(0.0), 0.0));
    candidates
        .into_iter()
        .map(|(t, s)| (sse(t, s), t, s))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("nonempty candidates")
}

/// Grid search over the decay on a log scale, refined by golden section.
///
/// The decay is bounded so the practical range `3 / phi` lies between the
/// first bin midpoint and ten times the largest lag.
fn fit_exponential(bins: &[VariogramBin]) -> (f64, f64, f64) {
    let h_min = bins.first().expect("bins").mid;
    let h_max = bins.last().expect("bins").mid;
    let (lo, hi) = ((3.0 / (10.0 * h_max)).ln(), (3.0 / h_min).ln());
    let objective = |log_phi: f64| fit_linear(bins, log_phi.exp()).0;
    let step = (hi - lo) / (PHI_GRID - 1) as f64;
    let best = (0..PHI_GRID)
        .map(|i| lo + step * i as f64)
        .min_by(|a, b| objective(*a).total_cmp(&objective(*b)))
        .expect("grid");
    // golden section on the bracketing cell
    let (mut a, mut b) = ((best - step).max(lo), (best + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if objective(c) <= objective(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let log_phi = if objective(0.5 * (a + b)) <= objective(best) {
        0.5 * (a + b)
    } else {
        best
    };
    let phi = log_phi.exp();
    let (_, tau2, sigma2) = fit_linear(bins, phi);
    (tau2, sigma2, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvegeom::PlanePoint;
    use crate::data::Design;

    fn dataset(t: Vec<f64>, y: Vec<f64>) -> Dataset {
        let pts = t.iter().map(|&v| PlanePoint::new(v, 0.0)).collect();
        Dataset::from_design(t, pts, y, Design::Intercept).unwrap()
    }

    #[test]
    fn constant_response_has_zero_semivariance() {
        let t: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let v = empirical_variogram(&dataset(t, vec![2.5; 20]), DistanceMode::Curve, 15, 0.5).unwrap();
        assert!(v.bins.iter().all(|b| b.semivariance == 0.0 && b.pairs >= 1));
        assert_eq!(v.sigma2_hat, 0.0);
        assert_eq!(v.tau2_hat, 0.0);
    }

    #[test]
    fn too_few_observations() {
        let t: Vec<f64> = (0..9).map(|i| i as f64).collect();
        assert!(matches!(
            empirical_variogram(&dataset(t, vec![1.0; 9]), DistanceMode::Curve, 15, 0.5),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn fit_recovers_noise_free_model() {
        let bins: Vec<VariogramBin> = (0..15)
            .map(|i| {
                let h = 0.1 + 0.2 * i as f64;
                VariogramBin {
                    mid: h,
                    semivariance: 0.2 + 1.5 * (1.0 - (-0.8 * h).exp()),
                    pairs: 10 + i,
                }
            })
            .collect();
        let (tau2, sigma2, phi) = fit_exponential(&bins);
        assert!((tau2 - 0.2).abs() < 1e-6, "{tau2}");
        assert!((sigma2 - 1.5).abs() < 1e-6, "{sigma2}");
        assert!((phi - 0.8).abs() < 1e-6, "{phi}");
    }
}
