use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{seeded_rng, PosteriorDraws};
use crate::covkernel::{build_cov, KernelParams};
use crate::data::Dataset;
use crate::error::{Error, Result};

/// Composition sampling of the latent field: one draw of
/// `omega | y, beta, sigma2, tau2, phi` per retained parameter draw.
///
/// The conditional is `N(K S^{-1} r, K - K S^{-1} K)` with `S = K + tau2 I`
/// and `r = y - X beta`. Draws use the pathwise form
/// `omega = w + K S^{-1} (r - w - e)` with `w ~ N(0, K)`, `e ~ N(0, tau2 I)`,
/// which needs no factorization of the (possibly singular) conditional
/// covariance.
pub fn sample_omega(
    draws: &PosteriorDraws,
    data: &Dataset,
    rng_seed: u64,
) -> Result<PosteriorDraws> {
    if draws.is_empty() {
        return Err(Error::EmptyDraws);
    }
    let dist = data.distances(draws.mode);
    let n = data.n();
    let mut rng = seeded_rng(rng_seed, 1);
    let mut omegas = Vec::with_capacity(draws.len());
    for d in &draws.draws {
        if d.beta.len() != data.p() {
            return Err(Error::DimensionMismatch {
                expected: data.p(),
                found: d.beta.len(),
            });
        }
        let kp = KernelParams::new(d.sigma2, d.phi, d.tau2)?;
        let k = build_cov(&kp, &dist, false)?;
        let s = build_cov(&kp, &dist, true)?;
        let r = &data.y - &data.x * &d.beta;
        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let w = k.lower() * z;
        let e = DVector::from_fn(n, |_, _| d.tau2.sqrt() * rng.sample::<f64, _>(StandardNormal));
        let omega = &w + k.matrix() * s.solve(&(&r - &w - e));
        omegas.push(omega);
    }
    Ok(PosteriorDraws {
        omega: Some(omegas),
        ..draws.clone()
    })
}
