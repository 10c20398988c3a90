//! Exact simulation of Upsilon variates and reproducible random streams.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::distribution::UpsilonParams;

/// Generator for stream `stream` of base seed `seed`. Distinct streams are
/// independent, so work split across threads by stream index reproduces the
/// serial result.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact sampler for an Upsilon law, `Σ_j t_j·√(χ²_j/ν_j) + Z`.
#[derive(Debug, Clone)]
pub struct UpsilonSampler {
    summands: Vec<(f64, ChiSquared<f64>)>,
}

impl UpsilonSampler {
    pub fn new<T: Real>(params: &UpsilonParams<T>) -> Result<Self> {
        let summands = params
            .coef()
            .iter()
            .zip(params.dof())
            .map(|(&c, &nu)| {
                let nu = nu.as_f64();
                let chi = ChiSquared::new(nu)
                    .map_err(|e| Error::Domain(format!("chi-square with dof {nu}: {e}")))?;
                Ok((c.as_f64() / nu.sqrt(), chi))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { summands })
    }
}

impl Distribution<f64> for UpsilonSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.summands
            .iter()
            .fold(z, |acc, (scale, chi)| acc + scale * chi.sample(rng).sqrt())
    }
}

/// `n` exact draws from the Upsilon law.
pub fn sample_upsilon<T: Real, R: Rng + ?Sized>(
    params: &UpsilonParams<T>,
    rng: &mut R,
    n: usize,
) -> Result<Vec<T>> {
    let sampler = UpsilonSampler::new(params)?;
    Ok((0..n).map(|_| T::lit(sampler.sample(rng))).collect())
}
