//! Conjugate Normal-Inverse-Gamma inference on signal-noise ratios.
//!
//! Prior and posterior are `σ² ~ IG(m/2, m·σ²₀/2)`, `μ | σ² ~ N(μ₀, σ²/n)`
//! (or `β | σ² ~ N(β₀, σ²Λ⁻¹)` for factor models). Marginalizing `σ²`
//! leaves an Upsilon law on the scaled signal-noise ratio.

use serde::{Deserialize, Serialize};

use crate::distribution::{check_probability, ApproxOrder, UpsilonApprox, UpsilonParams};
use crate::error::{domain, Error, Result};
use crate::estimate::{mean_sd, ols_fit, FactorSample, ReturnsSample};
use crate::frequentist::{FutureSrLaw, Interval};
use crate::linalg::{dot, Cholesky, Matrix, RANK_TOLERANCE};
use crate::scalar::Real;

/// Hyperparameters `(μ, n, σ², m)` of a Normal-Inverse-Gamma law. `n` is the
/// location pseudo-count and `m` the variance degrees of freedom; `n = m = 0`
/// is the noninformative prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NigHyper<T> {
    pub mu: T,
    pub n: T,
    pub sigsq: T,
    pub m: T,
}

impl<T: Real> NigHyper<T> {
    pub fn new(mu: T, n: T, sigsq: T, m: T) -> Result<Self> {
        let h = Self { mu, n, sigsq, m };
        h.validate()?;
        Ok(h)
    }

    pub fn noninformative() -> Self {
        Self {
            mu: T::zero(),
            n: T::zero(),
            sigsq: T::zero(),
            m: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.mu, self.n, self.sigsq, self.m].iter().any(|v| !v.is_finite()) {
            return domain("hyperparameters must be finite");
        }
        if self.n < T::zero() || self.m < T::zero() || self.sigsq < T::zero() {
            return domain(format!(
                "need n, m, σ² ≥ 0, got n = {}, m = {}, σ² = {}",
                self.n, self.m, self.sigsq
            ));
        }
        if self.m > T::zero() && self.sigsq == T::zero() {
            return domain("σ² must be positive when m > 0");
        }
        Ok(())
    }

    /// Posterior `ζ = μ/σ`.
    pub fn snr(&self) -> Result<T> {
        self.require_proper()?;
        Ok(self.mu / self.sigsq.sqrt())
    }

    fn require_proper(&self) -> Result<()> {
        if self.n > T::zero() && self.m > T::zero() && self.sigsq > T::zero() {
            Ok(())
        } else {
            Err(Error::ImproperPosterior(format!(
                "need n, m, σ² > 0 for a proper marginal, got n = {}, m = {}, σ² = {}",
                self.n, self.m, self.sigsq
            )))
        }
    }
}

/// Sample mean (of excess returns), Bessel-corrected sd and count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleStats<T> {
    pub mean: T,
    pub sd: T,
    pub n: usize,
}

impl<T: Real> SampleStats<T> {
    pub fn new(mean: T, sd: T, n: usize) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite() && sd >= T::zero()) {
            return domain("sample mean and sd must be finite with sd ≥ 0");
        }
        Ok(Self { mean, sd, n })
    }

    pub fn empty() -> Self {
        Self {
            mean: T::zero(),
            sd: T::zero(),
            n: 0,
        }
    }

    /// Statistics of `returns − rfr`.
    pub fn from_returns(sample: &ReturnsSample<T>) -> Result<Self> {
        let (mean, sd) = mean_sd(sample.returns())?;
        Self::new(mean - sample.rfr(), sd, sample.returns().len())
    }
}

/// Conjugate update of a Normal-Inverse-Gamma law on `n` observations.
pub fn update_nig<T: Real>(prior: &NigHyper<T>, s: &SampleStats<T>) -> Result<NigHyper<T>> {
    prior.validate()?;
    if s.n == 0 {
        return Ok(*prior);
    }
    let n = T::from_count(s.n);
    let n1 = prior.n + n;
    let m1 = prior.m + n;
    let mu1 = (prior.n * prior.mu + n * s.mean) / n1;
    let dev = prior.mu - s.mean;
    let ss = prior.m * prior.sigsq
        + (n - T::one()) * s.sd * s.sd
        + prior.n * n / n1 * dev * dev;
    NigHyper::new(mu1, n1, ss / m1, m1)
}

/// The same law parametrized by `ζ = μ/σ` instead of `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrHyper<T> {
    pub snr: T,
    pub n: T,
    pub sigsq: T,
    pub m: T,
}

impl<T: Real> SnrHyper<T> {
    /// `μ = 0` maps to `ζ = 0` even when `σ² = 0`.
    pub fn from_nig(h: &NigHyper<T>) -> Result<Self> {
        h.validate()?;
        let snr = if h.mu == T::zero() {
            T::zero()
        } else if h.sigsq > T::zero() {
            h.mu / h.sigsq.sqrt()
        } else {
            return Err(Error::ImproperPosterior("ζ undefined with σ² = 0 and μ ≠ 0".into()));
        };
        Ok(Self {
            snr,
            n: h.n,
            sigsq: h.sigsq,
            m: h.m,
        })
    }

    pub fn to_nig(&self) -> Result<NigHyper<T>> {
        NigHyper::new(self.snr * self.sigsq.sqrt(), self.n, self.sigsq, self.m)
    }
}

/// Conjugate update written in signal-noise form. The variance update comes
/// first, then `ζ₁ = (n₀ζ₀σ₀ + nζ̂σ̂)/(n₁σ₁)`.
pub fn update_snr<T: Real>(prior: &SnrHyper<T>, sr: T, sd: T, n: usize) -> Result<SnrHyper<T>> {
    if n == 0 {
        return Ok(*prior);
    }
    let nt = T::from_count(n);
    let n1 = prior.n + nt;
    let m1 = prior.m + nt;
    let sig0 = prior.sigsq.sqrt();
    let dev = prior.snr * sig0 - sr * sd;
    let sigsq1 = (prior.m * prior.sigsq
        + (nt - T::one()) * sd * sd
        + prior.n * nt / n1 * dev * dev)
        / m1;
    let snr1 = (prior.n * prior.snr * sig0 + nt * sr * sd) / (n1 * sigsq1.sqrt());
    Ok(SnrHyper {
        snr: snr1,
        n: n1,
        sigsq: sigsq1,
        m: m1,
    })
}

/// Marginal law of a scaled signal-noise ratio: `scale·ζ ~ Υ(params)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalSnr<T> {
    pub params: UpsilonParams<T>,
    pub scale: T,
}

impl<T: Real> MarginalSnr<T> {
    /// Equal-tailed `1 − α` interval on `ζ`.
    pub fn credible_interval(&self, alpha: T, order: ApproxOrder) -> Result<Interval<T>> {
        check_probability(alpha)?;
        let law = UpsilonApprox::new(&self.params, order)?;
        let half = T::lit(0.5);
        Ok(Interval {
            lo: law.quantile(half * alpha)? / self.scale,
            hi: law.quantile(T::one() - half * alpha)? / self.scale,
        })
    }

    /// Posterior `P(ζ ≤ x)`.
    pub fn cdf(&self, x: T, order: ApproxOrder) -> Result<T> {
        Ok(UpsilonApprox::new(&self.params, order)?.cdf(self.scale * x))
    }
}

/// `√n·ζ ~ Υ((√n·ζ₁), (m))` with `ζ₁ = μ/σ`.
pub fn marginal_snr_params<T: Real>(h: &NigHyper<T>) -> Result<MarginalSnr<T>> {
    let snr = h.snr()?;
    let scale = h.n.sqrt();
    Ok(MarginalSnr {
        params: UpsilonParams::new(vec![scale * snr], vec![h.m])?,
        scale,
    })
}

pub fn credible_interval<T: Real>(h: &NigHyper<T>, alpha: T, order: ApproxOrder) -> Result<Interval<T>> {
    marginal_snr_params(h)?.credible_interval(alpha, order)
}

/// `1 − α` interval for the Sharpe ratio of `n2` future observations under
/// the posterior predictive.
pub fn posterior_prediction_interval<T: Real>(
    h: &NigHyper<T>,
    n2: usize,
    alpha: T,
    order: ApproxOrder,
) -> Result<Interval<T>> {
    let snr = h.snr()?;
    let law = FutureSrLaw::new(snr, h.n, n2, h.m, order)?;
    let width = (h.n.recip() + T::from_count(n2).recip()).sqrt();
    law.interval(alpha, snr, width)
}

/// Hyperparameters `(β, Λ, σ², m)` of the conjugate regression law, with
/// `Λ` a precision-like matrix: `β | σ² ~ N(β, σ²Λ⁻¹)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionHyper<T> {
    pub beta: Vec<T>,
    pub lambda: Matrix<T>,
    pub sigsq: T,
    pub m: T,
}

impl<T: Real> RegressionHyper<T> {
    pub fn new(beta: Vec<T>, lambda: Matrix<T>, sigsq: T, m: T) -> Result<Self> {
        let h = Self {
            beta,
            lambda,
            sigsq,
            m,
        };
        h.validate()?;
        Ok(h)
    }

    /// `Λ = 0, β = 0, σ² = 0, m = 0`.
    pub fn noninformative(p: usize) -> Self {
        Self {
            beta: vec![T::zero(); p],
            lambda: Matrix::zeros(p, p),
            sigsq: T::zero(),
            m: T::zero(),
        }
    }

    /// Intercept-only regression law equivalent to a location law.
    pub fn from_nig(h: &NigHyper<T>) -> Self {
        Self {
            beta: vec![h.mu],
            lambda: Matrix::from_rows(&[vec![h.n]]).expect("1x1"),
            sigsq: h.sigsq,
            m: h.m,
        }
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.beta.len();
        if p == 0 || self.lambda.rows() != p || self.lambda.cols() != p {
            return domain(format!(
                "β has length {p} but Λ is {}×{}",
                self.lambda.rows(),
                self.lambda.cols()
            ));
        }
        if self.beta.iter().any(|b| !b.is_finite()) || !self.sigsq.is_finite() || !self.m.is_finite() {
            return domain("hyperparameters must be finite");
        }
        if self.m < T::zero() || self.sigsq < T::zero() {
            return domain("need m, σ² ≥ 0");
        }
        if self.m > T::zero() && self.sigsq == T::zero() {
            return domain("σ² must be positive when m > 0");
        }
        let scale = (0..p).fold(T::zero(), |a, i| a.max(self.lambda[(i, i)].abs()));
        if !self.lambda.is_symmetric(T::lit(1e-12) * scale.max(T::one())) {
            return domain("Λ must be symmetric");
        }
        // PSD: a small ridge must make Λ positive definite
        let ridge = T::lit(RANK_TOLERANCE) * scale.max(T::one());
        let shifted = self.lambda.add(&Matrix::identity(p).scale(ridge))?;
        Cholesky::new(&shifted).map_err(|_| Error::Domain("Λ must be positive semidefinite".into()))?;
        Ok(())
    }
}

/// Conjugate regression update on the excess returns `y − rfr`:
/// `Λ₁ = Λ₀ + FᵀF`, `β₁ = Λ₁⁻¹(Λ₀β₀ + Fᵀy)`, `m₁ = m₀ + n`.
pub fn update_regression<T: Real>(
    prior: &RegressionHyper<T>,
    sample: &FactorSample<T>,
) -> Result<RegressionHyper<T>> {
    prior.validate()?;
    if sample.p() != prior.p() {
        return domain(format!("prior has {} coefficients, design has {}", prior.p(), sample.p()));
    }
    let y: Vec<T> = sample.returns().iter().map(|&r| r - sample.rfr()).collect();
    let excess = FactorSample::new(sample.factors().clone(), y.clone(), sample.direction().to_vec(), T::zero())?;
    let fit = ols_fit(&excess)?;
    let f = sample.factors();
    let gram = f.gram();
    let lambda1 = prior.lambda.add(&gram)?;
    let chol = Cholesky::new(&lambda1)?;

    let prior_pull = prior.lambda.mul_vec(&prior.beta);
    let rhs: Vec<T> = prior_pull.iter().zip(f.tr_mul_vec(&y)).map(|(a, b)| *a + b).collect();
    let beta1 = chol.solve(&rhs);

    // β̂ᵀGβ̂ + β₀ᵀΛ₀β₀ − β₁ᵀΛ₁β₁ = dᵀΛ₀Λ₁⁻¹G·d with d = β̂ − β₀, which is
    // a PSD form and avoids cancellation
    let d: Vec<T> = fit.coefficients.iter().zip(&prior.beta).map(|(a, b)| *a - *b).collect();
    let shrink = dot(&prior.lambda.mul_vec(&d), &chol.solve(&gram.mul_vec(&d))).max(T::zero());
    let m1 = prior.m + T::from_count(sample.n());
    let sigsq1 = (prior.m * prior.sigsq + fit.rss + shrink) / m1;
    RegressionHyper::new(beta1, lambda1, sigsq1, m1)
}

/// A regression law collapsed along a direction `v`:
/// `vᵀβ | σ² ~ N(vᵀβ₁, σ²q)` with `q = vᵀΛ⁻¹v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsedHyper<T> {
    /// `ζ_g = vᵀβ/σ`
    pub snr: T,
    /// `vᵀΛ⁻¹v`
    pub q: T,
    pub m: T,
}

impl<T: Real> CollapsedHyper<T> {
    /// `q^{−1/2}·ζ_g ~ Υ((q^{−1/2}·ζ_{g,1}), (m))`.
    pub fn marginal(&self) -> Result<MarginalSnr<T>> {
        let scale = self.q.sqrt().recip();
        Ok(MarginalSnr {
            params: UpsilonParams::new(vec![scale * self.snr], vec![self.m])?,
            scale,
        })
    }

    pub fn credible_interval(&self, alpha: T, order: ApproxOrder) -> Result<Interval<T>> {
        self.marginal()?.credible_interval(alpha, order)
    }
}

pub fn collapse_direction<T: Real>(h: &RegressionHyper<T>, v: &[T]) -> Result<CollapsedHyper<T>> {
    h.validate()?;
    if v.len() != h.p() {
        return domain(format!("direction has length {}, expected {}", v.len(), h.p()));
    }
    if v.iter().all(|x| *x == T::zero()) {
        return domain("direction must be nonzero");
    }
    if !(h.m > T::zero() && h.sigsq > T::zero()) {
        return Err(Error::ImproperPosterior(format!(
            "need m, σ² > 0, got m = {}, σ² = {}",
            h.m, h.sigsq
        )));
    }
    let q = Cholesky::new(&h.lambda)?.inverse_quad(v);
    Ok(CollapsedHyper {
        snr: dot(v, &h.beta) / h.sigsq.sqrt(),
        q,
        m: h.m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::stream_rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn ord() -> ApproxOrder {
        ApproxOrder::default()
    }

    fn stats(xs: &[f64]) -> SampleStats<f64> {
        SampleStats::from_returns(&ReturnsSample::new(xs.to_vec(), 0.0).unwrap()).unwrap()
    }

    fn normals(seed: u64, n: usize, mu: f64, sd: f64) -> Vec<f64> {
        let mut rng = stream_rng(seed, 0);
        (0..n).map(|_| mu + sd * rng.sample::<f64, _>(StandardNormal)).collect()
    }

    #[test]
    fn hyper_validation() {
        assert!(NigHyper::new(0.0_f64, -1.0, 1.0, 1.0).is_err());
        assert!(NigHyper::new(0.0_f64, 1.0, 0.0, 1.0).is_err());
        assert!(NigHyper::new(0.0_f64, 1.0, 1.0, -1.0).is_err());
        assert!(NigHyper::new(0.0_f64, 0.0, 0.0, 0.0).is_ok());
        let bad = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(RegressionHyper::new(vec![0.0, 0.0], bad, 1.0, 1.0).is_err());
        let asym = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(RegressionHyper::new(vec![0.0, 0.0], asym, 1.0, 1.0).is_err());
    }

    #[test]
    fn empty_update_is_identity() {
        let prior = NigHyper::new(0.01, 12.0, 0.002, 7.0).unwrap();
        assert_eq!(update_nig(&prior, &SampleStats::empty()).unwrap(), prior);
    }

    #[test]
    fn noninformative_update() {
        let x = normals(1, 40, 0.01, 0.05);
        let s = stats(&x);
        let post = update_nig(&NigHyper::noninformative(), &s).unwrap();
        assert_relative_eq!(post.mu, s.mean, max_relative = 1e-14);
        assert_relative_eq!(post.sigsq, 39.0 * s.sd * s.sd / 40.0, max_relative = 1e-14);
        assert_eq!((post.n, post.m), (40.0, 40.0));

        let sr = s.mean / s.sd;
        let marginal = marginal_snr_params(&post).unwrap();
        let expected = 40f64.sqrt() * (40.0_f64 / 39.0).sqrt() * sr;
        assert_relative_eq!(marginal.params.coef()[0], expected, max_relative = 1e-12);
        assert_eq!(marginal.params.dof(), &[40.0]);
    }

    #[test]
    fn sequential_equals_batch() {
        let prior = NigHyper::new(0.005, 3.0, 0.003, 5.0).unwrap();
        let a = normals(2, 30, 0.02, 0.06);
        let b = normals(3, 45, 0.02, 0.06);
        let ab: Vec<f64> = a.iter().chain(&b).copied().collect();
        let seq = update_nig(&update_nig(&prior, &stats(&a)).unwrap(), &stats(&b)).unwrap();
        let batch = update_nig(&prior, &stats(&ab)).unwrap();
        assert_relative_eq!(seq.mu, batch.mu, max_relative = 1e-12);
        assert_relative_eq!(seq.sigsq, batch.sigsq, max_relative = 1e-12);
        assert_eq!((seq.n, seq.m), (batch.n, batch.m));
    }

    #[test]
    fn snr_form_matches() {
        let prior = NigHyper::new(0.004, 6.0, 0.0025, 9.0).unwrap();
        let x = normals(4, 50, 0.015, 0.045);
        let s = stats(&x);
        let via_nig = SnrHyper::from_nig(&update_nig(&prior, &s).unwrap()).unwrap();
        let via_snr = update_snr(&SnrHyper::from_nig(&prior).unwrap(), s.mean / s.sd, s.sd, s.n).unwrap();
        assert_relative_eq!(via_nig.snr, via_snr.snr, max_relative = 1e-12);
        assert_relative_eq!(via_nig.sigsq, via_snr.sigsq, max_relative = 1e-12);
        let back = via_snr.to_nig().unwrap();
        assert_relative_eq!(back.mu, update_nig(&prior, &s).unwrap().mu, max_relative = 1e-12);
    }

    #[test]
    fn improper_marginal_rejected() {
        let h = NigHyper::<f64>::noninformative();
        assert!(matches!(marginal_snr_params(&h), Err(Error::ImproperPosterior(_))));
        assert!(matches!(credible_interval(&h, 0.05, ord()), Err(Error::ImproperPosterior(_))));
        assert!(posterior_prediction_interval(&h, 10, 0.05, ord()).is_err());
    }

    #[test]
    fn zero_snr_interval_is_symmetric() {
        let h = NigHyper::new(0.0, 50.0, 0.01, 50.0).unwrap();
        let ci = credible_interval(&h, 0.05, ord()).unwrap();
        assert_relative_eq!(ci.lo, -ci.hi, epsilon = 1e-12);
        assert_relative_eq!(ci.hi, 1.959963984540054 / 50f64.sqrt(), epsilon = 1e-9);
    }

    #[test]
    fn noninformative_credible_interval_matches_confidence_interval() {
        use crate::estimate::SrSummary;
        use crate::frequentist::sr_confidence_interval;
        let n = 10_000;
        let x = normals(5, n, 0.02, 0.1);
        let s = stats(&x);
        let post = update_nig(&NigHyper::noninformative(), &s).unwrap();
        let cred = credible_interval(&post, 0.05, ord()).unwrap();
        let conf = sr_confidence_interval(&SrSummary::new(s.mean / s.sd, n).unwrap(), 0.05, ord()).unwrap();
        assert!((cred.lo - conf.lo).abs() < 1e-3 && (cred.hi - conf.hi).abs() < 1e-3);
    }

    #[test]
    fn regression_noninformative_is_ols() {
        let n = 60;
        let mut rng = stream_rng(6, 0);
        let cols: Vec<Vec<f64>> = (0..2).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 0.01 + 0.3 * cols[0][i] - 0.2 * cols[1][i] + 0.05 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let sample = FactorSample::with_intercept(&cols, y, 0.0).unwrap();
        let fit = ols_fit(&sample).unwrap();
        let post = update_regression(&RegressionHyper::noninformative(3), &sample).unwrap();
        for (a, b) in post.beta.iter().zip(&fit.coefficients) {
            assert!((a - b).abs() < 1e-10);
        }
        assert_relative_eq!(post.sigsq, (n - 3) as f64 * fit.sigma * fit.sigma / n as f64, max_relative = 1e-10);
        assert_eq!(post.m, n as f64);
    }

    fn random_batch(seed: u64, n: usize) -> FactorSample<f64> {
        let mut rng = stream_rng(seed, 0);
        let cols: Vec<Vec<f64>> = (0..2).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| 0.02 - 0.1 * cols[0][i] + 0.4 * cols[1][i] + 0.08 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        FactorSample::with_intercept(&cols, y, 0.0).unwrap()
    }

    fn stack(a: &FactorSample<f64>, b: &FactorSample<f64>) -> FactorSample<f64> {
        let f = a.factors().vstack(b.factors()).unwrap();
        let y: Vec<f64> = a.returns().iter().chain(b.returns()).copied().collect();
        FactorSample::new(f, y, a.direction().to_vec(), 0.0).unwrap()
    }

    #[test]
    fn regression_sequential_equals_batch() {
        let prior = RegressionHyper::new(
            vec![0.0, 0.1, -0.1],
            Matrix::from_rows(&[vec![4.0, 0.5, 0.0], vec![0.5, 2.0, 0.3], vec![0.0, 0.3, 1.0]]).unwrap(),
            0.01,
            3.0,
        )
        .unwrap();
        let (a, b) = (random_batch(7, 25), random_batch(8, 40));
        let seq = update_regression(&update_regression(&prior, &a).unwrap(), &b).unwrap();
        let batch = update_regression(&prior, &stack(&a, &b)).unwrap();
        for (x, y) in seq.beta.iter().zip(&batch.beta) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!((seq.sigsq - batch.sigsq).abs() < 1e-10 * batch.sigsq);
        assert_eq!(seq.m, batch.m);
        // noninformative start, two batches
        let non = RegressionHyper::noninformative(3);
        let seq = update_regression(&update_regression(&non, &a).unwrap(), &b).unwrap();
        let batch = update_regression(&non, &stack(&a, &b)).unwrap();
        assert!((seq.sigsq - batch.sigsq).abs() < 1e-10 * batch.sigsq);
    }

    #[test]
    fn displayed_variance_formula_agrees() {
        let prior = RegressionHyper::new(
            vec![0.01, 0.2, 0.0],
            Matrix::from_rows(&[vec![3.0, 0.2, 0.1], vec![0.2, 1.5, 0.0], vec![0.1, 0.0, 2.0]]).unwrap(),
            0.02,
            4.0,
        )
        .unwrap();
        let sample = random_batch(9, 30);
        let post = update_regression(&prior, &sample).unwrap();
        let fit = ols_fit(&sample).unwrap();
        let gram = sample.factors().gram();
        let num = prior.m * prior.sigsq + fit.rss + gram.quad_form(&fit.coefficients)
            + prior.lambda.quad_form(&prior.beta)
            - post.lambda.quad_form(&post.beta);
        assert_relative_eq!(post.sigsq, num / post.m, max_relative = 1e-9);
    }

    #[test]
    fn intercept_only_collapse_matches_location_law() {
        let prior = NigHyper::new(0.003, 4.0, 0.004, 6.0).unwrap();
        let x = normals(10, 35, 0.01, 0.06);
        let post = update_nig(&prior, &stats(&x)).unwrap();
        let reg = update_regression(
            &RegressionHyper::from_nig(&prior),
            &FactorSample::intercept_only(x, 0.0).unwrap(),
        )
        .unwrap();
        let c = collapse_direction(&reg, &[1.0]).unwrap();
        let a = marginal_snr_params(&post).unwrap();
        let b = c.marginal().unwrap();
        assert_relative_eq!(a.params.coef()[0], b.params.coef()[0], max_relative = 1e-12);
        assert_relative_eq!(a.scale, b.scale, max_relative = 1e-12);
        assert_eq!(a.params.dof(), b.params.dof());
    }

    #[test]
    fn direction_scale_invariance() {
        let post = update_regression(&RegressionHyper::noninformative(3), &random_batch(11, 50)).unwrap();
        let v = [0.0, 1.0, -1.0];
        let a = collapse_direction(&post, &v).unwrap();
        let b = collapse_direction(&post, &[0.0, 2.5, -2.5]).unwrap();
        // the Upsilon coefficient is scale free; ζ_g and its interval scale by c
        assert_relative_eq!(a.marginal().unwrap().params.coef()[0], b.marginal().unwrap().params.coef()[0], max_relative = 1e-12);
        let ia = a.credible_interval(0.05, ord()).unwrap();
        let ib = b.credible_interval(0.05, ord()).unwrap();
        assert_relative_eq!(ib.lo, 2.5 * ia.lo, max_relative = 1e-10);
        assert_relative_eq!(ib.hi, 2.5 * ia.hi, max_relative = 1e-10);
    }

    #[test]
    fn collapse_requires_proper_law() {
        let h = RegressionHyper::<f64>::noninformative(2);
        assert!(collapse_direction(&h, &[1.0, 0.0]).is_err());
        let post = update_regression(&RegressionHyper::noninformative(3), &random_batch(12, 20)).unwrap();
        assert!(collapse_direction(&post, &[0.0, 0.0, 0.0]).is_err());
        assert!(collapse_direction(&post, &[1.0]).is_err());
    }

    #[test]
    fn prediction_interval_residuals_and_reduction() {
        use crate::estimate::SrSummary;
        use crate::frequentist::sr_prediction_interval;
        let n = 200;
        let x = normals(13, n, 0.01, 0.05);
        let s = stats(&x);
        let post = update_nig(&NigHyper::noninformative(), &s).unwrap();
        let pi = posterior_prediction_interval(&post, 100, 0.05, ord()).unwrap();
        let law = FutureSrLaw::new(post.snr().unwrap(), post.n, 100, post.m, ord()).unwrap();
        assert!((law.cdf(pi.lo) - 0.025).abs() <= 1e-8);
        assert!((law.cdf(pi.hi) - 0.975).abs() <= 1e-8);
        let freq = sr_prediction_interval(&SrSummary::new(s.mean / s.sd, n).unwrap(), 100, 0.05, ord()).unwrap();
        let w = freq.width();
        assert!((pi.lo - freq.lo).abs() < 2.0 / n as f64 * w.max(1.0));
        assert!((pi.hi - freq.hi).abs() < 2.0 / n as f64 * w.max(1.0));
    }

    proptest! {
        #[test]
        fn posterior_variance_nonnegative(
            seed in 0u64..1000,
            diag in prop::collection::vec(0.0_f64..5.0, 3),
            off in -1.0_f64..1.0,
            b in prop::collection::vec(-1.0_f64..1.0, 3),
            m0 in 0.0_f64..10.0,
        ) {
            // Λ₀ = LLᵀ is PSD by construction
            let l = Matrix::from_rows(&[
                vec![diag[0], 0.0, 0.0],
                vec![off, diag[1], 0.0],
                vec![0.0, off, diag[2]],
            ]).unwrap();
            let mut lam = Matrix::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    lam[(i, j)] = (0..3).map(|k| l[(i, k)] * l[(j, k)]).sum();
                }
            }
            let sigsq0 = if m0 > 0.0 { 0.01 } else { 0.0 };
            let prior = RegressionHyper::new(b, lam, sigsq0, m0).unwrap();
            let post = update_regression(&prior, &random_batch(seed, 12)).unwrap();
            prop_assert!(post.sigsq >= 0.0);
            prop_assert!(post.m > prior.m);
        }
    }
}
