//! Sharpe ratios and factor-model Sharpe ratios from return data.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{dot, Matrix, Qr, RANK_TOLERANCE};
use crate::scalar::Real;

/// Per-period returns (decimal units) and the risk-free rate they are
/// measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnsSample<T> {
    returns: Vec<T>,
    rfr: T,
}

impl<T: Real> ReturnsSample<T> {
    pub fn new(returns: Vec<T>, rfr: T) -> Result<Self> {
        if returns.len() < 2 {
            return domain(format!("need at least 2 returns, got {}", returns.len()));
        }
        if returns.iter().any(|r| !r.is_finite()) || !rfr.is_finite() {
            return domain("returns and risk-free rate must be finite");
        }
        Ok(Self { returns, rfr })
    }

    /// Returns with a zero risk-free rate.
    pub fn excess(returns: Vec<T>) -> Result<Self> {
        Self::new(returns, T::zero())
    }

    pub fn returns(&self) -> &[T] {
        &self.returns
    }

    pub fn rfr(&self) -> T {
        self.rfr
    }
}

/// Sufficient statistics for inference on a signal-noise ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrSummary<T> {
    /// Sharpe ratio in per-√period units.
    pub sr: T,
    pub n: usize,
}

impl<T: Real> SrSummary<T> {
    pub fn new(sr: T, n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("Sharpe ratio needs n >= 2, got {n}"));
        }
        if !sr.is_finite() {
            return domain("Sharpe ratio must be finite");
        }
        Ok(Self { sr, n })
    }

    /// `√n·SR`, the t statistic.
    pub fn t_stat(&self) -> T {
        T::from_count(self.n).sqrt() * self.sr
    }
}

/// Sample mean and Bessel-corrected standard deviation (two-pass).
pub fn mean_sd<T: Real>(xs: &[T]) -> Result<(T, T)> {
    if xs.len() < 2 {
        return domain(format!("need at least 2 observations, got {}", xs.len()));
    }
    let n = T::from_count(xs.len());
    let mean = xs.iter().fold(T::zero(), |a, &x| a + x) / n;
    let ss = xs.iter().fold(T::zero(), |a, &x| a + (x - mean) * (x - mean));
    Ok((mean, (ss / (n - T::one())).sqrt()))
}

fn max_abs<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |a, &x| a.max(x.abs()))
}

/// `(mean − rfr)/sd` with Bessel-corrected `sd`.
pub fn compute_sr<T: Real>(sample: &ReturnsSample<T>) -> Result<SrSummary<T>> {
    let (mean, sd) = mean_sd(&sample.returns)?;
    if !(sd > T::lit(RANK_TOLERANCE) * max_abs(&sample.returns)) {
        return Err(Error::DegenerateSample(
            "returns have zero variance; Sharpe ratio undefined".into(),
        ));
    }
    SrSummary::new((mean - sample.rfr) / sd, sample.returns.len())
}

/// Returns attributed to deterministic factors. The first factor column is
/// the constant one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSample<T> {
    factors: Matrix<T>,
    returns: Vec<T>,
    direction: Vec<T>,
    rfr: T,
}

impl<T: Real> FactorSample<T> {
    pub fn new(factors: Matrix<T>, returns: Vec<T>, direction: Vec<T>, rfr: T) -> Result<Self> {
        let (n, p) = (factors.rows(), factors.cols());
        if p == 0 || n <= p {
            return domain(format!("factor model needs n > p >= 1, got n = {n}, p = {p}"));
        }
        if returns.len() != n {
            return domain(format!("{} returns for {n} factor rows", returns.len()));
        }
        if direction.len() != p {
            return domain(format!("direction has length {}, expected {p}", direction.len()));
        }
        if direction.iter().all(|v| *v == T::zero()) {
            return domain("direction must be nonzero");
        }
        if (0..n).any(|i| factors[(i, 0)] != T::one()) {
            return domain("first factor column must be the constant one");
        }
        if returns.iter().any(|r| !r.is_finite()) || (0..n).any(|i| factors.row(i).iter().any(|f| !f.is_finite())) {
            return domain("factor data must be finite");
        }
        Ok(Self {
            factors,
            returns,
            direction,
            rfr,
        })
    }

    /// Intercept-only design, direction `(1)`.
    pub fn intercept_only(returns: Vec<T>, rfr: T) -> Result<Self> {
        let n = returns.len();
        let factors = Matrix::from_row_major(n, 1, vec![T::one(); n])?;
        Self::new(factors, returns, vec![T::one()], rfr)
    }

    /// Design with an intercept prepended to the given factor columns;
    /// the direction selects the intercept.
    pub fn with_intercept(columns: &[Vec<T>], returns: Vec<T>, rfr: T) -> Result<Self> {
        let n = returns.len();
        if columns.iter().any(|c| c.len() != n) {
            return domain("factor columns must match the returns length");
        }
        let p = columns.len() + 1;
        let mut data = Vec::with_capacity(n * p);
        for i in 0..n {
            data.push(T::one());
            data.extend(columns.iter().map(|c| c[i]));
        }
        let mut direction = vec![T::zero(); p];
        direction[0] = T::one();
        Self::new(Matrix::from_row_major(n, p, data)?, returns, direction, rfr)
    }

    pub fn factors(&self) -> &Matrix<T> {
        &self.factors
    }

    pub fn returns(&self) -> &[T] {
        &self.returns
    }

    pub fn direction(&self) -> &[T] {
        &self.direction
    }

    pub fn rfr(&self) -> T {
        self.rfr
    }

    pub fn n(&self) -> usize {
        self.factors.rows()
    }

    pub fn p(&self) -> usize {
        self.factors.cols()
    }

    pub fn with_direction(&self, direction: Vec<T>) -> Result<Self> {
        Self::new(self.factors.clone(), self.returns.clone(), direction, self.rfr)
    }
}

/// Least-squares fit of a factor model.
#[derive(Debug, Clone)]
pub struct OlsFit<T> {
    pub coefficients: Vec<T>,
    /// `√(RSS/(n−p))`
    pub sigma: T,
    pub rss: T,
    qr: Qr<T>,
}

impl<T: Real> OlsFit<T> {
    /// `vᵀ(FᵀF)⁻¹v`.
    pub fn gram_scalar(&self, v: &[T]) -> T {
        self.qr.gram_inverse_quad(v)
    }
}

/// Regression of returns on factors via Householder QR.
pub fn ols_fit<T: Real>(sample: &FactorSample<T>) -> Result<OlsFit<T>> {
    let qr = Qr::new(&sample.factors)?;
    qr.check_rank()?;
    let (coefficients, rss) = qr.least_squares(&sample.returns);
    let dof = T::from_count(sample.n() - sample.p());
    Ok(OlsFit {
        coefficients,
        sigma: (rss / dof).sqrt(),
        rss,
        qr,
    })
}

/// Sufficient statistics for inference on a factor-model signal-noise ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FactorSrSummary<T> {
    /// `(β̂ᵀv − rfr)/σ̂`
    pub srg: T,
    pub n: usize,
    pub p: usize,
    /// `vᵀ(FᵀF)⁻¹v`
    pub gram_scalar: T,
}

impl<T: Real> FactorSrSummary<T> {
    pub fn new(srg: T, n: usize, p: usize, gram_scalar: T) -> Result<Self> {
        if p == 0 || n <= p {
            return domain(format!("factor summary needs n > p >= 1, got n = {n}, p = {p}"));
        }
        if !(gram_scalar > T::zero() && gram_scalar.is_finite()) {
            return domain(format!("gram scalar must be positive, got {gram_scalar}"));
        }
        if !srg.is_finite() {
            return domain("factor Sharpe ratio must be finite");
        }
        Ok(Self {
            srg,
            n,
            p,
            gram_scalar,
        })
    }

    /// Summary equivalent to an unattributed Sharpe ratio (`p = 1`,
    /// gram scalar `1/n`).
    pub fn from_sr(s: &SrSummary<T>) -> Self {
        Self {
            srg: s.sr,
            n: s.n,
            p: 1,
            gram_scalar: T::from_count(s.n).recip(),
        }
    }

    pub fn dof(&self) -> usize {
        self.n - self.p
    }
}

pub fn compute_factor_sr<T: Real>(sample: &FactorSample<T>) -> Result<FactorSrSummary<T>> {
    let fit = ols_fit(sample)?;
    if !(fit.sigma > T::lit(RANK_TOLERANCE) * max_abs(&sample.returns)) {
        return Err(Error::DegenerateSample(
            "factor model residuals have zero variance".into(),
        ));
    }
    let srg = (dot(&fit.coefficients, &sample.direction) - sample.rfr) / fit.sigma;
    FactorSrSummary::new(srg, sample.n(), sample.p(), fit.gram_scalar(&sample.direction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::stream_rng;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn three_point_sharpe() {
        let s = compute_sr(&ReturnsSample::new(vec![0.01_f64, 0.02, 0.03], 0.0).unwrap()).unwrap();
        assert_relative_eq!(s.sr, 2.0, epsilon = 1e-12);
        assert_eq!(s.n, 3);
    }

    #[test]
    fn shift_cancels_with_matching_rfr() {
        let x = vec![0.012_f64, -0.03, 0.025, 0.007, 0.041];
        let base = compute_sr(&ReturnsSample::new(x.clone(), 0.0).unwrap()).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + 0.004).collect();
        let s = compute_sr(&ReturnsSample::new(shifted, 0.004).unwrap()).unwrap();
        assert_relative_eq!(s.sr, base.sr, epsilon = 1e-12);
    }

    #[test]
    fn errors() {
        assert!(ReturnsSample::new(vec![0.1_f64], 0.0).is_err());
        let flat = ReturnsSample::new(vec![0.01_f64; 5], 0.0).unwrap();
        assert!(matches!(compute_sr(&flat), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn simulated_sharpe() {
        let mut rng = stream_rng(5, 0);
        let n = 100_000;
        let x: Vec<f64> = (0..n)
            .map(|_| 0.01 + 0.04 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let s = compute_sr(&ReturnsSample::new(x, 0.0).unwrap()).unwrap();
        let se = ((1.0 + 0.25_f64.powi(2) / 2.0) / n as f64).sqrt();
        assert!((s.sr - 0.25).abs() < 3.0 * se, "sr {}", s.sr);
    }

    #[test]
    fn intercept_only_regression() {
        let y = vec![0.03_f64, -0.01, 0.02, 0.05, 0.0, 0.015];
        let sample = FactorSample::intercept_only(y.clone(), 0.0).unwrap();
        let fit = ols_fit(&sample).unwrap();
        let (mean, sd) = mean_sd(&y).unwrap();
        assert_relative_eq!(fit.coefficients[0], mean, epsilon = 1e-14);
        assert_relative_eq!(fit.sigma, sd, epsilon = 1e-14);
        let f = compute_factor_sr(&sample).unwrap();
        let s = compute_sr(&ReturnsSample::new(y.clone(), 0.0).unwrap()).unwrap();
        assert_relative_eq!(f.srg, s.sr, epsilon = 1e-12);
        assert_relative_eq!(f.gram_scalar, 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn noiseless_fit() {
        let x1 = vec![0.5_f64, -1.0, 2.0, 0.3, 1.1, -0.4];
        let x2 = vec![1.0_f64, 0.2, -0.7, 0.9, -1.3, 0.6];
        let beta = [0.01, 0.5, -0.25];
        let y: Vec<f64> = (0..6).map(|i| beta[0] + beta[1] * x1[i] + beta[2] * x2[i]).collect();
        let sample = FactorSample::with_intercept(&[x1, x2], y, 0.0).unwrap();
        let fit = ols_fit(&sample).unwrap();
        for (b, e) in fit.coefficients.iter().zip(beta) {
            assert_relative_eq!(*b, e, epsilon = 1e-10);
        }
        assert!(fit.sigma < 1e-12);
        assert!(matches!(compute_factor_sr(&sample), Err(Error::DegenerateSample(_))));
    }

    #[test]
    fn collinear_design_rejected() {
        let x1 = vec![1.0_f64, 2.0, 3.0, 4.0, 5.0];
        let x2: Vec<f64> = x1.iter().map(|v| 2.0 * v).collect();
        let y = vec![0.1, 0.3, 0.2, 0.5, 0.4];
        let sample = FactorSample::with_intercept(&[x1, x2], y, 0.0).unwrap();
        assert!(matches!(ols_fit(&sample), Err(Error::SingularDesign(_))));
    }

    #[test]
    fn factor_sample_validation() {
        let m = Matrix::from_rows(&[vec![1.0_f64, 0.1], vec![2.0, 0.3], vec![1.0, 0.2]]).unwrap();
        assert!(FactorSample::new(m.clone(), vec![0.1, 0.2, 0.3], vec![1.0, 0.0], 0.0).is_err());
        let m = Matrix::from_rows(&[vec![1.0_f64, 0.1], vec![1.0, 0.3], vec![1.0, 0.2]]).unwrap();
        assert!(FactorSample::new(m.clone(), vec![0.1, 0.2, 0.3], vec![0.0, 0.0], 0.0).is_err());
        assert!(FactorSample::new(m, vec![0.1, 0.2], vec![1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn orthogonality_on_random_design() {
        let mut rng = stream_rng(42, 1);
        let (n, p) = (50, 4);
        let cols: Vec<Vec<f64>> = (0..p - 1)
            .map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let sample = FactorSample::with_intercept(&cols, y.clone(), 0.0).unwrap();
        let fit = ols_fit(&sample).unwrap();
        let fitted = sample.factors().mul_vec(&fit.coefficients);
        let resid: Vec<f64> = y.iter().zip(&fitted).map(|(a, b)| a - b).collect();
        for v in sample.factors().tr_mul_vec(&resid) {
            assert!(v.abs() < 1e-9);
        }
    }

    #[test]
    fn centred_orthogonal_design_gram_scalar() {
        // intercept plus a centred column orthogonal to it
        let x = vec![-1.5_f64, -0.5, 0.5, 1.5, -1.0, 1.0];
        let y = vec![0.1, 0.2, -0.1, 0.3, 0.0, 0.05];
        let sample = FactorSample::with_intercept(&[x], y, 0.0).unwrap();
        let f = compute_factor_sr(&sample).unwrap();
        assert_relative_eq!(f.gram_scalar, 1.0 / 6.0, epsilon = 1e-12);
    }
}
