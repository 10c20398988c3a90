//! Tests, confidence intervals and prediction intervals for signal-noise
//! ratios, conditional on observed Sharpe ratios.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distribution::{check_probability, x_tolerance, ApproxOrder, UpsilonApprox, UpsilonFamily, UpsilonParams};
use crate::error::{domain, Error, Result};
use crate::estimate::{FactorSrSummary, SrSummary};
use crate::nct::noncentral_t_cdf;
use crate::root::{bisect_increasing, expand_bracket};
use crate::scalar::Real;

/// Caveat attached to every result whose probabilities come from the
/// Edgeworth series.
pub const SERIES_CAVEAT: &str =
    "probabilities are Edgeworth series approximations, not exact values";

/// Direction of the alternative hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sided {
    /// `H₁: Σ aᵢζᵢ > b`
    #[default]
    Upper,
    /// `H₁: Σ aᵢζᵢ < b`
    Lower,
    Two,
}

impl fmt::Display for Sided {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sided::Upper => "upper",
            Sided::Lower => "lower",
            Sided::Two => "two",
        })
    }
}

impl FromStr for Sided {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" | "greater" => Ok(Sided::Upper),
            "lower" | "less" => Ok(Sided::Lower),
            "two" | "two-sided" | "both" => Ok(Sided::Two),
            other => domain(format!("unknown alternative '{other}' (upper, lower, two)")),
        }
    }
}

/// `H₀: Σ aᵢζᵢ = b` against the alternative given by `sided`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearHypothesis<T> {
    pub weights: Vec<T>,
    pub target: T,
    pub alpha: T,
    pub sided: Sided,
}

impl<T: Real> LinearHypothesis<T> {
    pub fn new(weights: Vec<T>, target: T, alpha: T, sided: Sided) -> Result<Self> {
        let h = Self {
            weights,
            target,
            alpha,
            sided,
        };
        h.validate()?;
        Ok(h)
    }

    /// `H₀: ζ₁ = ζ₂`.
    pub fn equality(alpha: T, sided: Sided) -> Result<Self> {
        Self::new(vec![T::one(), -T::one()], T::zero(), alpha, sided)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.iter().all(|a| *a == T::zero()) {
            return domain("hypothesis weights must not all be zero");
        }
        if self.weights.iter().any(|a| !a.is_finite()) || !self.target.is_finite() {
            return domain("hypothesis weights and target must be finite");
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return domain(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn contains(&self, x: T) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }
}

/// Critical region boundary: one quantile for one-sided tests, a pair for
/// two-sided tests. The null is rejected when the statistic falls outside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Critical<T> {
    Threshold(T),
    Interval(Interval<T>),
}

/// Outcome of a test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceResult<T> {
    pub method: String,
    /// Scaled hypothesis target compared against the Upsilon law.
    pub statistic: T,
    pub critical: Critical<T>,
    pub p_value: T,
    pub reject: bool,
    pub alpha: T,
    pub sided: Sided,
    pub params: UpsilonParams<T>,
    pub order: ApproxOrder,
    /// Decision via the noncentral t, where that route exists.
    pub nct: Option<NctDecision<T>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NctDecision<T> {
    pub p_value: T,
    pub reject: bool,
}

fn p_value_from_cdf<T: Real>(f: T, sided: Sided) -> T {
    let p = match sided {
        Sided::Upper => f,
        Sided::Lower => T::one() - f,
        Sided::Two => T::lit(2.0) * f.min(T::one() - f),
    };
    p.max(T::zero()).min(T::one())
}

/// Compares a scaled target `statistic` with the Upsilon law of the scaled
/// contrast. Under an upper alternative the null is rejected when the
/// statistic falls below the `α` quantile.
fn upsilon_test<T: Real>(
    method: &str,
    params: UpsilonParams<T>,
    statistic: T,
    alpha: T,
    sided: Sided,
    order: ApproxOrder,
) -> Result<InferenceResult<T>> {
    let law = UpsilonApprox::new(&params, order)?;
    let half = T::lit(0.5);
    let (critical, reject) = match sided {
        Sided::Upper => {
            let q = law.quantile(alpha)?;
            (Critical::Threshold(q), statistic < q)
        }
        Sided::Lower => {
            let q = law.quantile(T::one() - alpha)?;
            (Critical::Threshold(q), statistic > q)
        }
        Sided::Two => {
            let lo = law.quantile(half * alpha)?;
            let hi = law.quantile(T::one() - half * alpha)?;
            (Critical::Interval(Interval { lo, hi }), statistic < lo || statistic > hi)
        }
    };
    Ok(InferenceResult {
        method: method.to_string(),
        statistic,
        critical,
        p_value: p_value_from_cdf(law.cdf(statistic), sided),
        reject,
        alpha,
        sided,
        params,
        order,
        nct: None,
        notes: vec![SERIES_CAVEAT.to_string()],
    })
}

/// `H₀: ζ = ζ₀`. Rejects (upper alternative) when `√n·ζ₀` is below the `α`
/// quantile of `Υ((√n·ζ̂), (n−1))`; the noncentral t decision is reported
/// alongside.
pub fn one_sample_test<T: Real>(
    s: &SrSummary<T>,
    snr0: T,
    alpha: T,
    sided: Sided,
    order: ApproxOrder,
) -> Result<InferenceResult<T>> {
    let hyp = LinearHypothesis::new(vec![T::one()], snr0, alpha, sided)?;
    let mut result = k_sample_test(std::slice::from_ref(s), &hyp, order)?;
    result.method = "one-sample".into();

    let root_n = T::from_count(s.n).sqrt();
    let f = noncentral_t_cdf(s.t_stat(), root_n * snr0, T::from_count(s.n - 1))?;
    let p_value = p_value_from_cdf(T::one() - f, sided);
    result.nct = Some(NctDecision {
        p_value,
        reject: p_value < alpha,
    });
    Ok(result)
}

/// `H₀: Σ aᵢζᵢ = b` on independent samples. The Upsilon law has
/// coefficients `aᵢζ̂ᵢ/√(Σaⱼ²/nⱼ)` and dof `nᵢ − 1`; the statistic is
/// `b/√(Σaⱼ²/nⱼ)`.
pub fn k_sample_test<T: Real>(
    samples: &[SrSummary<T>],
    hyp: &LinearHypothesis<T>,
    order: ApproxOrder,
) -> Result<InferenceResult<T>> {
    hyp.validate()?;
    if samples.len() != hyp.weights.len() {
        return domain(format!(
            "{} samples but {} weights",
            samples.len(),
            hyp.weights.len()
        ));
    }
    let var = samples
        .iter()
        .zip(&hyp.weights)
        .fold(T::zero(), |acc, (s, &a)| acc + a * a / T::from_count(s.n));
    let scale = var.sqrt().recip();
    let coef = samples.iter().zip(&hyp.weights).map(|(s, &a)| scale * a * s.sr).collect();
    let dof = samples.iter().map(|s| T::from_count(s.n - 1)).collect();
    let params = UpsilonParams::new(coef, dof)?;
    upsilon_test("k-sample", params, scale * hyp.target, hyp.alpha, hyp.sided, order)
}

/// `H₀: Σ aᵢζ_{g,i} = b` on independent factor-model samples. Coefficients
/// are `aᵢζ̂_{g,i}/√(Σaⱼ²gⱼ)` with gram scalars `gⱼ`, dof `nᵢ − pᵢ`.
pub fn factor_k_sample_test<T: Real>(
    samples: &[FactorSrSummary<T>],
    hyp: &LinearHypothesis<T>,
    order: ApproxOrder,
) -> Result<InferenceResult<T>> {
    hyp.validate()?;
    if samples.len() != hyp.weights.len() {
        return domain(format!(
            "{} samples but {} weights",
            samples.len(),
            hyp.weights.len()
        ));
    }
    let var = samples
        .iter()
        .zip(&hyp.weights)
        .fold(T::zero(), |acc, (s, &a)| acc + a * a * s.gram_scalar);
    let scale = var.sqrt().recip();
    let coef = samples.iter().zip(&hyp.weights).map(|(s, &a)| scale * a * s.srg).collect();
    let dof = samples.iter().map(|s| T::from_count(s.dof())).collect();
    let params = UpsilonParams::new(coef, dof)?;
    upsilon_test("factor k-sample", params, scale * hyp.target, hyp.alpha, hyp.sided, order)
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    check_probability(alpha).map_err(|_| Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")))
}

/// Upsilon law of `√n·ζ` given `ζ̂`.
pub fn sr_ci_params<T: Real>(s: &SrSummary<T>) -> Result<UpsilonParams<T>> {
    UpsilonParams::new(vec![s.t_stat()], vec![T::from_count(s.n - 1)])
}

/// Upsilon law of `g^{−1/2}·ζ_g` given `ζ̂_g`.
pub fn factor_ci_params<T: Real>(s: &FactorSrSummary<T>) -> Result<UpsilonParams<T>> {
    UpsilonParams::new(
        vec![s.srg / s.gram_scalar.sqrt()],
        vec![T::from_count(s.dof())],
    )
}

fn scaled_interval<T: Real>(
    params: &UpsilonParams<T>,
    unit: T,
    alpha: T,
    order: ApproxOrder,
) -> Result<Interval<T>> {
    check_alpha(alpha)?;
    let law = UpsilonApprox::new(params, order)?;
    let half = T::lit(0.5);
    Ok(Interval {
        lo: unit * law.quantile(half * alpha)?,
        hi: unit * law.quantile(T::one() - half * alpha)?,
    })
}

/// Equal-tailed `1 − α` confidence interval on `ζ`.
pub fn sr_confidence_interval<T: Real>(
    s: &SrSummary<T>,
    alpha: T,
    order: ApproxOrder,
) -> Result<Interval<T>> {
    let unit = T::from_count(s.n).sqrt().recip();
    scaled_interval(&sr_ci_params(s)?, unit, alpha, order)
}

/// Equal-tailed `1 − α` confidence interval on the factor-model `ζ_g`.
pub fn factor_sr_confidence_interval<T: Real>(
    s: &FactorSrSummary<T>,
    alpha: T,
    order: ApproxOrder,
) -> Result<Interval<T>> {
    scaled_interval(&factor_ci_params(s)?, s.gram_scalar.sqrt(), alpha, order)
}

/// `G(ψ) = P(ζ̂₂ ≤ ψ)`: the CDF at zero of `Υ(c·(ζ̂₁, −ψ), dof)` with
/// `c = √(n₁n₂/(n₁+n₂))`.
pub(crate) struct FutureSrLaw<T> {
    family: UpsilonFamily<T>,
    c: T,
    snr: T,
}

impl<T: Real> FutureSrLaw<T> {
    pub(crate) fn new(snr: T, n1: T, n2: usize, dof1: T, order: ApproxOrder) -> Result<Self> {
        if n2 < 2 {
            return domain(format!("future sample size must be at least 2, got {n2}"));
        }
        let n2t = T::from_count(n2);
        let family = UpsilonFamily::new(vec![dof1, T::from_count(n2 - 1)], order)?;
        Ok(Self {
            family,
            c: (n1 * n2t / (n1 + n2t)).sqrt(),
            snr,
        })
    }

    pub(crate) fn cdf(&self, psi: T) -> T {
        match self.family.approx(&[self.c * self.snr, -self.c * psi]) {
            Ok(law) => law.cdf(T::zero()),
            Err(_) => T::nan(),
        }
    }

    pub(crate) fn params(&self, psi: T) -> Result<UpsilonParams<T>> {
        UpsilonParams::new(
            vec![self.c * self.snr, -self.c * psi],
            self.family.dof().to_vec(),
        )
    }

    /// Endpoints with `G(lo) = α/2` and `G(hi) = 1 − α/2`.
    pub(crate) fn interval(&self, alpha: T, centre: T, width: T) -> Result<Interval<T>> {
        check_alpha(alpha)?;
        let half = T::lit(0.5);
        let six = T::lit(6.0);
        let mut g = |psi: T| self.cdf(psi);
        let solve = |g: &mut dyn FnMut(T) -> T, target: T| -> Result<T> {
            let (lo, hi) = expand_bracket(g, target, centre - six * width, centre + six * width, 8)
                .map_err(|e| Error::Numerical(format!("prediction interval at {target}: {e}")))?;
            Ok(bisect_increasing(g, target, lo, hi, x_tolerance(width)))
        };
        let lo = solve(&mut g, half * alpha)?;
        let hi = solve(&mut g, T::one() - half * alpha)?;
        Ok(Interval { lo, hi })
    }
}

/// `1 − α` prediction interval for the Sharpe ratio of `n2` future
/// observations from the same stream.
pub fn sr_prediction_interval<T: Real>(
    s1: &SrSummary<T>,
    n2: usize,
    alpha: T,
    order: ApproxOrder,
) -> Result<Interval<T>> {
    let n1 = T::from_count(s1.n);
    let law = FutureSrLaw::new(s1.sr, n1, n2, T::from_count(s1.n - 1), order)?;
    let width = (n1.recip() + T::from_count(n2).recip()).sqrt();
    law.interval(alpha, s1.sr, width)
}

/// Upsilon law whose CDF at zero is `P(ζ̂₂ ≤ ψ)` for the frequentist
/// prediction problem.
pub fn prediction_params<T: Real>(
    s1: &SrSummary<T>,
    n2: usize,
    psi: T,
    order: ApproxOrder,
) -> Result<UpsilonParams<T>> {
    FutureSrLaw::new(s1.sr, T::from_count(s1.n), n2, T::from_count(s1.n - 1), order)?.params(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sr(sr: f64, n: usize) -> SrSummary<f64> {
        SrSummary::new(sr, n).unwrap()
    }

    fn ord() -> ApproxOrder {
        ApproxOrder::default()
    }

    #[test]
    fn sided_parsing() {
        assert_eq!("upper".parse::<Sided>().unwrap(), Sided::Upper);
        assert_eq!("Two".parse::<Sided>().unwrap(), Sided::Two);
        assert_eq!("less".parse::<Sided>().unwrap(), Sided::Lower);
        assert!("sideways".parse::<Sided>().is_err());
        for s in [Sided::Upper, Sided::Lower, Sided::Two] {
            assert_eq!(s.to_string().parse::<Sided>().unwrap(), s);
        }
    }

    #[test]
    fn hypothesis_validation() {
        assert!(LinearHypothesis::new(vec![0.0_f64, 0.0], 0.0, 0.05, Sided::Upper).is_err());
        assert!(LinearHypothesis::new(vec![1.0_f64], 0.0, 1.0, Sided::Upper).is_err());
        assert!(LinearHypothesis::new(Vec::<f64>::new(), 0.0, 0.05, Sided::Upper).is_err());
        let h = LinearHypothesis::equality(0.05_f64, Sided::Two).unwrap();
        assert!(k_sample_test(&[sr(0.1, 10)], &h, ord()).is_err());
    }

    #[test]
    fn one_sample_central_boundary() {
        // √n·ζ̂ at the central t critical value: both routes sit on the boundary
        let n = 25;
        let t_crit = 1.7108820799094275; // t_{0.95, 24}
        let s = sr(t_crit / (n as f64).sqrt(), n);
        let r = one_sample_test(&s, 0.0, 0.05, Sided::Upper, ord()).unwrap();
        let nct = r.nct.unwrap();
        assert_relative_eq!(nct.p_value, 0.05, epsilon = 1e-9);
        assert!((r.p_value - 0.05).abs() < 5e-3, "p = {}", r.p_value);
    }

    #[test]
    fn one_sample_at_null_is_near_half() {
        for &(z, n) in &[(0.1, 50), (0.3, 200), (-0.2, 120)] {
            let r = one_sample_test(&sr(z, n), z, 0.05, Sided::Upper, ord()).unwrap();
            assert!((r.p_value - 0.5).abs() < 0.02, "{z} {n}: {}", r.p_value);
            assert!(!r.reject);
        }
    }

    #[test]
    fn one_sample_routes_agree() {
        let mut disagreements = 0;
        let mut count = 0;
        for &n in &[20usize, 60, 250, 1000] {
            for i in 0..10 {
                let zhat = -0.3 + 0.08 * i as f64;
                for &z0 in &[-0.1, 0.0, 0.05, 0.15, 0.3] {
                    count += 1;
                    let r = one_sample_test(&sr(zhat, n), z0, 0.05, Sided::Upper, ord()).unwrap();
                    let nct = r.nct.unwrap();
                    if r.reject != nct.reject && (nct.p_value - 0.05).abs() > 5e-3 {
                        disagreements += 1;
                    }
                    assert!((r.p_value - nct.p_value).abs() < 5e-3);
                }
            }
        }
        assert_eq!(count, 200);
        assert_eq!(disagreements, 0);
    }

    #[test]
    fn equal_samples_give_half() {
        let h = LinearHypothesis::equality(0.05, Sided::Upper).unwrap();
        let r = k_sample_test(&[sr(0.4, 90), sr(0.4, 90)], &h, ord()).unwrap();
        assert_eq!(r.p_value, 0.5);
        assert!(!r.reject);
        let h = LinearHypothesis::equality(0.4, Sided::Two).unwrap();
        let r = k_sample_test(&[sr(0.4, 90), sr(0.4, 90)], &h, ord()).unwrap();
        assert_relative_eq!(r.p_value, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn one_sample_reduction() {
        let s = sr(0.21, 77);
        for sided in [Sided::Upper, Sided::Lower, Sided::Two] {
            let a = one_sample_test(&s, 0.05, 0.1, sided, ord()).unwrap();
            let h = LinearHypothesis::new(vec![1.0], 0.05, 0.1, sided).unwrap();
            let b = k_sample_test(&[s], &h, ord()).unwrap();
            assert_eq!(a.params, b.params);
            assert_eq!(a.statistic, b.statistic);
            assert_eq!(a.critical, b.critical);
            assert_eq!(a.p_value, b.p_value);
            assert_eq!(a.reject, b.reject);
        }
    }

    #[test]
    fn factor_reduction_to_k_sample() {
        let s = [sr(0.3, 60), sr(-0.1, 150), sr(0.05, 40)];
        let g: Vec<_> = s.iter().map(FactorSrSummary::from_sr).collect();
        let h = LinearHypothesis::new(vec![1.0, -0.5, 2.0], 0.1, 0.05, Sided::Two).unwrap();
        let a = k_sample_test(&s, &h, ord()).unwrap();
        let b = factor_k_sample_test(&g, &h, ord()).unwrap();
        for (x, y) in a.params.coef().iter().zip(b.params.coef()) {
            assert_relative_eq!(*x, *y, max_relative = 1e-14);
        }
        assert_eq!(a.params.dof(), b.params.dof());
        assert_relative_eq!(a.statistic, b.statistic, max_relative = 1e-14);
        assert_relative_eq!(a.p_value, b.p_value, epsilon = 1e-12);
        assert_eq!(a.reject, b.reject);
    }

    #[test]
    fn permutation_invariance() {
        let s = [sr(0.3, 60), sr(-0.1, 150), sr(0.05, 40)];
        let h = LinearHypothesis::new(vec![1.0, -0.5, 2.0], 0.1, 0.05, Sided::Upper).unwrap();
        let a = k_sample_test(&s, &h, ord()).unwrap();
        let perm = [2, 0, 1];
        let sp: Vec<_> = perm.iter().map(|&i| s[i]).collect();
        let hp = LinearHypothesis::new(perm.iter().map(|&i| h.weights[i]).collect(), 0.1, 0.05, Sided::Upper)
            .unwrap();
        let b = k_sample_test(&sp, &hp, ord()).unwrap();
        assert_relative_eq!(a.p_value, b.p_value, epsilon = 1e-13);
        assert_eq!(a.reject, b.reject);
    }

    #[test]
    fn two_sample_antisymmetry() {
        let (a, b) = (sr(0.35, 100), sr(0.1, 180));
        let h = LinearHypothesis::equality(0.05, Sided::Upper).unwrap();
        let p = k_sample_test(&[a, b], &h, ord()).unwrap().p_value;
        let flipped = LinearHypothesis::new(vec![-1.0, 1.0], 0.0, 0.05, Sided::Upper).unwrap();
        let q = k_sample_test(&[b, a], &flipped, ord()).unwrap().p_value;
        // identical laws after reordering
        assert_relative_eq!(p, q, epsilon = 1e-12);
        let lower = k_sample_test(&[a, b], &LinearHypothesis::equality(0.05, Sided::Lower).unwrap(), ord())
            .unwrap()
            .p_value;
        assert!((p + lower - 1.0).abs() < 2e-3);
    }

    #[test]
    fn worked_example_rejects() {
        // factor summaries with the published coefficient vector
        let g = 1.0 / 7.25_f64.powi(2);
        let s1 = FactorSrSummary::new(-0.993 * g.sqrt(), 88, 4, g / 2.0).unwrap();
        let s2 = FactorSrSummary::new(2.175 * g.sqrt(), 968, 4, g / 2.0).unwrap();
        let h = LinearHypothesis::equality(0.01, Sided::Two).unwrap();
        let r = factor_k_sample_test(&[s1, s2], &h, ord()).unwrap();
        assert_relative_eq!(r.params.coef()[0], -0.993, epsilon = 1e-12);
        assert_relative_eq!(r.params.coef()[1], -2.175, epsilon = 1e-12);
        assert_eq!(r.params.dof(), &[84.0, 964.0]);
        assert!(r.reject);
        assert!((r.p_value - 0.002).abs() < 5e-4, "p = {}", r.p_value);
    }

    #[test]
    fn zero_sr_interval() {
        let ci = sr_confidence_interval(&sr(0.0, 100), 0.05, ord()).unwrap();
        assert_relative_eq!(ci.lo, -0.196, epsilon = 1e-3);
        assert_relative_eq!(ci.hi, 0.196, epsilon = 1e-3);
    }

    #[test]
    fn interval_monotone_in_sr_and_covers_estimate() {
        let mut last = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in 0..30 {
            let z = -0.8 + 0.055 * i as f64;
            let ci = sr_confidence_interval(&sr(z, 60), 0.05, ord()).unwrap();
            assert!(ci.lo > last.0 && ci.hi > last.1);
            // ζ̂ is inside exactly when α/2 < F(√n·ζ̂) < 1 − α/2; chi shrinkage
            // moves the median off √n·ζ̂, so very large α can exclude it
            let law = UpsilonApprox::new(&sr_ci_params(&sr(z, 60)).unwrap(), ord()).unwrap();
            let f = law.cdf(60f64.sqrt() * z);
            for alpha in [0.5, 0.9, 0.99, 0.999] {
                let narrow = sr_confidence_interval(&sr(z, 60), alpha, ord()).unwrap();
                let inside = narrow.lo < z && z < narrow.hi;
                assert_eq!(inside, alpha / 2.0 < f && f < 1.0 - alpha / 2.0, "z = {z}, α = {alpha}");
                if alpha <= 0.9 || z == 0.0 {
                    assert!(inside, "z = {z}, α = {alpha}");
                }
            }
            last = (ci.lo, ci.hi);
        }
    }

    #[test]
    fn factor_interval_reduction_and_widening() {
        let s = sr(0.25, 80);
        let a = sr_confidence_interval(&s, 0.05, ord()).unwrap();
        let b = factor_sr_confidence_interval(&FactorSrSummary::from_sr(&s), 0.05, ord()).unwrap();
        assert_relative_eq!(a.lo, b.lo, max_relative = 1e-12);
        assert_relative_eq!(a.hi, b.hi, max_relative = 1e-12);
        let mut last = 0.0;
        for g in [0.005, 0.01, 0.02, 0.05] {
            let f = FactorSrSummary::new(0.25, 80, 3, g).unwrap();
            let w = factor_sr_confidence_interval(&f, 0.05, ord()).unwrap().width();
            assert!(w > last);
            last = w;
        }
    }

    #[test]
    fn prediction_interval_residuals() {
        let s = sr(0.2, 128);
        let alpha = 0.05;
        let pi = sr_prediction_interval(&s, 128, alpha, ord()).unwrap();
        assert!(pi.lo < 0.2 && 0.2 < pi.hi);
        for (psi, target) in [(pi.lo, alpha / 2.0), (pi.hi, 1.0 - alpha / 2.0)] {
            let p = prediction_params(&s, 128, psi, ord()).unwrap();
            let g = UpsilonApprox::new(&p, ord()).unwrap().cdf(0.0);
            assert!((g - target).abs() <= 1e-8, "{g} vs {target}");
        }
    }

    #[test]
    fn prediction_interval_limit_is_confidence_interval() {
        let s = sr(0.15, 120);
        let pi = sr_prediction_interval(&s, 1_000_000, 0.05, ord()).unwrap();
        let ci = sr_confidence_interval(&s, 0.05, ord()).unwrap();
        assert!((pi.lo - ci.lo).abs() < 2e-3 && (pi.hi - ci.hi).abs() < 2e-3, "{pi:?} {ci:?}");
    }

    #[test]
    fn prediction_interval_monotone() {
        let mut last = f64::NEG_INFINITY;
        for i in 0..10 {
            let pi = sr_prediction_interval(&sr(-0.2 + 0.05 * i as f64, 64), 32, 0.1, ord()).unwrap();
            assert!(pi.lo > last);
            last = pi.lo;
        }
        assert!(sr_prediction_interval(&sr(0.1, 64), 1, 0.1, ord()).is_err());
    }

    #[test]
    fn single_precision_interval() {
        let ci = sr_confidence_interval(&SrSummary::new(0.3_f32, 64).unwrap(), 0.05, ord()).unwrap();
        let ci64 = sr_confidence_interval(&sr(0.3, 64), 0.05, ord()).unwrap();
        assert!((ci.lo as f64 - ci64.lo).abs() < 1e-5, "{} {}", ci.lo, ci64.lo);
        assert!((ci.hi as f64 - ci64.hi).abs() < 1e-5);
    }
}
