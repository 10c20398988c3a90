//! Monte Carlo oracles and coverage simulations.
//!
//! Every replication draws from its own stream `(seed, r)`, so results are
//! identical whether replications run serially or in parallel.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{credible_interval, posterior_prediction_interval, update_nig, NigHyper, SampleStats};
use crate::distribution::{ApproxOrder, UpsilonParams};
use crate::error::{Error, Result};
use crate::estimate::{compute_factor_sr, compute_sr, FactorSample, FactorSrSummary, ReturnsSample, SrSummary};
use crate::frequentist::{
    factor_k_sample_test, factor_sr_confidence_interval, k_sample_test, one_sample_test,
    sr_confidence_interval, sr_prediction_interval, LinearHypothesis, Sided,
};
use crate::linalg::Matrix;
use crate::sample::{stream_rng, UpsilonSampler};

/// Draws per stream in [`empirical_cdf`].
const CHUNK: usize = 1 << 16;

/// Fraction of `n` exact draws at or below each point.
pub fn empirical_cdf(params: &UpsilonParams<f64>, points: &[f64], n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Domain("need at least one draw".into()));
    }
    let sampler = UpsilonSampler::new(params)?;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| points[i]).collect();

    let chunks = n.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            // bucket[j] counts draws in (sorted[j−1], sorted[j]]
            let mut bucket = vec![0u64; sorted.len() + 1];
            for _ in 0..len {
                let y = sampler.sample(&mut rng);
                bucket[sorted.partition_point(|p| *p < y)] += 1;
            }
            bucket
        })
        .reduce(
            || vec![0u64; sorted.len() + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut out = vec![0.0; points.len()];
    let mut running = 0u64;
    for (j, &i) in order.iter().enumerate() {
        running += counts[j];
        out[i] = running as f64 / n as f64;
    }
    Ok(out)
}

/// Procedures that [`coverage_sim`] can replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Procedure {
    /// Confidence interval on `ζ` covers the truth.
    Ci,
    /// Factor-model confidence interval covers `ζ_g`.
    FactorCi,
    /// One-sample test rejects a true null.
    OneSampleSize,
    /// Two-sample equality test rejects a true null.
    TwoSampleSize,
    FactorTwoSampleSize,
    /// Prediction interval covers the Sharpe ratio of the future sample.
    Predint,
    /// Credible interval covers `ζ` drawn from the prior.
    Credint,
    /// Posterior prediction interval covers the future Sharpe ratio, with
    /// `ζ` drawn from the prior.
    BayesPredint,
}

impl Procedure {
    pub const ALL: [Procedure; 8] = [
        Procedure::Ci,
        Procedure::FactorCi,
        Procedure::OneSampleSize,
        Procedure::TwoSampleSize,
        Procedure::FactorTwoSampleSize,
        Procedure::Predint,
        Procedure::Credint,
        Procedure::BayesPredint,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Procedure::Ci => "ci",
            Procedure::FactorCi => "factor_ci",
            Procedure::OneSampleSize => "one_sample_size",
            Procedure::TwoSampleSize => "two_sample_size",
            Procedure::FactorTwoSampleSize => "factor_two_sample_size",
            Procedure::Predint => "predint",
            Procedure::Credint => "credint",
            Procedure::BayesPredint => "bayes_predint",
        }
    }

    fn is_size(&self) -> bool {
        matches!(
            self,
            Procedure::OneSampleSize | Procedure::TwoSampleSize | Procedure::FactorTwoSampleSize
        )
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Procedure::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Procedure::ALL.iter().map(|p| p.name()).collect();
                Error::Config(format!("unknown procedure '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

fn default_replications() -> usize {
    10_000
}
fn default_sigma() -> f64 {
    1.0
}
fn default_alpha() -> f64 {
    0.05
}
fn default_p() -> usize {
    1
}
fn default_true() -> bool {
    true
}

/// A coverage or size experiment. Read from `key = value` files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationPlan {
    pub scenario: String,
    /// Procedure to run when none is given explicitly.
    #[serde(default)]
    pub procedure: Option<String>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub seed: u64,
    /// True per-period signal-noise ratio (ignored by Bayesian procedures,
    /// which draw it from the prior).
    #[serde(default)]
    pub snr: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    pub n: usize,
    /// Second or future sample size.
    #[serde(default)]
    pub n2: Option<usize>,
    /// Number of factors including the intercept.
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub sided: Sided,
    #[serde(default)]
    pub prior: Option<NigHyper<f64>>,
    #[serde(default)]
    pub edgeworth_terms: Option<usize>,
    #[serde(default)]
    pub cf_terms: Option<usize>,
    #[serde(default = "default_true")]
    pub parallel: bool,
}

impl SimulationPlan {
    /// Minimal plan with defaults for everything but the essentials.
    pub fn new(scenario: &str, seed: u64, n: usize) -> Self {
        Self {
            scenario: scenario.to_string(),
            procedure: None,
            replications: default_replications(),
            seed,
            snr: 0.0,
            sigma: default_sigma(),
            n,
            n2: None,
            p: default_p(),
            alpha: default_alpha(),
            sided: Sided::default(),
            prior: None,
            edgeworth_terms: None,
            cf_terms: None,
            parallel: true,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let plan: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn order(&self) -> Result<ApproxOrder> {
        let d = ApproxOrder::default();
        ApproxOrder::new(
            self.edgeworth_terms.unwrap_or(d.edgeworth_terms),
            self.cf_terms.unwrap_or(d.cf_terms),
        )
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.p == 0 || self.p >= self.n {
            return bad(format!("need 1 <= p < n, got p = {}", self.p));
        }
        if let Some(n2) = self.n2 {
            if n2 < 2 || n2 <= self.p {
                return bad(format!("n2 must be at least 2 and exceed p, got {n2}"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite() && self.snr.is_finite()) {
            return bad("sigma must be positive and snr finite".into());
        }
        if let Some(prior) = &self.prior {
            prior.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        self.order().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    fn n2(&self) -> Result<usize> {
        self.n2
            .ok_or_else(|| Error::Config(format!("scenario '{}' needs n2", self.scenario)))
    }

    fn proper_prior(&self) -> Result<NigHyper<f64>> {
        match self.prior {
            Some(p) if p.n > 0.0 && p.m > 0.0 && p.sigsq > 0.0 => Ok(p),
            _ => Err(Error::Config(format!(
                "scenario '{}' needs a proper prior (n0, m0, sigsq0 > 0)",
                self.scenario
            ))),
        }
    }
}

/// Empirical hit or rejection rate with its binomial standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageResult {
    pub scenario: String,
    pub procedure: Procedure,
    pub replications: usize,
    /// Replications on which the procedure itself failed; counted as misses.
    pub failures: usize,
    pub rate: f64,
    pub std_error: f64,
    /// `1 − α` for intervals, `α` for size experiments.
    pub nominal: f64,
    pub seed: u64,
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize, mu: f64, sigma: f64) -> Vec<f64> {
    (0..n).map(|_| mu + sigma * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Fixed factor design: intercept plus `p − 1` standard normal columns, drawn
/// from a stream no replication uses.
fn design(seed: u64, tag: u64, n: usize, p: usize) -> Result<Matrix<f64>> {
    let mut rng = stream_rng(seed, u64::MAX - tag);
    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n {
        data.push(1.0);
        data.extend((1..p).map(|_| rng.sample::<f64, _>(StandardNormal)));
    }
    Matrix::from_row_major(n, p, data)
}

/// Coefficients with intercept `ζσ` and fixed loadings on the other factors,
/// so `ζ_g` along the intercept equals `ζ`.
fn loadings(plan: &SimulationPlan) -> Vec<f64> {
    let mut beta = vec![plan.snr * plan.sigma];
    beta.extend((1..plan.p).map(|j| 0.3 * if j % 2 == 1 { 1.0 } else { -0.5 }));
    beta
}

fn factor_draw(rng: &mut ChaCha8Rng, f: &Matrix<f64>, beta: &[f64], sigma: f64) -> Result<FactorSrSummary<f64>> {
    let mean = f.mul_vec(beta);
    let y: Vec<f64> = mean.iter().map(|m| m + sigma * rng.sample::<f64, _>(StandardNormal)).collect();
    let mut v = vec![0.0; f.cols()];
    v[0] = 1.0;
    compute_factor_sr(&FactorSample::new(f.clone(), y, v, 0.0)?)
}

fn sr_of(rng: &mut ChaCha8Rng, n: usize, mu: f64, sigma: f64) -> Result<SrSummary<f64>> {
    compute_sr(&ReturnsSample::new(gaussian(rng, n, mu, sigma), 0.0)?)
}

/// `(μ, σ)` drawn from a Normal-Inverse-Gamma law.
fn draw_prior(rng: &mut ChaCha8Rng, h: &NigHyper<f64>) -> Result<(f64, f64)> {
    let chi = ChiSquared::new(h.m).map_err(|e| Error::Config(e.to_string()))?;
    let sigsq = h.m * h.sigsq / chi.sample(rng);
    let sigma = sigsq.sqrt();
    let mu = h.mu + sigma / h.n.sqrt() * rng.sample::<f64, _>(StandardNormal);
    Ok((mu, sigma))
}

struct Context {
    order: ApproxOrder,
    designs: Option<(Matrix<f64>, Matrix<f64>)>,
    beta: Vec<f64>,
}

fn replicate(plan: &SimulationPlan, proc_: Procedure, ctx: &Context, r: usize) -> Result<bool> {
    let rng = &mut stream_rng(plan.seed, r as u64);
    let (alpha, order) = (plan.alpha, ctx.order);
    let mu = plan.snr * plan.sigma;
    match proc_ {
        Procedure::Ci => {
            let s = sr_of(rng, plan.n, mu, plan.sigma)?;
            Ok(sr_confidence_interval(&s, alpha, order)?.contains(plan.snr))
        }
        Procedure::FactorCi => {
            let (f, _) = ctx.designs.as_ref().expect("designs");
            let s = factor_draw(rng, f, &ctx.beta, plan.sigma)?;
            Ok(factor_sr_confidence_interval(&s, alpha, order)?.contains(plan.snr))
        }
        Procedure::OneSampleSize => {
            let s = sr_of(rng, plan.n, mu, plan.sigma)?;
            Ok(one_sample_test(&s, plan.snr, alpha, plan.sided, order)?.reject)
        }
        Procedure::TwoSampleSize => {
            let a = sr_of(rng, plan.n, mu, plan.sigma)?;
            let b = sr_of(rng, plan.n2()?, mu, plan.sigma)?;
            let h = LinearHypothesis::equality(alpha, plan.sided)?;
            Ok(k_sample_test(&[a, b], &h, order)?.reject)
        }
        Procedure::FactorTwoSampleSize => {
            let (f1, f2) = ctx.designs.as_ref().expect("designs");
            let a = factor_draw(rng, f1, &ctx.beta, plan.sigma)?;
            let b = factor_draw(rng, f2, &ctx.beta, plan.sigma)?;
            let h = LinearHypothesis::equality(alpha, plan.sided)?;
            Ok(factor_k_sample_test(&[a, b], &h, order)?.reject)
        }
        Procedure::Predint => {
            let past = sr_of(rng, plan.n, mu, plan.sigma)?;
            let future = sr_of(rng, plan.n2()?, mu, plan.sigma)?;
            Ok(sr_prediction_interval(&past, plan.n2()?, alpha, order)?.contains(future.sr))
        }
        Procedure::Credint => {
            let prior = plan.proper_prior()?;
            let (mu, sigma) = draw_prior(rng, &prior)?;
            let x = gaussian(rng, plan.n, mu, sigma);
            let post = update_nig(&prior, &SampleStats::from_returns(&ReturnsSample::new(x, 0.0)?)?)?;
            Ok(credible_interval(&post, alpha, order)?.contains(mu / sigma))
        }
        Procedure::BayesPredint => {
            let prior = plan.proper_prior()?;
            let (mu, sigma) = draw_prior(rng, &prior)?;
            let x = gaussian(rng, plan.n, mu, sigma);
            let post = update_nig(&prior, &SampleStats::from_returns(&ReturnsSample::new(x, 0.0)?)?)?;
            let future = sr_of(rng, plan.n2()?, mu, sigma)?;
            Ok(posterior_prediction_interval(&post, plan.n2()?, alpha, order)?.contains(future.sr))
        }
    }
}

/// Replicates `procedure` under the plan and reports the hit rate (interval
/// procedures) or rejection rate (size procedures).
pub fn coverage_sim(plan: &SimulationPlan, procedure: &str) -> Result<CoverageResult> {
    plan.validate()?;
    let proc_: Procedure = procedure.parse()?;
    let needs_designs = matches!(proc_, Procedure::FactorCi | Procedure::FactorTwoSampleSize);
    let designs = if needs_designs {
        let n2 = if proc_ == Procedure::FactorTwoSampleSize { plan.n2()? } else { plan.n };
        Some((design(plan.seed, 0, plan.n, plan.p)?, design(plan.seed, 1, n2, plan.p)?))
    } else {
        None
    };
    if matches!(proc_, Procedure::Predint | Procedure::BayesPredint | Procedure::TwoSampleSize) {
        plan.n2()?;
    }
    if matches!(proc_, Procedure::Credint | Procedure::BayesPredint) {
        plan.proper_prior()?;
    }
    let ctx = Context {
        order: plan.order()?,
        designs,
        beta: loadings(plan),
    };
    let run = |r: usize| replicate(plan, proc_, &ctx, r);
    let outcomes: Vec<Result<bool>> = if plan.parallel {
        (0..plan.replications).into_par_iter().map(run).collect()
    } else {
        (0..plan.replications).map(run).collect()
    };

    let mut hits = 0usize;
    let mut failures = 0usize;
    for o in &outcomes {
        match o {
            Ok(true) => hits += 1,
            Ok(false) => {}
            // a numerical failure is a miss; configuration errors abort
            Err(Error::Config(m)) => return Err(Error::Config(m.clone())),
            Err(_) => failures += 1,
        }
    }
    let reps = plan.replications as f64;
    let rate = hits as f64 / reps;
    Ok(CoverageResult {
        scenario: plan.scenario.clone(),
        procedure: proc_,
        replications: plan.replications,
        failures,
        rate,
        std_error: (rate * (1.0 - rate) / reps).sqrt(),
        nominal: if proc_.is_size() { plan.alpha } else { 1.0 - plan.alpha },
        seed: plan.seed,
    })
}
