//! Upsilon distribution and exact inference on Sharpe ratios under Gaussian
//! returns.
//!
//! The Upsilon law is that of `Σ_j t_j·√(χ²_{ν_j}/ν_j) + Z`. Conditional on
//! observed Sharpe ratios, linear combinations of signal-noise ratios follow
//! it, which yields tests, confidence and prediction intervals, and their
//! conjugate Bayesian counterparts, for plain and factor-model returns.
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); the aliases at
//! the crate root fix the scalar to `f64`.

pub mod bayes;
pub mod cumulants;
pub mod distribution;
pub mod error;
pub mod estimate;
pub mod frequentist;
pub mod linalg;
pub mod mc;
pub mod nct;
pub mod root;
pub mod sample;
pub mod scalar;
pub mod series;
pub mod special;

pub use bayes::{
    collapse_direction, credible_interval, marginal_snr_params, posterior_prediction_interval,
    update_nig, update_regression, update_snr, CollapsedHyper, MarginalSnr, NigHyper,
    RegressionHyper, SampleStats, SnrHyper,
};
pub use cumulants::{chi_cumulants, moments_to_cumulants, CumulantSeries};
pub use distribution::{
    cornish_fisher_quantile, edgeworth_cdf, edgeworth_pdf, quantile_refined, upsilon_cumulants,
    ApproxOrder, UpsilonApprox, UpsilonFamily, UpsilonParams,
};
pub use error::{Error, Result};
pub use estimate::{
    compute_factor_sr, compute_sr, ols_fit, FactorSample, FactorSrSummary, OlsFit, ReturnsSample,
    SrSummary,
};
pub use frequentist::{
    factor_k_sample_test, factor_sr_confidence_interval, k_sample_test, one_sample_test,
    sr_confidence_interval, sr_prediction_interval, InferenceResult, Interval, LinearHypothesis,
    Sided,
};
pub use linalg::Matrix;
pub use mc::{coverage_sim, empirical_cdf, CoverageResult, Procedure, SimulationPlan};
pub use nct::noncentral_t_cdf;
pub use sample::{sample_upsilon, stream_rng, UpsilonSampler};
pub use scalar::Real;
pub use special::chi_raw_moment;

/// Upsilon parameters in double precision.
pub type Upsilon = UpsilonParams<f64>;
/// Upsilon parameters in single precision.
pub type Upsilon32 = UpsilonParams<f32>;
pub type Cumulants = CumulantSeries<f64>;
pub type Sr = SrSummary<f64>;
pub type FactorSr = FactorSrSummary<f64>;
pub type Returns = ReturnsSample<f64>;
pub type Factors = FactorSample<f64>;
pub type Nig = NigHyper<f64>;
pub type Regression = RegressionHyper<f64>;
pub type Hypothesis = LinearHypothesis<f64>;
pub type TestResult = InferenceResult<f64>;
