//! The Upsilon distribution: law of `Σ_j t_j·√(χ²_{ν_j}/ν_j) + Z` for
//! independent chi-squares and a standard normal `Z`.
//!
//! Cumulants are exact; the CDF, density and quantile are Edgeworth and
//! Cornish–Fisher approximations built from them.

use serde::{Deserialize, Serialize};

use crate::cumulants::{chi_cumulants, CumulantSeries};
use crate::error::{domain, Error, Result};
use crate::root::{bisect_increasing, expand_bracket};
use crate::scalar::Real;
use crate::series::{EdgeworthSeries, MAX_TERMS};
use crate::special::{norm_cdf, norm_pdf, norm_quantile};

/// Coefficients and degrees of freedom of one Upsilon law. An empty
/// parameter set is the standard normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpsilonParams<T> {
    coef: Vec<T>,
    dof: Vec<T>,
}

impl<T: Real> UpsilonParams<T> {
    pub fn new(coef: Vec<T>, dof: Vec<T>) -> Result<Self> {
        if coef.len() != dof.len() {
            return domain(format!(
                "coefficient and dof lengths differ ({} vs {})",
                coef.len(),
                dof.len()
            ));
        }
        if let Some(c) = coef.iter().find(|c| !c.is_finite()) {
            return domain(format!("coefficients must be finite, got {c}"));
        }
        if let Some(d) = dof.iter().find(|d| !(**d > T::zero() && d.is_finite())) {
            return domain(format!("degrees of freedom must be positive, got {d}"));
        }
        Ok(Self { coef, dof })
    }

    /// The standard normal (`k = 0`).
    pub fn standard_normal() -> Self {
        Self {
            coef: Vec::new(),
            dof: Vec::new(),
        }
    }

    pub fn coef(&self) -> &[T] {
        &self.coef
    }

    pub fn dof(&self) -> &[T] {
        &self.dof
    }

    /// Number of chi summands.
    pub fn k(&self) -> usize {
        self.coef.len()
    }

    /// True when every coefficient is zero, i.e. the law is exactly normal.
    pub fn is_normal(&self) -> bool {
        self.coef.iter().all(|c| *c == T::zero())
    }

    /// Sum of independent Upsilon variates minus one of the two normals:
    /// summands concatenated, single shared `Z`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut coef = self.coef.clone();
        coef.extend_from_slice(&other.coef);
        let mut dof = self.dof.clone();
        dof.extend_from_slice(&other.dof);
        Self { coef, dof }
    }

    /// Law of `−Y`.
    pub fn negated(&self) -> Self {
        Self {
            coef: self.coef.iter().map(|c| -*c).collect(),
            dof: self.dof.clone(),
        }
    }
}

/// Number of series terms used by the approximations.
///
/// `edgeworth_terms` counts correction orders `s = 1..=S` beyond `Φ` (needing
/// cumulants to order `S+2`); `cf_terms` counts Cornish–Fisher adjustment
/// orders the same way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxOrder {
    pub edgeworth_terms: usize,
    pub cf_terms: usize,
}

impl Default for ApproxOrder {
    fn default() -> Self {
        Self {
            edgeworth_terms: 8,
            cf_terms: 6,
        }
    }
}

impl ApproxOrder {
    pub fn new(edgeworth_terms: usize, cf_terms: usize) -> Result<Self> {
        let order = Self {
            edgeworth_terms,
            cf_terms,
        };
        order.validate()?;
        Ok(order)
    }

    /// Same number of terms for both series.
    pub fn uniform(terms: usize) -> Result<Self> {
        Self::new(terms, terms)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("edgeworth", self.edgeworth_terms), ("cornish-fisher", self.cf_terms)] {
            if v == 0 || v > MAX_TERMS {
                return domain(format!("{name} terms must be in 1..={MAX_TERMS}, got {v}"));
            }
        }
        Ok(())
    }

    fn cumulant_order(&self) -> usize {
        self.edgeworth_terms.max(self.cf_terms) + 2
    }
}

/// Cumulants `κ₁..κ_{max_order}` of the Upsilon law: each summand
/// contributes its chi cumulants scaled by `(t_j/√ν_j)^order`, and the
/// normal adds one to `κ₂`.
pub fn upsilon_cumulants<T: Real>(
    params: &UpsilonParams<T>,
    max_order: usize,
) -> Result<CumulantSeries<T>> {
    if max_order < 2 {
        return domain(format!("cumulant order must be at least 2, got {max_order}"));
    }
    let mut total = normal_cumulants(max_order);
    for (&c, &nu) in params.coef.iter().zip(&params.dof) {
        if c == T::zero() {
            continue;
        }
        accumulate(&mut total, c, nu, &chi_cumulants(nu, max_order)?);
    }
    Ok(CumulantSeries::new(total))
}

fn normal_cumulants<T: Real>(max_order: usize) -> Vec<T> {
    let mut total = vec![T::zero(); max_order];
    total[1] = T::one();
    total
}

fn accumulate<T: Real>(total: &mut [T], c: T, nu: T, chi: &CumulantSeries<T>) {
    let scale = c / nu.sqrt();
    let mut factor = T::one();
    for (acc, &k) in total.iter_mut().zip(&chi.values) {
        factor = factor * scale;
        *acc = *acc + factor * k;
    }
}

/// Upsilon laws sharing degrees of freedom, with the chi cumulants computed
/// once. Used when only the coefficients vary, e.g. inside root finders.
#[derive(Debug, Clone)]
pub struct UpsilonFamily<T> {
    dof: Vec<T>,
    chi: Vec<CumulantSeries<T>>,
    order: ApproxOrder,
}

impl<T: Real> UpsilonFamily<T> {
    pub fn new(dof: Vec<T>, order: ApproxOrder) -> Result<Self> {
        order.validate()?;
        // validates dof
        UpsilonParams::new(vec![T::zero(); dof.len()], dof.clone())?;
        let chi = dof
            .iter()
            .map(|&nu| chi_cumulants(nu, order.cumulant_order()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dof, chi, order })
    }

    pub fn dof(&self) -> &[T] {
        &self.dof
    }

    pub fn cumulants(&self, coef: &[T]) -> Result<CumulantSeries<T>> {
        if coef.len() != self.dof.len() {
            return domain(format!(
                "expected {} coefficients, got {}",
                self.dof.len(),
                coef.len()
            ));
        }
        let mut total = normal_cumulants(self.order.cumulant_order());
        for ((&c, &nu), chi) in coef.iter().zip(&self.dof).zip(&self.chi) {
            if !c.is_finite() {
                return domain(format!("coefficients must be finite, got {c}"));
            }
            if c != T::zero() {
                accumulate(&mut total, c, nu, chi);
            }
        }
        Ok(CumulantSeries::new(total))
    }

    pub fn approx(&self, coef: &[T]) -> Result<UpsilonApprox<T>> {
        let cumulants = self.cumulants(coef)?;
        if coef.iter().all(|c| *c == T::zero()) {
            return UpsilonApprox::new(&UpsilonParams::standard_normal(), self.order);
        }
        UpsilonApprox::from_cumulants(&cumulants, self.order)
    }
}

/// An Upsilon law prepared for repeated CDF, density and quantile evaluation.
#[derive(Debug, Clone)]
pub struct UpsilonApprox<T> {
    mean: T,
    sd: T,
    order: ApproxOrder,
    // None for an exactly normal law
    series: Option<Series<T>>,
}

#[derive(Debug, Clone)]
struct Series<T> {
    edgeworth: EdgeworthSeries<T>,
    cornish_fisher: EdgeworthSeries<T>,
}

impl<T: Real> UpsilonApprox<T> {
    pub fn new(params: &UpsilonParams<T>, order: ApproxOrder) -> Result<Self> {
        order.validate()?;
        if params.is_normal() {
            return Ok(Self {
                mean: T::zero(),
                sd: T::one(),
                order,
                series: None,
            });
        }
        let cumulants = upsilon_cumulants(params, order.cumulant_order())?;
        Self::from_cumulants(&cumulants, order)
    }

    /// Approximation built from precomputed cumulants, which must reach
    /// order `max(edgeworth_terms, cf_terms) + 2`.
    pub fn from_cumulants(cumulants: &CumulantSeries<T>, order: ApproxOrder) -> Result<Self> {
        order.validate()?;
        if cumulants.len() < order.cumulant_order() {
            return domain(format!(
                "{} cumulants supplied, {} needed",
                cumulants.len(),
                order.cumulant_order()
            ));
        }
        if !(cumulants.variance() > T::zero()) {
            return domain("variance must be positive");
        }
        let standardized = cumulants.standardized();
        let series = Series {
            edgeworth: EdgeworthSeries::new(&standardized, order.edgeworth_terms),
            cornish_fisher: EdgeworthSeries::new(&standardized, order.cf_terms),
        };
        Ok(Self {
            mean: cumulants.mean(),
            sd: cumulants.variance().sqrt(),
            order,
            series: Some(series),
        })
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn sd(&self) -> T {
        self.sd
    }

    pub fn order(&self) -> ApproxOrder {
        self.order
    }

    fn standardize(&self, x: T) -> T {
        (x - self.mean) / self.sd
    }

    /// Edgeworth approximation to the CDF, clamped to `[0, 1]`.
    pub fn cdf(&self, x: T) -> T {
        let z = self.standardize(x);
        match &self.series {
            None => norm_cdf(z),
            Some(s) => s.edgeworth.cdf(z),
        }
    }

    /// Edgeworth approximation to the density, clamped at zero.
    pub fn pdf(&self, x: T) -> T {
        let z = self.standardize(x);
        match &self.series {
            None => norm_pdf(z),
            Some(s) => s.edgeworth.pdf(z) / self.sd,
        }
    }

    /// Cornish–Fisher approximate quantile.
    pub fn cf_quantile(&self, p: T) -> Result<T> {
        check_probability(p)?;
        let z = norm_quantile(p);
        let w = match &self.series {
            None => z,
            Some(s) => s.cornish_fisher.cornish_fisher(z, self.order.cf_terms),
        };
        Ok(self.mean + self.sd * w)
    }

    /// Quantile of the Edgeworth CDF by bisection, seeded with the
    /// Cornish–Fisher value.
    pub fn quantile(&self, p: T) -> Result<T> {
        check_probability(p)?;
        if self.series.is_none() {
            return Ok(self.mean + self.sd * norm_quantile(p));
        }
        let ten = T::lit(10.0);
        let mut lo = self.mean - ten * self.sd;
        let mut hi = self.mean + ten * self.sd;
        let mut cdf = |x: T| self.cdf(x);
        if let Ok(seed) = self.cf_quantile(p) {
            if seed.is_finite() && seed > lo && seed < hi {
                if cdf(seed) < p {
                    lo = seed;
                } else {
                    hi = seed;
                }
            }
        }
        let (lo, hi) = expand_bracket(&mut cdf, p, lo, hi, 8).map_err(|e| {
            Error::Numerical(format!("Upsilon quantile at p = {p}: {e}"))
        })?;
        let tol = x_tolerance(self.sd);
        Ok(bisect_increasing(&mut cdf, p, lo, hi, tol))
    }
}

/// Bisection width target: `1e-10·scale`, floored at a few ulps for `f32`.
pub(crate) fn x_tolerance<T: Real>(scale: T) -> T {
    let rel = T::lit(1e-10).max(T::lit(4.0) * T::epsilon());
    rel * scale
}

pub(crate) fn check_probability<T: Real>(p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        domain(format!("probability must lie in (0, 1), got {p}"))
    }
}

/// Edgeworth approximate CDF of the Upsilon law at `x`.
pub fn edgeworth_cdf<T: Real>(params: &UpsilonParams<T>, x: T, order: ApproxOrder) -> Result<T> {
    Ok(UpsilonApprox::new(params, order)?.cdf(x))
}

/// Edgeworth approximate density of the Upsilon law at `x`.
pub fn edgeworth_pdf<T: Real>(params: &UpsilonParams<T>, x: T, order: ApproxOrder) -> Result<T> {
    Ok(UpsilonApprox::new(params, order)?.pdf(x))
}

/// Cornish–Fisher approximate quantile of the Upsilon law.
pub fn cornish_fisher_quantile<T: Real>(
    params: &UpsilonParams<T>,
    p: T,
    order: ApproxOrder,
) -> Result<T> {
    check_probability(p)?;
    UpsilonApprox::new(params, order)?.cf_quantile(p)
}

/// Quantile obtained by inverting the Edgeworth CDF.
pub fn quantile_refined<T: Real>(params: &UpsilonParams<T>, p: T, order: ApproxOrder) -> Result<T> {
    check_probability(p)?;
    UpsilonApprox::new(params, order)?.quantile(p)
}
