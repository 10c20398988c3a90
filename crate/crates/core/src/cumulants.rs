//! Moment/cumulant conversions and the cumulants of the chi distribution.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Real;
use crate::special::chi_raw_moment;

/// Raw cumulants `κ₁, κ₂, …, κ_K`; `values[0]` is `κ₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantSeries<T> {
    pub values: Vec<T>,
}

impl<T: Real> CumulantSeries<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    /// Cumulant of order `order` (1-based).
    #[inline]
    pub fn order(&self, order: usize) -> T {
        self.values[order - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> T {
        self.values[0]
    }

    pub fn variance(&self) -> T {
        self.values[1]
    }

    /// Standardized cumulants `κ_j / κ₂^{j/2}` for `j = 3..=K`.
    pub fn standardized(&self) -> Vec<T> {
        let sd = self.variance().sqrt();
        let mut scale = sd * sd;
        self.values
            .iter()
            .skip(2)
            .map(|&k| {
                scale = scale * sd;
                k / scale
            })
            .collect()
    }
}

// Pascal's triangle row `n`: C(n, 0..=n).
fn binomial_row<T: Real>(n: usize) -> Vec<T> {
    let mut row = vec![T::one(); n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * T::from_count(n + 1 - k) / T::from_count(k);
    }
    row
}

/// Converts raw moments `m₁..m_K` to cumulants via
/// `κ_n = m_n − Σ_{j<n} C(n−1, j−1) κ_j m_{n−j}`.
pub fn moments_to_cumulants<T: Real>(moments: &[T]) -> Result<CumulantSeries<T>> {
    if moments.is_empty() {
        return domain("at least one moment is required");
    }
    let m = |i: usize| if i == 0 { T::one() } else { moments[i - 1] };
    let mut kappa: Vec<T> = Vec::with_capacity(moments.len());
    for n in 1..=moments.len() {
        let binom = binomial_row::<T>(n - 1);
        let mut acc = m(n);
        for j in 1..n {
            acc = acc - binom[j - 1] * kappa[j - 1] * m(n - j);
        }
        kappa.push(acc);
    }
    Ok(CumulantSeries::new(kappa))
}

/// Inverse of [`moments_to_cumulants`].
pub fn cumulants_to_moments<T: Real>(cumulants: &CumulantSeries<T>) -> Vec<T> {
    let kappa = &cumulants.values;
    let mut moments: Vec<T> = Vec::with_capacity(kappa.len());
    for n in 1..=kappa.len() {
        let binom = binomial_row::<T>(n - 1);
        let mut acc = T::zero();
        for j in 1..=n {
            let m_rest = if n == j { T::one() } else { moments[n - j - 1] };
            acc = acc + binom[j - 1] * kappa[j - 1] * m_rest;
        }
        moments.push(acc);
    }
    moments
}

/// Degrees of freedom at and above which chi cumulants are obtained from
/// quadrature central moments rather than the raw-moment recursion. Above
/// this the recursion cancels away roughly `(r−1)·log10(ν)` digits at
/// order `r`.
pub const CHI_QUADRATURE_DOF: f64 = 256.0;

/// Cumulants `κ₁..κ_K` of a chi variate with `dof` degrees of freedom.
///
/// Always evaluated in double precision and then rounded to `T`: the
/// recursion is too ill-conditioned for single precision.
pub fn chi_cumulants<T: Real>(dof: T, max_order: usize) -> Result<CumulantSeries<T>> {
    if max_order == 0 {
        return domain("max_order must be at least 1");
    }
    let nu = dof.as_f64();
    let k = if nu >= CHI_QUADRATURE_DOF {
        chi_cumulants_quadrature(nu, max_order)?
    } else {
        chi_cumulants_raw(nu, max_order)?
    };
    Ok(CumulantSeries::new(k.values.into_iter().map(T::lit).collect()))
}

/// Chi cumulants from raw moments, exact up to rounding but ill-conditioned
/// for large `dof`.
pub fn chi_cumulants_raw<T: Real>(dof: T, max_order: usize) -> Result<CumulantSeries<T>> {
    let moments = (1..=max_order)
        .map(|i| chi_raw_moment(dof, i as u32))
        .collect::<Result<Vec<T>>>()?;
    moments_to_cumulants(&moments)
}

/// Chi cumulants from central moments computed by Gauss–Hermite quadrature
/// about the mode. Requires `dof` large enough that the quadrature nodes
/// stay on the positive axis (`dof ≥ CHI_QUADRATURE_DOF` is safe).
pub fn chi_cumulants_quadrature<T: Real>(dof: T, max_order: usize) -> Result<CumulantSeries<T>> {
    if !(dof > T::one()) {
        return domain(format!("quadrature route needs dof > 1, got {dof}"));
    }
    let rule = gauss_hermite();
    let mode = (dof - T::one()).sqrt();
    let s = T::FRAC_1_SQRT_2();
    let half = T::lit(0.5);

    // density ratio against the Gaussian weight, normalized numerically
    let mut xs = Vec::with_capacity(rule.len());
    let mut ws = Vec::with_capacity(rule.len());
    let mut total = T::zero();
    for &(node, weight) in rule {
        let v = T::lit(node);
        let a = s * v / mode;
        if a <= -T::one() {
            continue;
        }
        let psi = (dof - T::one()) * (a.ln_1p() - a + half * a * a);
        let w = T::lit(weight) * psi.exp();
        xs.push(mode + s * v);
        ws.push(w);
        total = total + w;
    }
    let centre = xs
        .iter()
        .zip(&ws)
        .fold(T::zero(), |acc, (&x, &w)| acc + w * x)
        / total;

    let mut central = vec![T::zero(); max_order];
    for (&x, &w) in xs.iter().zip(&ws) {
        let d = x - centre;
        let mut pow = w / total;
        for c in central.iter_mut() {
            pow = pow * d;
            *c = *c + pow;
        }
    }
    central[0] = T::zero();
    let mut out = moments_to_cumulants(&central)?;
    out.values[0] = centre;
    Ok(out)
}

/// Probabilists' Gauss–Hermite rule (weight `exp(−v²/2)`), cached.
fn gauss_hermite() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_hermite_rule(64))
}

// Physicists' nodes by Newton iteration on the orthonormal recurrence,
// rescaled to the probabilists' weight.
fn gauss_hermite_rule(n: usize) -> Vec<(f64, f64)> {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    nodes
        .into_iter()
        .zip(weights)
        .map(|(x, w)| (x * sqrt2, w * sqrt2))
        .collect()
}
