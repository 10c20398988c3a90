//! Edgeworth and Cornish–Fisher series in standardized units.
//!
//! Both series are organized by correction order `s`: the order-`s` term
//! collects every partition of `s` (multiplicities `k_m` with
//! `Σ m·k_m = s`, `r = Σ k_m`) weighted by
//! `Π_m (1/k_m!) (λ_{m+2}/(m+2)!)^{k_m}`, where `λ_j = κ_j/κ₂^{j/2}`.
//! The CDF term uses `He_{s+2r−1}`, the density term `He_{s+2r}`.

use std::sync::OnceLock;

use crate::scalar::Real;
use crate::special::{norm_cdf, norm_pdf};

/// Largest supported number of correction terms.
pub const MAX_TERMS: usize = 12;

/// Probabilists' Hermite polynomials `He_0(x)..=He_n(x)`.
pub fn hermite_he<T: Real>(x: T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let next = x * out[k] - T::from_count(k) * out[k - 1];
        out.push(next);
    }
    out
}

/// Integer partitions of `s` as multiplicity vectors: entry `m−1` is the
/// number of parts equal to `m`.
pub fn partitions(s: usize) -> &'static [Vec<usize>] {
    static TABLE: OnceLock<Vec<Vec<Vec<usize>>>> = OnceLock::new();
    let table = TABLE.get_or_init(|| (0..=MAX_TERMS).map(enumerate_partitions).collect());
    assert!(s <= MAX_TERMS, "partition order {s} exceeds {MAX_TERMS}");
    &table[s]
}

fn enumerate_partitions(s: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max_part: usize, mult: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(mult.clone());
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            mult[part - 1] += 1;
            rec(rest - part, part, mult, out);
            mult[part - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    let mut mult = vec![0; s];
    rec(s, s, &mut mult, &mut out);
    out
}

/// One partition contribution: `coef · He_{hermite}` at correction order `order`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SeriesTerm<T> {
    pub order: usize,
    pub hermite: usize,
    pub coef: T,
}

/// Precomputed Edgeworth terms for a fixed set of standardized cumulants.
#[derive(Debug, Clone)]
pub struct EdgeworthSeries<T> {
    terms: Vec<SeriesTerm<T>>,
    max_order: usize,
}

impl<T: Real> EdgeworthSeries<T> {
    /// `standardized[j]` holds `λ_{j+3}`; at least `max_order` entries are
    /// required.
    pub fn new(standardized: &[T], max_order: usize) -> Self {
        assert!(max_order <= MAX_TERMS);
        assert!(standardized.len() >= max_order);
        // λ_{m+2}/(m+2)! for m = 1..=max_order
        let mut scaled = Vec::with_capacity(max_order);
        let mut fact = T::lit(2.0);
        for (m, &lambda) in standardized.iter().take(max_order).enumerate() {
            fact = fact * T::from_count(m + 3);
            scaled.push(lambda / fact);
        }
        let mut terms = Vec::new();
        for s in 1..=max_order {
            for part in partitions(s) {
                let mut coef = T::one();
                let mut r = 0;
                for (idx, &k) in part.iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    r += k;
                    let mut k_fact = T::one();
                    for i in 2..=k {
                        k_fact = k_fact * T::from_count(i);
                    }
                    coef = coef * scaled[idx].powi(k as i32) / k_fact;
                }
                if coef != T::zero() {
                    terms.push(SeriesTerm {
                        order: s,
                        hermite: s + 2 * r - 1,
                        coef,
                    });
                }
            }
        }
        Self { terms, max_order }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn max_hermite(&self) -> usize {
        self.terms.iter().map(|t| t.hermite).max().unwrap_or(0)
    }

    /// Sum of the CDF corrections, `Σ c·He_{s+2r−1}(z)`.
    pub fn cdf_correction(&self, z: T) -> T {
        let he = hermite_he(z, self.max_hermite());
        self.terms
            .iter()
            .fold(T::zero(), |acc, t| acc + t.coef * he[t.hermite])
    }

    /// Approximate standardized CDF, clamped to `[0, 1]`.
    pub fn cdf(&self, z: T) -> T {
        let v = norm_cdf(z) - norm_pdf(z) * self.cdf_correction(z);
        v.max(T::zero()).min(T::one())
    }

    /// Approximate standardized density, clamped at zero.
    pub fn pdf(&self, z: T) -> T {
        let he = hermite_he(z, self.max_hermite() + 1);
        let corr = self
            .terms
            .iter()
            .fold(T::zero(), |acc, t| acc + t.coef * he[t.hermite + 1]);
        (norm_pdf(z) * (T::one() + corr)).max(T::zero())
    }

    /// Cornish–Fisher adjusted normal deviate `w(z)` using the first
    /// `order` correction orders.
    ///
    /// The expansion is obtained numerically at the given `z`: writing
    /// `x = z + Σ_s a_s ε^s`, the identity `F(x) = Φ(z)` is expanded in
    /// truncated power series in `ε` (Taylor series of `Φ` and of
    /// `φ·He_m` about `z`) and solved order by order for `a_s`.
    pub fn cornish_fisher(&self, z: T, order: usize) -> T {
        let order = order.min(self.max_order);
        if order == 0 {
            return z;
        }
        let terms: Vec<&SeriesTerm<T>> = self.terms.iter().filter(|t| t.order <= order).collect();
        let max_h = terms.iter().map(|t| t.hermite).max().unwrap_or(0);
        let he = hermite_he(z, max_h + order + 1);
        let len = order + 1;

        // inverse factorials with alternating sign: (−1)^k / k!
        let mut signed_inv_fact = vec![T::one(); len];
        for k in 1..len {
            signed_inv_fact[k] = -signed_inv_fact[k - 1] / T::from_count(k);
        }

        let mut delta = vec![T::zero(); len];
        for s in 1..=order {
            // powers δ^k, k = 1..=s, truncated at ε^s
            let mut powers: Vec<Vec<T>> = Vec::with_capacity(s + 1);
            let mut unit = vec![T::zero(); len];
            unit[0] = T::one();
            powers.push(unit);
            for k in 1..=s {
                let next = series_mul(&powers[k - 1], &delta, s);
                powers.push(next);
            }

            // ε^s coefficient of Φ(z+δ)/φ(z) − Φ(z)/φ(z)
            let mut resid = T::zero();
            for k in 1..=s {
                // (−1)^{k−1} He_{k−1}(z) / k!
                resid = resid - signed_inv_fact[k] * he[k - 1] * powers[k][s];
            }
            // minus ε^{order} φ(z+δ) He_m(z+δ) / φ(z) for each series term
            for t in &terms {
                if t.order > s {
                    continue;
                }
                let need = s - t.order;
                let mut acc = T::zero();
                for k in 0..=need {
                    acc = acc + signed_inv_fact[k] * he[t.hermite + k] * powers[k][need];
                }
                resid = resid - t.coef * acc;
            }
            delta[s] = -resid;
        }
        delta.iter().fold(z, |acc, &d| acc + d)
    }
}

// Product of two truncated power series, keeping coefficients 0..=upto.
fn series_mul<T: Real>(a: &[T], b: &[T], upto: usize) -> Vec<T> {
    let mut out = vec![T::zero(); a.len()];
    for i in 0..=upto {
        if a[i] == T::zero() {
            continue;
        }
        for j in 0..=(upto - i) {
            out[i + j] = out[i + j] + a[i] * b[j];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_recurrence() {
        let x = 1.3_f64;
        let he = hermite_he(x, 5);
        assert_relative_eq!(he[2], x * x - 1.0, epsilon = 1e-14);
        assert_relative_eq!(he[3], x.powi(3) - 3.0 * x, epsilon = 1e-14);
        assert_relative_eq!(he[5], x.powi(5) - 10.0 * x.powi(3) + 15.0 * x, epsilon = 1e-13);
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=MAX_TERMS).map(|s| partitions(s).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
        for s in 1..=MAX_TERMS {
            for p in partitions(s) {
                let total: usize = p.iter().enumerate().map(|(i, k)| (i + 1) * k).sum();
                assert_eq!(total, s);
            }
        }
    }

    #[test]
    fn first_two_cdf_corrections() {
        let (g1, g2) = (0.4_f64, -0.3_f64);
        let series = EdgeworthSeries::new(&[g1, g2], 2);
        for &z in &[-1.7_f64, 0.0, 0.4, 2.2] {
            let he = hermite_he(z, 5);
            let expected = g1 / 6.0 * he[2] + g2 / 24.0 * he[3] + g1 * g1 / 72.0 * he[5];
            assert_relative_eq!(series.cdf_correction(z), expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn first_cornish_fisher_adjustments() {
        let (g1, g2) = (0.35_f64, 0.2_f64);
        let series = EdgeworthSeries::new(&[g1, g2], 2);
        for &z in &[-2.3_f64, -0.5, 0.0, 1.1, 2.9] {
            let one = z + g1 / 6.0 * (z * z - 1.0);
            assert_relative_eq!(series.cornish_fisher(z, 1), one, epsilon = 1e-14);
            let two = one + g2 / 24.0 * (z.powi(3) - 3.0 * z)
                - g1 * g1 / 36.0 * (2.0 * z.powi(3) - 5.0 * z);
            assert_relative_eq!(series.cornish_fisher(z, 2), two, epsilon = 1e-13);
        }
    }

    #[test]
    fn third_cornish_fisher_adjustment() {
        // order-3 Cornish–Fisher term (Abramowitz & Stegun 26.2.51)
        let (g1, g2, g3) = (0.3_f64, 0.25_f64, -0.15_f64);
        let series = EdgeworthSeries::new(&[g1, g2, g3], 3);
        for &z in &[-1.9_f64, 0.7, 2.1] {
            let two = series.cornish_fisher(z, 2);
            let h3 = g3 / 120.0 * (z.powi(4) - 6.0 * z * z + 3.0)
                - g1 * g2 / 24.0 * (z.powi(4) - 5.0 * z * z + 2.0)
                + g1.powi(3) / 324.0 * (12.0 * z.powi(4) - 53.0 * z * z + 17.0);
            assert_relative_eq!(series.cornish_fisher(z, 3), two + h3, epsilon = 1e-13);
        }
    }
}
