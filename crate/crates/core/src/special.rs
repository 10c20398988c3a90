//! Normal distribution functions, chi moments and the incomplete beta
//! function.

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Standard normal density.
#[inline]
pub fn norm_pdf<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    (-half * x * x).exp() / (T::TAU()).sqrt()
}

/// Standard normal CDF, accurate in both tails.
#[inline]
pub fn norm_cdf<T: Real>(x: T) -> T {
    T::lit(0.5) * (-x * T::FRAC_1_SQRT_2()).erfc()
}

/// Standard normal quantile.
///
/// Acklam's rational approximation followed by one Halley step against
/// [`norm_cdf`]. Returns `-inf`/`+inf` at 0 and 1 and NaN outside `[0, 1]`.
pub fn norm_quantile<T: Real>(p: T) -> T {
    if p.is_nan() || p < T::zero() || p > T::one() {
        return T::nan();
    }
    if p == T::zero() {
        return T::neg_infinity();
    }
    if p == T::one() {
        return T::infinity();
    }
    let pf = p.as_f64();
    let x0 = acklam(pf);
    let x = T::lit(x0);
    // Halley refinement; the residual is formed in the tail nearest p.
    let e = if x < T::zero() {
        norm_cdf(x) - p
    } else {
        (T::one() - p) - norm_cdf(-x)
    };
    let u = e * T::TAU().sqrt() * (x * x * T::lit(0.5)).exp();
    x - u / (T::one() + x * u * T::lit(0.5))
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Raw moment of order `order` of a chi variate with `dof` degrees of freedom:
/// `2^(i/2) Γ((ν+i)/2) / Γ(ν/2)`, evaluated through log-gamma differences.
pub fn chi_raw_moment<T: Real>(dof: T, order: u32) -> Result<T> {
    if !(dof > T::zero()) || !dof.is_finite() {
        return domain(format!("chi degrees of freedom must be positive, got {dof}"));
    }
    if order == 0 {
        return Ok(T::one());
    }
    let half = T::lit(0.5);
    let i = T::lit(order as f64);
    let log_m = half * i * T::LN_2() + (half * (dof + i)).ln_gamma() - (half * dof).ln_gamma();
    Ok(log_m.exp())
}

/// Log of the beta function.
#[inline]
pub fn ln_beta<T: Real>(a: T, b: T) -> T {
    a.ln_gamma() + b.ln_gamma() - (a + b).ln_gamma()
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn beta_reg<T: Real>(a: T, b: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::one() {
        return T::one();
    }
    let front = (a * x.ln() + b * (T::one() - x).ln() - ln_beta(a, b)).exp();
    if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        front * beta_cf(a, b, x) / a
    } else {
        T::one() - front * beta_cf(b, a, T::one() - x) / b
    }
}

// Continued fraction for the incomplete beta, modified Lentz.
fn beta_cf<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = d.recip();
    let mut h = d;
    for m in 1..=400 {
        let m = T::lit(m as f64);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let del = d * c;
        h = h * del;
        if (del - one).abs() <= eps {
            break;
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn normal_reference_values() {
        assert_eq!(norm_cdf(0.0_f64), 0.5);
        assert_relative_eq!(norm_pdf(0.0_f64), 0.3989422804014327, epsilon = 1e-16);
        assert_relative_eq!(norm_cdf(1.959963984540054_f64), 0.975, epsilon = 1e-15);
        assert_relative_eq!(norm_cdf(-8.0_f64), 6.22096057427174e-16, max_relative = 1e-12);
        assert_relative_eq!(norm_quantile(0.975_f64), 1.959963984540054, epsilon = 1e-14);
        assert_relative_eq!(norm_quantile(0.005_f64), -2.5758293035489004, epsilon = 1e-13);
        assert_relative_eq!(norm_quantile(1e-12_f64), -7.034483825301131, epsilon = 1e-10);
        assert_eq!(norm_quantile(0.5_f64), 0.0);
        assert!(norm_quantile(1.5_f64).is_nan());
        assert_eq!(norm_quantile(0.0_f64), f64::NEG_INFINITY);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = norm_quantile(p);
            assert_relative_eq!(norm_cdf(x), p, max_relative = 1e-13);
        }
    }

    #[test]
    fn f32_normal() {
        assert_relative_eq!(norm_quantile(0.975_f32), 1.959964_f32, epsilon = 1e-5);
        assert_relative_eq!(norm_cdf(1.0_f32), 0.8413447_f32, epsilon = 1e-6);
    }

    #[test]
    fn chi_moments() {
        assert_eq!(chi_raw_moment(5.0_f64, 0).unwrap(), 1.0);
        assert_relative_eq!(chi_raw_moment(2.0_f64, 2).unwrap(), 2.0, epsilon = 1e-13);
        assert_relative_eq!(
            chi_raw_moment(1.0_f64, 1).unwrap(),
            0.7978845608028654,
            epsilon = 1e-13
        );
        // E[chi^2] = nu at large dof
        assert_relative_eq!(chi_raw_moment(964.0_f64, 2).unwrap(), 964.0, max_relative = 1e-12);
        assert!(chi_raw_moment(0.0_f64, 1).is_err());
        assert!(chi_raw_moment(-3.0_f64, 1).is_err());
    }

    #[test]
    fn incomplete_beta() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a
        assert_relative_eq!(beta_reg(1.0_f64, 1.0, 0.3), 0.3, epsilon = 1e-14);
        assert_relative_eq!(beta_reg(2.5_f64, 1.0, 0.4), 0.4_f64.powf(2.5), epsilon = 1e-14);
        // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
        let v = beta_reg(0.5_f64, 7.0, 0.2);
        assert_relative_eq!(v, 1.0 - beta_reg(7.0, 0.5, 0.8), epsilon = 1e-14);
        // t distribution: P(|T| < 2) with 10 dof via I_{t²/(t²+ν)}(1/2, ν/2)
        let x = 4.0 / 14.0;
        assert_relative_eq!(beta_reg(0.5_f64, 5.0, x), 0.9266119652292596, epsilon = 1e-12);
    }
}
