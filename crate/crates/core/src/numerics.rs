//! Special functions and distribution primitives.
//!
//! The normal CDF is evaluated through `erfc` so that upper-tail P-values stay
//! accurate far into the tail (`norm_sf(37)` is still a normal number). The
//! Student t CDF goes through the regularized incomplete beta function.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{invalid, Result};

/// Smallest P-value handed to the HC formulas.
pub const PVALUE_FLOOR: f64 = 1e-300;

/// A real number in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(invalid!("probability {value} is outside [0, 1]"))
        }
    }

    /// Accepts only values strictly inside `(0, 1)`.
    pub fn open(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(invalid!("probability {value} is outside (0, 1)"))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Clamps a computed P-value into `[PVALUE_FLOOR, 1]`.
#[inline]
pub fn clamp_pvalue(p: f64) -> f64 {
    p.clamp(PVALUE_FLOOR, 1.0)
}

/// Standard normal CDF Φ(x).
pub fn norm_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid!("normal CDF argument {x} is not finite"));
    }
    Ok(phi(x))
}

/// Upper tail 1 − Φ(x), accurate for large x.
pub fn norm_sf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid!("normal tail argument {x} is not finite"));
    }
    Ok(phi(-x))
}

#[inline]
pub(crate) fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

// Acklam's rational approximation, used as the starting point for Halley steps.
const QA: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.38357751867269e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
const QB: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
const QC: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const QD: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];

fn quantile_lower_start(p: f64) -> f64 {
    // valid for p <= 0.5
    if p < 0.02425 {
        let q = libm::sqrt(-2.0 * libm::log(p));
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    }
}

/// Inverse of the standard normal CDF.
pub fn norm_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid!("normal quantile needs p in (0, 1), got {p}"));
    }
    // Work in the lower half so the residual Φ(x) − p is formed without cancellation.
    let (target, sign) = if p <= 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    let mut x = quantile_lower_start(target);
    for _ in 0..3 {
        let e = phi(x) - target;
        let u = e * libm::sqrt(2.0 * PI) * libm::exp(0.5 * x * x);
        let step = u / (1.0 + 0.5 * x * u);
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(sign * x)
}

fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=20_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` with `y = 1 − x` supplied
/// separately so callers can avoid forming it by subtraction.
fn reg_inc_beta_xy(x: f64, y: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * libm::log(x) + b * libm::log(y) - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        libm::exp(ln_front) * beta_cf(x, a, b) / a
    } else {
        1.0 - libm::exp(ln_front) * beta_cf(y, b, a) / b
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !(0.0..=1.0).contains(&x) {
        return Err(invalid!("incomplete beta needs a, b > 0 and x in [0, 1]"));
    }
    Ok(reg_inc_beta_xy(x, 1.0 - x, a, b))
}

/// Lower tail `P(T ≤ -|t|)` of the central t distribution.
fn t_lower_tail(t: f64, df: f64) -> f64 {
    let t2 = t * t;
    let denom = df + t2;
    0.5 * reg_inc_beta_xy(df / denom, t2 / denom, 0.5 * df, 0.5)
}

/// CDF of Student's t distribution with `df` degrees of freedom.
pub fn student_t_cdf(x: f64, df: u64) -> Result<f64> {
    if df < 1 {
        return Err(invalid!("t distribution needs df >= 1"));
    }
    if !x.is_finite() {
        return Err(invalid!("t CDF argument {x} is not finite"));
    }
    let tail = t_lower_tail(x, df as f64);
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// Upper tail `P(T > x)` of Student's t, accurate for large positive x.
pub fn student_t_sf(x: f64, df: u64) -> Result<f64> {
    student_t_cdf(-x, df)
}

/// Binomial Kullback–Leibler divergence `D(p0, p1)`.
///
/// Uses `0 · log 0 = 0`. Returns `f64::INFINITY` when `p1` is 0 or 1 and
/// differs from `p0`.
pub fn binomial_kl(p0: f64, p1: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p0) || !(0.0..=1.0).contains(&p1) {
        return Err(invalid!("divergence arguments must lie in [0, 1]"));
    }
    Ok(kl_unchecked(p0, p1))
}

#[inline]
pub(crate) fn kl_unchecked(p0: f64, p1: f64) -> f64 {
    let head = if p0 == 0.0 {
        0.0
    } else if p1 == 0.0 {
        return f64::INFINITY;
    } else {
        p0 * libm::log(p0 / p1)
    };
    let tail = if p0 == 1.0 {
        0.0
    } else if p1 == 1.0 {
        return f64::INFINITY;
    } else {
        (1.0 - p0) * libm::log((1.0 - p0) / (1.0 - p1))
    };
    // rounding can leave a tiny negative value when p0 ≈ p1
    (head + tail).max(0.0)
}
