//! Truncated-normal and log-chi-squared measurement noise kernels.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::special;

/// E[ln η²] for standard-normal η: ψ(1/2) + ln 2 = −(γ_E + ln 2).
pub const LOG_CHISQ_MEAN: f64 = -1.270_362_845_461_478_2;
/// var[ln η²] = π²/2.
pub const LOG_CHISQ_VAR: f64 = 4.934_802_200_544_679;

/// Mean-zero log-chi-squared noise: w = ln(η²) − ω.
#[derive(Debug, Clone, Copy)]
pub struct LogChiSqNoise {
    pub omega: f64,
    pub variance: f64,
}

impl Default for LogChiSqNoise {
    fn default() -> Self {
        Self { omega: LOG_CHISQ_MEAN, variance: LOG_CHISQ_VAR }
    }
}

pub fn sample_log_chisq<R: Rng + ?Sized>(noise: &LogChiSqNoise, rng: &mut R) -> f64 {
    let eta: f64 = rng.sample(StandardNormal);
    (eta * eta).max(1e-300).ln() - noise.omega
}

/// Standard normal truncated below at `lower`, with its closed-form moments.
#[derive(Debug, Clone, Copy)]
pub struct TruncNormalSpec {
    pub lower: f64,
    /// λ(c) = φ(c)/(1 − Φ(c)), the truncated mean.
    pub mean_lambda: f64,
    /// 1 − λ(c)(λ(c) − c), the truncated variance.
    pub variance: f64,
}

impl TruncNormalSpec {
    /// `lower` must be finite or −∞.
    pub fn new(lower: f64) -> Result<Self> {
        if lower.is_nan() || lower == f64::INFINITY {
            return Err(Error::InvalidParam(format!(
                "truncation bound must be finite or -inf, got {lower}"
            )));
        }
        let lambda = special::truncnorm_lambda(lower);
        let variance = if lower == f64::NEG_INFINITY {
            1.0
        } else {
            1.0 - lambda * (lambda - lower)
        };
        Ok(Self { lower, mean_lambda: lambda, variance })
    }
}

/// One draw from the truncated standard normal; every draw exceeds `lower`.
///
/// Inverse-CDF sampling for lower bounds c ≤ 5, Robert's exponential
/// rejection beyond, where the inverse CDF loses tail precision.
pub fn sample_trunc_normal<R: Rng + ?Sized>(spec: &TruncNormalSpec, rng: &mut R) -> f64 {
    let c = spec.lower;
    if c == f64::NEG_INFINITY {
        return rng.sample(StandardNormal);
    }
    if c <= 5.0 {
        let q = special::std_normal_sf(c);
        let u: f64 = rng.gen();
        // 1 − Φ(x) = (1 − u)·q keeps the computation in the upper tail.
        let x = -special::std_normal_ppf(((1.0 - u) * q).max(1e-300));
        return x.max(c);
    }
    let alpha = 0.5 * (c + (c * c + 4.0).sqrt());
    loop {
        let e: f64 = rng.sample(Exp1);
        let z = c + e / alpha;
        let rho = (-(z - alpha) * (z - alpha) / 2.0).exp();
        if rng.gen::<f64>() <= rho {
            return z;
        }
    }
}
