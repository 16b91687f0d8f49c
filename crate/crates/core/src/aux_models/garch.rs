//! GARCH(1,1) auxiliary likelihoods for the two α-stable models: an
//! absolute-deviation form with standardized Student-t errors for the
//! conditionally stable returns, and the conventional squared form with
//! Gaussian errors for stable log-volatility innovations.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::special::LN_SQRT_2PI;

/// β = (β₁, β₂, β₃, β₄) of the absolute-deviation GARCH-t model
/// xₜ = β₁ + β₂xₜ₋₁|εₜ₋₁| + β₃xₜ₋₁ on the conditional standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParamsGarchT {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
}

impl AuxParamsGarchT {
    pub fn new(beta1: f64, beta2: f64, beta3: f64, beta4: f64) -> Result<Self> {
        if !(beta1 > 0.0 && beta1.is_finite()) {
            return Err(Error::InvalidParam(format!("beta1 must be positive, got {beta1}")));
        }
        if beta2 < 0.0 || beta3 < 0.0 {
            return Err(Error::InvalidParam(format!(
                "ARCH/GARCH coefficients must be non-negative, got {beta2}, {beta3}"
            )));
        }
        if beta2 + beta3 >= 1.0 {
            return Err(Error::InvalidParam(format!(
                "stationarity requires beta2 + beta3 < 1, got {}",
                beta2 + beta3
            )));
        }
        if !(beta4 > 2.0) {
            return Err(Error::InvalidParam(format!(
                "degrees of freedom must exceed 2, got {beta4}"
            )));
        }
        Ok(Self { beta1, beta2, beta3, beta4 })
    }
}

/// Log density of the standardized Student-t (unit variance): the t(ν)
/// density rescaled so var(ε) = 1, requiring ν > 2.
pub fn std_t_logpdf(eps: f64, nu: f64) -> f64 {
    ln_gamma(0.5 * (nu + 1.0))
        - ln_gamma(0.5 * nu)
        - 0.5 * (std::f64::consts::PI * (nu - 2.0)).ln()
        - 0.5 * (nu + 1.0) * (eps * eps / (nu - 2.0)).ln_1p()
}

/// Log-likelihood of the GARCH(1,1)-t model on conditional standard
/// deviations, conditioning on the first observation. x₁ starts at the
/// sample mean absolute deviation.
pub fn garch_t_loglik(r: &[f64], beta: &AuxParamsGarchT) -> Result<f64> {
    if r.len() < 2 {
        return Err(Error::InvalidParam("GARCH-t needs at least 2 observations".into()));
    }
    let mad = r.iter().map(|v| v.abs()).sum::<f64>() / r.len() as f64;
    let mut x = mad;
    if !(x > 0.0) {
        return Err(Error::Numerical("initial conditional sd is zero".into()));
    }
    let mut ll = 0.0;
    for t in 1..r.len() {
        // β₂·xₜ₋₁·|εₜ₋₁| = β₂·|rₜ₋₁| since εₜ₋₁ = rₜ₋₁/xₜ₋₁.
        x = beta.beta1 + beta.beta2 * r[t - 1].abs() + beta.beta3 * x;
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Numerical(format!("conditional sd degenerate at t={t}")));
        }
        let eps = r[t] / x;
        ll += std_t_logpdf(eps, beta.beta4) - x.ln();
    }
    if !ll.is_finite() {
        return Err(Error::Numerical("GARCH-t log-likelihood not finite".into()));
    }
    Ok(ll)
}

/// Log-likelihood of the conventional GARCH(1,1) on conditional variances
/// xₜ = β₁ + β₂xₜ₋₁εₜ₋₁² + β₃xₜ₋₁ with Gaussian errors, conditioning on
/// the first observation. x₁ starts at the sample variance.
pub fn garch_loglik(r: &[f64], beta: &[f64; 3]) -> Result<f64> {
    let [b1, b2, b3] = *beta;
    if !(b1 > 0.0 && b2 >= 0.0 && b3 >= 0.0 && b2 + b3 < 1.0) {
        return Err(Error::InvalidParam(format!(
            "GARCH constraints violated: beta = {beta:?}"
        )));
    }
    if r.len() < 2 {
        return Err(Error::InvalidParam("GARCH needs at least 2 observations".into()));
    }
    let mut x = r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64;
    if !(x > 0.0) {
        return Err(Error::Numerical("initial conditional variance is zero".into()));
    }
    let mut ll = 0.0;
    for t in 1..r.len() {
        // β₂·xₜ₋₁·εₜ₋₁² = β₂·rₜ₋₁².
        x = b1 + b2 * r[t - 1] * r[t - 1] + b3 * x;
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::Numerical(format!("conditional variance degenerate at t={t}")));
        }
        ll += -LN_SQRT_2PI - 0.5 * x.ln() - 0.5 * r[t] * r[t] / x;
    }
    if !ll.is_finite() {
        return Err(Error::Numerical("GARCH log-likelihood not finite".into()));
    }
    Ok(ll)
}
