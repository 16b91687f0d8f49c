//! Data generating processes: the three latent-volatility models and the
//! AR(1)-sufficient summary statistics of the observables.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::kernels::{
    sample_alpha_stable, sample_cir_stationary, sample_cir_transition, sample_log_chisq,
    LogChiSqNoise, RngStream, StableParams,
};

/// Square-root (Heston) volatility parameters φ = (φ₁, φ₂, φ₃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvSqParams {
    /// Drift level, > 0.
    pub phi1: f64,
    /// Mean reversion, in (0, 1).
    pub phi2: f64,
    /// Vol-of-vol, > 0, with 2φ₁ ≥ φ₃² so volatility stays positive.
    pub phi3: f64,
}

impl SvSqParams {
    pub fn new(phi1: f64, phi2: f64, phi3: f64) -> Result<Self> {
        if !(phi1 > 0.0 && phi1.is_finite()) {
            return Err(Error::InvalidParam(format!("phi1 must be positive, got {phi1}")));
        }
        if !(phi2 > 0.0 && phi2 < 1.0) {
            return Err(Error::InvalidParam(format!("phi2 must lie in (0,1), got {phi2}")));
        }
        if !(phi3 > 0.0 && phi3.is_finite()) {
            return Err(Error::InvalidParam(format!("phi3 must be positive, got {phi3}")));
        }
        if 2.0 * phi1 < phi3 * phi3 {
            return Err(Error::InvalidParam(format!(
                "feasibility 2*phi1 >= phi3^2 violated: phi1={phi1}, phi3={phi3}"
            )));
        }
        Ok(Self { phi1, phi2, phi3 })
    }

    /// Stationary mean φ₁/φ₂ of the volatility state.
    pub fn stationary_mean(&self) -> f64 {
        self.phi1 / self.phi2
    }

    /// Stationary variance φ₃²φ₁/(2φ₂²).
    pub fn stationary_var(&self) -> f64 {
        self.phi3 * self.phi3 * self.phi1 / (2.0 * self.phi2 * self.phi2)
    }
}

/// Log-volatility AR(1) parameters φ = (φ₁, φ₂, φ₃, φ₄) for the two
/// α-stable models; φ₄ is the stable tail index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableSvParams {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub phi4: f64,
}

impl StableSvParams {
    pub fn new(phi1: f64, phi2: f64, phi3: f64, phi4: f64) -> Result<Self> {
        if !phi1.is_finite() {
            return Err(Error::InvalidParam("phi1 must be finite".into()));
        }
        if !(phi2 > 0.0 && phi2 < 1.0) {
            return Err(Error::InvalidParam(format!("phi2 must lie in (0,1), got {phi2}")));
        }
        if !(phi3 > 0.0 && phi3.is_finite()) {
            return Err(Error::InvalidParam(format!("phi3 must be positive, got {phi3}")));
        }
        if !(phi4 > 1.0 && phi4 < 2.0) {
            return Err(Error::InvalidParam(format!("phi4 must lie in (1,2), got {phi4}")));
        }
        Ok(Self { phi1, phi2, phi3, phi4 })
    }
}

/// Uniform prior box for the SV-SQ experiments: 0 < φ₂ < 1, φ₁ ≤ 0.025,
/// φ₃ ≤ 0.089, intersected with the feasibility region 2φ₁ ≥ φ₃².
#[derive(Debug, Clone, Copy)]
pub struct SvSqPriorBox {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl Default for SvSqPriorBox {
    fn default() -> Self {
        Self { lower: [1e-6, 1e-6, 1e-6], upper: [0.025, 1.0 - 1e-6, 0.089] }
    }
}

impl SvSqPriorBox {
    pub fn contains(&self, phi: &[f64; 3]) -> bool {
        phi.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&lo, &hi))| v >= lo && v <= hi)
    }

    pub fn feasible(&self, phi: &[f64; 3]) -> bool {
        self.contains(phi) && 2.0 * phi[0] >= phi[2] * phi[2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelTag {
    /// Square-root volatility observed through y = ln r².
    SvSq,
    /// Conditionally α-stable returns with log-normal volatility.
    StableReturnSv,
    /// Gaussian returns with α-stable log-volatility innovations.
    SvStableVol,
}

/// One simulated path: the observable sequence and the latent states.
///
/// For [`ModelTag::SvSq`] the `returns` field holds the log-squared
/// observable yₜ = ln(rₜ²) directly; the two stable models store raw
/// returns rₜ.
#[derive(Debug, Clone)]
pub struct SimPath {
    pub returns: Vec<f64>,
    pub states: Vec<f64>,
    pub model_tag: ModelTag,
}

/// Discarded transient for the log-volatility recursions, whose stable-law
/// stationary distribution has no closed form to initialize from.
const LOG_VOL_BURN_IN: usize = 100;

fn check_len(t_len: usize) -> Result<()> {
    if t_len < 2 {
        return Err(Error::InvalidParam(format!("need T >= 2 observations, got {t_len}")));
    }
    Ok(())
}

/// SV-SQ path: x₁ from the stationary gamma law, exact CIR transitions,
/// yₜ = ln(xₜ) + wₜ with mean-zero log-chi-squared wₜ.
pub fn simulate_sv_sq(phi: &SvSqParams, t_len: usize, rng: &mut RngStream) -> Result<SimPath> {
    check_len(t_len)?;
    let noise = LogChiSqNoise::default();
    let mut states = Vec::with_capacity(t_len);
    let mut returns = Vec::with_capacity(t_len);
    let mut x = sample_cir_stationary(phi, rng);
    for t in 0..t_len {
        if t > 0 {
            x = sample_cir_transition(x, phi, rng)?;
        }
        states.push(x);
        returns.push(x.ln() + sample_log_chisq(&noise, rng));
    }
    Ok(SimPath { returns, states, model_tag: ModelTag::SvSq })
}

fn simulate_log_vol_ar1<R: Rng + ?Sized>(
    phi1: f64,
    phi2: f64,
    phi3: f64,
    t_len: usize,
    mut innovation: impl FnMut(&mut R) -> f64,
    rng: &mut R,
) -> Vec<f64> {
    let mut ln_x = phi1 / (1.0 - phi2);
    for _ in 0..LOG_VOL_BURN_IN {
        ln_x = phi1 + phi2 * ln_x + phi3 * innovation(rng);
    }
    (0..t_len)
        .map(|_| {
            ln_x = phi1 + phi2 * ln_x + phi3 * innovation(rng);
            ln_x.exp()
        })
        .collect()
}

/// Conditionally α-stable returns: rₜ = xₜ^{1/φ₄}·wₜ with wₜ ~ S(φ₄, −1, 0, 1)
/// and Gaussian AR(1) log-volatility.
pub fn simulate_stable_return_sv(
    phi: &StableSvParams,
    t_len: usize,
    rng: &mut RngStream,
) -> Result<SimPath> {
    check_len(t_len)?;
    let stable = StableParams::new(phi.phi4, -1.0, 0.0, 1.0)?;
    let states = simulate_log_vol_ar1(
        phi.phi1,
        phi.phi2,
        phi.phi3,
        t_len,
        |r| r.sample(StandardNormal),
        rng,
    );
    let returns = states
        .iter()
        .map(|&x| x.powf(1.0 / phi.phi4) * sample_alpha_stable(&stable, rng))
        .collect();
    Ok(SimPath { returns, states, model_tag: ModelTag::StableReturnSv })
}

/// Gaussian returns rₜ = xₜ^{1/2}·wₜ with α-stable innovations driving
/// the AR(1) log-volatility.
pub fn simulate_sv_stable_vol(
    phi: &StableSvParams,
    t_len: usize,
    rng: &mut RngStream,
) -> Result<SimPath> {
    check_len(t_len)?;
    let stable = StableParams::new(phi.phi4, -1.0, 0.0, 1.0)?;
    let states = simulate_log_vol_ar1(
        phi.phi1,
        phi.phi2,
        phi.phi3,
        t_len,
        |r| sample_alpha_stable(&stable, r),
        rng,
    );
    let returns = states
        .iter()
        .map(|&x| x.sqrt() * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(SimPath { returns, states, model_tag: ModelTag::SvStableVol })
}

/// Observable transformation applied before the AR(1) summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SummaryTransform {
    /// yₜ = ln(rₜ²); zero returns are clamped at 1e-300 before the log.
    LogSquared,
    /// yₜ = rₜ.
    Raw,
}

/// The five statistics sufficient (under Gaussianity) for an observed AR(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryVector {
    pub s: [f64; 5],
}

/// s₁ = Σ_{t=2}^{T−1} yₜ, s₂ = Σ_{t=2}^{T−1} yₜ², s₃ = Σ_{t=2}^{T} yₜyₜ₋₁,
/// s₄ = y₁ + y_T, s₅ = y₁² + y_T².
pub fn ar1_summary_stats(data: &[f64], transform: SummaryTransform) -> Result<SummaryVector> {
    if data.len() < 3 {
        return Err(Error::InvalidParam(format!(
            "AR(1) summaries need at least 3 observations, got {}",
            data.len()
        )));
    }
    let y: Vec<f64> = match transform {
        SummaryTransform::Raw => data.to_vec(),
        SummaryTransform::LogSquared => data.iter().map(|&r| (r * r).max(1e-300).ln()).collect(),
    };
    let t_len = y.len();
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    for t in 1..t_len - 1 {
        s1 += y[t];
        s2 += y[t] * y[t];
    }
    for t in 1..t_len {
        s3 += y[t] * y[t - 1];
    }
    let s4 = y[0] + y[t_len - 1];
    let s5 = y[0] * y[0] + y[t_len - 1] * y[t_len - 1];
    Ok(SummaryVector { s: [s1, s2, s3, s4, s5] })
}
