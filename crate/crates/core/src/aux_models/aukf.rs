//! Augmented unscented Kalman filter evaluation of the discretized
//! square-root auxiliary model
//!
//!   yₜ = ln(xₜ) + εₜ,            εₜ ~ N(·, π²/2)
//!   xₜ = β₁ + β₂xₜ₋₁ + β₃√xₜ₋₁·eₜ,  eₜ truncated normal, eₜ > −β₁/β₃,
//!
//! propagating a 3×7 matrix of augmented sigma points (state, state noise,
//! measurement noise) through the transition and measurement maps and
//! forming Gaussian likelihood increments from the predicted moments.

use crate::error::{Error, Result};
use crate::kernels::{TruncNormalSpec, LOG_CHISQ_MEAN, LOG_CHISQ_VAR};
use crate::special::LN_SQRT_2PI;

/// Sigma-point spread a = b = √3, the Gaussian-optimal choice; with a
/// 3-dimensional augmented state, moment matching then forces outer
/// weights 1/(2·3) = 1/6 and center weight 0.
pub const SIGMA_SPREAD: f64 = 1.732_050_807_568_877_2;
pub const SIGMA_WEIGHTS: [f64; 7] = [
    0.0,
    1.0 / 6.0,
    1.0 / 6.0,
    1.0 / 6.0,
    1.0 / 6.0,
    1.0 / 6.0,
    1.0 / 6.0,
];

/// Smallest state value admitted before √x or ln(x) is taken.
const STATE_FLOOR: f64 = 1e-10;
/// Variance floor keeping the filtered state variance positive through the
/// Kalman update's subtraction.
const VAR_FLOOR: f64 = 1e-12;

/// 3×7 matrix of augmented sigma points. Row 1 holds the state, row 2 the
/// state noise, row 3 the measurement noise; columns are
/// [center, +state, +state-noise, +meas-noise, −state, −state-noise, −meas-noise].
#[derive(Debug, Clone)]
pub struct SigmaPointMatrix {
    pub points: [[f64; 7]; 3],
    pub weights: [f64; 7],
}

impl SigmaPointMatrix {
    /// Build from per-row (mean, variance) pairs; each row's weighted mean
    /// reproduces its center and its weighted variance the given variance.
    pub fn build(state: (f64, f64), state_noise: (f64, f64), meas_noise: (f64, f64)) -> Self {
        let mut points = [[0.0; 7]; 3];
        for (row, (mean, var)) in
            [state, state_noise, meas_noise].iter().enumerate().map(|(i, &mv)| (i, mv))
        {
            let spread = SIGMA_SPREAD * var.max(0.0).sqrt();
            points[row] = [mean; 7];
            points[row][row + 1] = mean + spread;
            points[row][row + 4] = mean - spread;
        }
        Self { points, weights: SIGMA_WEIGHTS }
    }

    /// Floor every entry of one row (sigma-point truncation for restricted
    /// supports).
    pub fn floor_row(&mut self, row: usize, floor: f64) {
        for v in self.points[row].iter_mut() {
            *v = v.max(floor);
        }
    }

    /// Smoothly floor one row: softplus transition of the given width in
    /// place of the hard max. A hard floor flips per time step as β moves,
    /// littering the likelihood with micro-kinks that leave no point where
    /// a finite-difference score vanishes; the mollified floor keeps the
    /// surface C² while agreeing with the hard floor away from the bound.
    pub fn smooth_floor_row(&mut self, row: usize, floor: f64, width: f64) {
        for v in self.points[row].iter_mut() {
            let u = (*v - floor) / width;
            // floor + width·softplus(u), with the exact asymptote once the
            // exp would underflow/overflow.
            *v = if u > 34.0 {
                *v
            } else if u < -34.0 {
                floor
            } else {
                floor + width * u.exp().ln_1p()
            };
        }
    }
}

/// Auxiliary parameters β = (β₁, β₂, β₃) of the discretized model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxParamsSq {
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
}

/// Parameter floor mirroring the φ restrictions (strict positivity and
/// β₂ bounded away from 0 and 1).
pub const AUX_SQ_FLOOR: f64 = 1e-5;

impl AuxParamsSq {
    /// The analogue of the structural 2φ₁ ≥ φ₃² restriction is NOT imposed
    /// on β: the auxiliary pseudo-true optimum for log-chi-squared data
    /// lies strictly inside the 2β₁ < β₃² region, so constraining it pins
    /// the MLE to the boundary where the score cannot vanish. The filter
    /// needs only positivity, which the sigma-point truncation supplies.
    pub fn new(beta1: f64, beta2: f64, beta3: f64) -> Result<Self> {
        if !(beta1 >= AUX_SQ_FLOOR && beta3 >= AUX_SQ_FLOOR) {
            return Err(Error::InvalidParam(format!(
                "beta1 and beta3 must be at least {AUX_SQ_FLOOR}, got {beta1}, {beta3}"
            )));
        }
        if !(beta2 >= AUX_SQ_FLOOR && beta2 <= 1.0 - AUX_SQ_FLOOR) {
            return Err(Error::InvalidParam(format!(
                "beta2 must lie in [{AUX_SQ_FLOOR}, 1-{AUX_SQ_FLOOR}], got {beta2}"
            )));
        }
        Ok(Self { beta1, beta2, beta3 })
    }
}

/// Where the measurement-noise sigma row is centered. The filter follows
/// the λ*/γ* construction literally by default (γ* = E[ln η²] ≈ −1.27);
/// `Zero` matches the mean-zero declaration of εₜ instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseCenter {
    #[default]
    AppendixC,
    Zero,
}

/// Per-time-step filter moments, recorded for the affine-exactness checks.
#[derive(Debug, Clone, Default)]
pub struct AukfTrace {
    pub loglik: f64,
    pub pred_state_mean: Vec<f64>,
    pub pred_state_var: Vec<f64>,
    pub pred_obs_mean: Vec<f64>,
    pub pred_obs_var: Vec<f64>,
}

/// Generic augmented sigma-point filter over scalar transition map
/// k(state, state_noise) and measurement map h(state, meas_noise).
///
/// Per step: propagate the current matrix through k, redraw sigma points at
/// the predicted moments, propagate through h, form the Gaussian increment,
/// then apply the Kalman update with gain cov(x,y)/var(y). When
/// `condition_on_first` is set, the t = 1 increment is not accumulated (the
/// filter still assimilates y₁).
pub fn aukf_filter<K, H, B>(
    y: &[f64],
    init: (f64, f64),
    mut build: B,
    k: K,
    h: H,
    condition_on_first: bool,
) -> Result<AukfTrace>
where
    K: Fn(f64, f64) -> f64,
    H: Fn(f64, f64) -> f64,
    B: FnMut((f64, f64)) -> SigmaPointMatrix,
{
    if y.len() < 2 {
        return Err(Error::InvalidParam(format!("AUKF needs T >= 2, got {}", y.len())));
    }
    let (mut mean, mut var) = init;
    let mut trace = AukfTrace::default();
    for (t, &yt) in y.iter().enumerate() {
        // Predict the state from the time t-1 filtered moments.
        let prior = build((mean, var));
        let mut kvals = [0.0; 7];
        for i in 0..7 {
            kvals[i] = k(prior.points[0][i], prior.points[1][i]);
        }
        let pred_mean: f64 =
            prior.weights.iter().zip(&kvals).map(|(w, v)| w * v).sum();
        let pred_var: f64 = prior
            .weights
            .iter()
            .zip(&kvals)
            .map(|(w, v)| w * (v - pred_mean) * (v - pred_mean))
            .sum();

        // Redraw sigma points at the predicted moments, propagate through h.
        let pred = build((pred_mean, pred_var));
        let mut hvals = [0.0; 7];
        for i in 0..7 {
            hvals[i] = h(pred.points[0][i], pred.points[2][i]);
        }
        let obs_mean: f64 = pred.weights.iter().zip(&hvals).map(|(w, v)| w * v).sum();
        let obs_var: f64 = pred
            .weights
            .iter()
            .zip(&hvals)
            .map(|(w, v)| w * (v - obs_mean) * (v - obs_mean))
            .sum();
        if !(obs_var > 0.0 && obs_var.is_finite() && obs_mean.is_finite()) {
            return Err(Error::Numerical(format!(
                "AUKF predicted observation variance degenerate at t={} ({obs_var})",
                t + 1
            )));
        }

        let innovation = yt - obs_mean;
        if t > 0 || !condition_on_first {
            trace.loglik +=
                -LN_SQRT_2PI - 0.5 * obs_var.ln() - 0.5 * innovation * innovation / obs_var;
        }
        trace.pred_state_mean.push(pred_mean);
        trace.pred_state_var.push(pred_var);
        trace.pred_obs_mean.push(obs_mean);
        trace.pred_obs_var.push(obs_var);

        let cross: f64 = pred
            .weights
            .iter()
            .zip(pred.points[0].iter().zip(&hvals))
            .map(|(w, (x, v))| w * (x - pred_mean) * (v - obs_mean))
            .sum();
        let gain = cross / obs_var;
        mean = pred_mean + gain * innovation;
        var = (pred_var - gain * gain * obs_var).max(VAR_FLOOR);
    }
    if !trace.loglik.is_finite() {
        return Err(Error::Numerical("AUKF log-likelihood not finite".into()));
    }
    Ok(trace)
}

/// Sigma-matrix builder for the square-root auxiliary model: the
/// state-noise row carries the truncated-normal moments (λ*, var(e)) and
/// is floored at the truncation bound −β₁/β₃; the measurement row carries
/// (γ*, π²/2).
pub fn sv_sq_builder(
    beta: &AuxParamsSq,
    noise_center: NoiseCenter,
) -> impl FnMut((f64, f64)) -> SigmaPointMatrix {
    let support_floor = beta.beta1;
    let bound = -beta.beta1 / beta.beta3;
    let spec = TruncNormalSpec::new(bound).expect("finite truncation bound");
    let meas_center = match noise_center {
        NoiseCenter::AppendixC => LOG_CHISQ_MEAN,
        NoiseCenter::Zero => 0.0,
    };
    move |state: (f64, f64)| {
        let mut m = SigmaPointMatrix::build(
            state,
            (spec.mean_lambda, spec.variance),
            (meas_center, LOG_CHISQ_VAR),
        );
        // Truncate to the model's own support: the transition density lives
        // on x > β₁ (up to the parameter floor), and a tiny absolute floor
        // would explode ln(x) whenever the Gaussian spread crosses zero.
        m.smooth_floor_row(0, support_floor, 0.5 * support_floor);
        m.floor_row(1, bound);
        m
    }
}

/// AUKF log-likelihood of the observations under β, conditioning on y₁:
/// the sum over t = 2..T of Gaussian log-densities with the filter's
/// predicted mean and variance.
pub fn aukf_loglik(y: &[f64], beta: &AuxParamsSq, noise_center: NoiseCenter) -> Result<f64> {
    let init_mean = beta.beta1 / (1.0 - beta.beta2);
    let init_var = beta.beta3 * beta.beta3 * init_mean / (1.0 - beta.beta2 * beta.beta2);
    let b2 = beta.beta2;
    let (b1, b3) = (beta.beta1, beta.beta3);
    let trace = aukf_filter(
        y,
        (init_mean, init_var),
        sv_sq_builder(beta, noise_center),
        move |x, v| b1 + b2 * x + b3 * x.max(STATE_FLOOR).sqrt() * v,
        move |x, e| x.max(STATE_FLOOR).ln() + e,
        true,
    )?;
    Ok(trace.loglik)
}
