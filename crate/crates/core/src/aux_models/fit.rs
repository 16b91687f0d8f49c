//! Auxiliary MLE fitting, numeric scores, and the Hessian-based weight
//! matrix used by the ABC distance criteria.

use nalgebra::DMatrix;

use super::AuxModel;
use crate::error::{Error, Result};
use crate::optim::{minimize_bounded, NelderMeadOptions};

/// A fitted auxiliary model: the maximizer, its log-likelihood, and the
/// Hessian-based covariance estimate over the free coordinates.
#[derive(Debug, Clone)]
pub struct AuxFit {
    pub beta_hat: Vec<f64>,
    pub loglik: f64,
    /// Inverse negative numerical Hessian at β̂, symmetrized and
    /// ridge-repaired to positive definiteness (Cholesky succeeds).
    pub weight: DMatrix<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

fn penalized_loglik(model: &dyn AuxModel, data: &[f64], beta: &[f64]) -> f64 {
    if !model.feasible(beta) {
        return f64::NEG_INFINITY;
    }
    model.loglik(data, beta).unwrap_or(f64::NEG_INFINITY)
}

/// Bounded derivative-free maximization of the auxiliary log-likelihood
/// over the coordinates in `free`, the rest pinned at their `start` values.
pub fn fit_mle_coords(
    model: &dyn AuxModel,
    data: &[f64],
    start: &[f64],
    free: &[usize],
) -> Result<AuxFit> {
    let d = model.dim();
    if start.len() != d {
        return Err(Error::InvalidParam(format!(
            "start has {} coordinates, model {} needs {d}",
            start.len(),
            model.name()
        )));
    }
    if free.is_empty() || free.iter().any(|&i| i >= d) {
        return Err(Error::InvalidParam("free coordinate set invalid".into()));
    }
    if !model.feasible(start) {
        return Err(Error::InvalidParam(format!(
            "start point infeasible for {}: {start:?}",
            model.name()
        )));
    }
    let lower = model.lower();
    let upper = model.upper();
    let sub_lower: Vec<f64> = free.iter().map(|&i| lower[i]).collect();
    let sub_upper: Vec<f64> = free.iter().map(|&i| upper[i]).collect();
    let sub_start: Vec<f64> = free.iter().map(|&i| start[i]).collect();

    let mut full = start.to_vec();
    let objective = |sub: &[f64]| {
        let mut beta = full.clone();
        for (&i, &v) in free.iter().zip(sub) {
            beta[i] = v;
        }
        -penalized_loglik(model, data, &beta)
    };
    let res = minimize_bounded(
        objective,
        &sub_start,
        &sub_lower,
        &sub_upper,
        &NelderMeadOptions::default(),
    );
    for (&i, &v) in free.iter().zip(&res.x) {
        full[i] = v;
    }
    let loglik = -res.f;
    if !loglik.is_finite() {
        return Err(Error::Numerical(format!(
            "auxiliary MLE failed for {}: no finite likelihood found",
            model.name()
        )));
    }
    let weight = hessian_weight(model, data, &full, free)?;
    Ok(AuxFit { beta_hat: full, loglik, weight, converged: res.converged, evaluations: res.evaluations })
}

/// Fit all coordinates from the model's default start.
pub fn fit_mle(model: &dyn AuxModel, data: &[f64], start: &[f64]) -> Result<AuxFit> {
    let free: Vec<usize> = (0..model.dim()).collect();
    fit_mle_coords(model, data, start, &free)
}

/// Average score: central-difference gradient of T⁻¹·loglik.
#[derive(Debug, Clone)]
pub struct ScoreResult {
    pub values: Vec<f64>,
    /// Marks coordinates where a boundary forced a one-sided difference.
    pub one_sided: Vec<bool>,
}

/// Numeric average score over the coordinates in `coords`, evaluated at
/// `beta_hat`; step hᵢ = max(1e-5, 1e-5·|β̂ᵢ|).
pub fn numeric_score_coords(
    model: &dyn AuxModel,
    data: &[f64],
    beta_hat: &[f64],
    coords: &[usize],
) -> Result<ScoreResult> {
    let t_len = data.len() as f64;
    let mut values = Vec::with_capacity(coords.len());
    let mut one_sided = Vec::with_capacity(coords.len());
    let f0 = || -> Result<f64> {
        model.loglik(data, beta_hat)
    };
    for &i in coords {
        let h = (1e-5f64).max(1e-5 * beta_hat[i].abs());
        let mut up = beta_hat.to_vec();
        up[i] += h;
        let mut down = beta_hat.to_vec();
        down[i] -= h;
        let up_ok = model.feasible(&up);
        let down_ok = model.feasible(&down);
        let deriv = match (up_ok, down_ok) {
            (true, true) => {
                one_sided.push(false);
                (model.loglik(data, &up)? - model.loglik(data, &down)?) / (2.0 * h)
            }
            (true, false) => {
                one_sided.push(true);
                (model.loglik(data, &up)? - f0()?) / h
            }
            (false, true) => {
                one_sided.push(true);
                (f0()? - model.loglik(data, &down)?) / h
            }
            (false, false) => {
                return Err(Error::Numerical(format!(
                    "no feasible direction for score coordinate {i}"
                )))
            }
        };
        values.push(deriv / t_len);
    }
    Ok(ScoreResult { values, one_sided })
}

pub fn numeric_score(model: &dyn AuxModel, data: &[f64], beta_hat: &[f64]) -> Result<ScoreResult> {
    let coords: Vec<usize> = (0..model.dim()).collect();
    numeric_score_coords(model, data, beta_hat, &coords)
}

/// Covariance estimate (−H)⁻¹ from the numerical Hessian of the full
/// log-likelihood at β̂ over the `free` coordinates; 1e-4 relative central
/// differences, ridge of 1e-8·trace/d added (and grown tenfold) until the
/// Cholesky factorization succeeds.
pub fn hessian_weight(
    model: &dyn AuxModel,
    data: &[f64],
    beta_hat: &[f64],
    free: &[usize],
) -> Result<DMatrix<f64>> {
    let d = free.len();
    let lower = model.lower();
    let upper = model.upper();
    let mut h = vec![0.0; d];
    for (a, &i) in h.iter_mut().zip(free) {
        let step = (1e-6f64).max(1e-4 * beta_hat[i].abs());
        // Keep the stencil inside the box.
        let room = (upper[i] - beta_hat[i]).min(beta_hat[i] - lower[i]).max(1e-12);
        *a = step.min(room);
    }
    let eval = |shifts: &[(usize, f64)]| -> Result<f64> {
        let mut beta = beta_hat.to_vec();
        for &(k, dv) in shifts {
            beta[free[k]] += dv;
        }
        if !model.feasible(&beta) {
            // A boundary-grazing stencil point; fall back to the center
            // value so the curvature estimate degrades instead of failing.
            return model.loglik(data, beta_hat);
        }
        model.loglik(data, &beta)
    };
    let f0 = eval(&[])?;
    let mut hess = DMatrix::zeros(d, d);
    for a in 0..d {
        let fp = eval(&[(a, h[a])])?;
        let fm = eval(&[(a, -h[a])])?;
        hess[(a, a)] = (fp - 2.0 * f0 + fm) / (h[a] * h[a]);
        for b in (a + 1)..d {
            let fpp = eval(&[(a, h[a]), (b, h[b])])?;
            let fpm = eval(&[(a, h[a]), (b, -h[b])])?;
            let fmp = eval(&[(a, -h[a]), (b, h[b])])?;
            let fmm = eval(&[(a, -h[a]), (b, -h[b])])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[a] * h[b]);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    let neg_h = -(hess.clone() + hess.transpose()) * 0.5;
    let base_ridge = 1e-8 * neg_h.trace().abs().max(1e-8) / d as f64;
    let mut ridge = 0.0;
    for _ in 0..64 {
        let candidate = &neg_h + DMatrix::identity(d, d) * ridge;
        if let Some(chol) = candidate.cholesky() {
            return Ok(chol.inverse());
        }
        ridge = if ridge == 0.0 { base_ridge } else { ridge * 10.0 };
    }
    Err(Error::Numerical("Hessian weight could not be repaired to positive definite".into()))
}
