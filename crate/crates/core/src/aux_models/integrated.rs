//! Integrated auxiliary likelihood: nuisance auxiliary parameters
//! integrated out against a uniform conditional prior over the box's
//! feasible slice, yielding a scalar summary per parameter. Used by the
//! integrated-score ABC criterion.

use super::aukf::{aukf_loglik, AuxParamsSq};
use super::AukfModel;
use crate::aux_models::AuxModel;
use crate::error::{Error, Result};
use crate::optim::{minimize_bounded, NelderMeadOptions};
use crate::stats::{gauss_legendre, log_sum_exp};

/// Default Gauss–Legendre nodes per remaining dimension.
pub const DEFAULT_QUAD_NODES: usize = 15;

/// Bounds of the two nuisance coordinates given β_j = t, honoring the
/// 2β₁ ≥ β₃² feasibility region; the inner (second) bound may depend on
/// the outer variable. Returns ((outer_lo, outer_hi), inner_bounds_fn,
/// coordinate indices (outer, inner)).
#[allow(clippy::type_complexity)]
fn slice_bounds(
    lower: &[f64],
    upper: &[f64],
    j: usize,
    t: f64,
) -> Result<((f64, f64), Box<dyn Fn(f64) -> (f64, f64)>, (usize, usize))> {
    let (l, u) = (lower.to_vec(), upper.to_vec());
    match j {
        0 => {
            // β₁ fixed: β₂ free, β₃ ≤ √(2β₁).
            let b3_hi = u[2].min((2.0 * t).sqrt());
            Ok(((l[1], u[1]), Box::new(move |_| (l[2], b3_hi)), (1, 2)))
        }
        1 => {
            // β₂ fixed: β₁ free, β₃ ≤ √(2β₁).
            let (l2, u2) = (l[2], u[2]);
            Ok(((l[0], u[0]), Box::new(move |b1: f64| (l2, u2.min((2.0 * b1).sqrt()))), (0, 2)))
        }
        2 => {
            // β₃ fixed: β₁ ≥ β₃²/2, β₂ free.
            Ok((((l[0]).max(0.5 * t * t), u[0]), Box::new(move |_| (l[1], u[1])), (0, 1)))
        }
        _ => Err(Error::InvalidParam(format!("coordinate index {j} out of range"))),
    }
}

/// log ∫ exp(L(β))·p(β_{−j}|β_j) dβ_{−j} with p uniform over the feasible
/// slice, by nested Gauss–Legendre quadrature in log space. Zero-width
/// dimensions act as point masses, so a fully degenerate slice reduces to
/// the plain profile value.
fn log_integral_over_slice<L>(
    loglik: L,
    lower: &[f64],
    upper: &[f64],
    j: usize,
    beta_j: f64,
    nodes: usize,
) -> Result<f64>
where
    L: Fn(&[f64; 3]) -> f64,
{
    if j >= 3 {
        return Err(Error::InvalidParam(format!("coordinate index {j} out of range")));
    }
    if !(lower[j]..=upper[j]).contains(&beta_j) {
        return Err(Error::InvalidParam(format!(
            "beta_{} = {beta_j} outside its prior range",
            j + 1
        )));
    }
    let ((a_lo, a_hi), inner, (ia, ib)) = slice_bounds(lower, upper, j, beta_j)?;
    if a_hi < a_lo {
        return Err(Error::InvalidParam("empty feasible slice".into()));
    }
    let (gl_x, gl_w) = gauss_legendre(nodes);
    let outer: Vec<(f64, f64)> = if a_hi > a_lo {
        gl_x.iter()
            .zip(&gl_w)
            .map(|(&x, &w)| (0.5 * (a_lo + a_hi) + 0.5 * (a_hi - a_lo) * x, w * 0.5 * (a_hi - a_lo)))
            .collect()
    } else {
        vec![(a_lo, 1.0)]
    };

    let mut log_terms = Vec::with_capacity(outer.len() * nodes);
    let mut log_area_terms = Vec::with_capacity(outer.len() * nodes);
    for &(av, aw) in &outer {
        let (b_lo, b_hi) = inner(av);
        if b_hi < b_lo {
            continue;
        }
        let inner_nodes: Vec<(f64, f64)> = if b_hi > b_lo {
            gl_x.iter()
                .zip(&gl_w)
                .map(|(&x, &w)| {
                    (0.5 * (b_lo + b_hi) + 0.5 * (b_hi - b_lo) * x, w * 0.5 * (b_hi - b_lo))
                })
                .collect()
        } else {
            vec![(b_lo, 1.0)]
        };
        for &(bv, bw) in &inner_nodes {
            let mut beta = [0.0; 3];
            beta[j] = beta_j;
            beta[ia] = av;
            beta[ib] = bv;
            let lw = (aw * bw).ln();
            log_area_terms.push(lw);
            let ll = loglik(&beta);
            if ll.is_finite() {
                log_terms.push(ll + lw);
            }
        }
    }
    if log_terms.is_empty() {
        return Err(Error::Numerical("all quadrature nodes failed".into()));
    }
    Ok(log_sum_exp(&log_terms) - log_sum_exp(&log_area_terms))
}

/// Integrated AUKF log-likelihood L_a^I(y; β_j) at one value of β_j.
pub fn integrated_loglik(
    model: &AukfModel,
    y: &[f64],
    beta_j: f64,
    j: usize,
    nodes: usize,
) -> Result<f64> {
    let lower = model.lower();
    let upper = model.upper();
    let nc = model.noise_center;
    log_integral_over_slice(
        |beta: &[f64; 3]| match AuxParamsSq::new(beta[0], beta[1], beta[2]) {
            Ok(b) => aukf_loglik(y, &b, nc).unwrap_or(f64::NEG_INFINITY),
            Err(_) => f64::NEG_INFINITY,
        },
        &lower,
        &upper,
        j,
        beta_j,
        nodes,
    )
}

/// β̂_j = arg max of the integrated likelihood on the observed data.
pub fn fit_integrated_beta_j(
    model: &AukfModel,
    y: &[f64],
    j: usize,
    nodes: usize,
) -> Result<f64> {
    let lower = model.lower();
    let upper = model.upper();
    let res = minimize_bounded(
        |b: &[f64]| -integrated_loglik(model, y, b[0], j, nodes).unwrap_or(f64::NEG_INFINITY),
        &[0.5 * (lower[j] + upper[j])],
        &[lower[j]],
        &[upper[j]],
        &NelderMeadOptions { max_evals: 200, ..Default::default() },
    );
    if !res.f.is_finite() {
        return Err(Error::Numerical("integrated likelihood maximization failed".into()));
    }
    Ok(res.x[0])
}

/// Central-difference derivative of T⁻¹·L_a^I(z; ·) at β̂_j; one-sided at
/// the box edge.
pub fn integrated_score(
    model: &AukfModel,
    z: &[f64],
    beta_j_hat: f64,
    j: usize,
    nodes: usize,
) -> Result<f64> {
    let lower = model.lower();
    let upper = model.upper();
    let t_len = z.len() as f64;
    let h = (1e-5f64).max(1e-5 * beta_j_hat.abs());
    let up = (beta_j_hat + h).min(upper[j]);
    let down = (beta_j_hat - h).max(lower[j]);
    if up <= down {
        return Err(Error::Numerical("no room for a finite difference in beta_j".into()));
    }
    let f_up = integrated_loglik(model, z, up, j, nodes)?;
    let f_down = integrated_loglik(model, z, down, j, nodes)?;
    Ok((f_up - f_down) / (up - down) / t_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp;
    use crate::kernels::RngStream;

    const LOWER: [f64; 3] = [1e-5, 1e-5, 1e-5];
    const UPPER: [f64; 3] = [0.05, 1.0 - 1e-5, 0.15];

    #[test]
    fn separable_surrogate_integrates_to_additive_form() {
        // L(β) = f(β₂) + g(β₁, β₃): differences in β₂ match f exactly.
        let f = |b2: f64| -10.0 * (b2 - 0.6) * (b2 - 0.6);
        let g = |b1: f64, b3: f64| -3.0 * b1 - 2.0 * b3;
        let int = |b2: f64| {
            log_integral_over_slice(
                |beta: &[f64; 3]| f(beta[1]) + g(beta[0], beta[2]),
                &LOWER,
                &UPPER,
                1,
                b2,
                15,
            )
            .unwrap()
        };
        let d_int = int(0.7) - int(0.3);
        let d_f = f(0.7) - f(0.3);
        assert!((d_int - d_f).abs() < 1e-10, "{d_int} vs {d_f}");
    }

    #[test]
    fn degenerate_point_support_reduces_to_profile() {
        let lower = [0.004, 1e-5, 0.06];
        let upper = [0.004, 1.0 - 1e-5, 0.06];
        let loglik =
            |beta: &[f64; 3]| -5.0 * beta[0] - 2.0 * (beta[1] - 0.5).powi(2) + beta[2];
        let got = log_integral_over_slice(&loglik, &lower, &upper, 1, 0.42, 15).unwrap();
        let profile = loglik(&[0.004, 0.42, 0.06]);
        assert!((got - profile).abs() < 1e-12, "{got} vs {profile}");
    }

    #[test]
    fn grid_refinement_stable() {
        let phi = dgp::SvSqParams::new(0.004, 0.1, 0.062).unwrap();
        let mut rng = RngStream::new(41, 0);
        let path = dgp::simulate_sv_sq(&phi, 80, &mut rng).unwrap();
        let model = AukfModel::default();
        let l15 = integrated_loglik(&model, &path.returns, 0.9, 1, 15).unwrap();
        let l30 = integrated_loglik(&model, &path.returns, 0.9, 1, 30).unwrap();
        assert!((l15 - l30).abs() < 1e-3, "15 nodes {l15} vs 30 nodes {l30}");
    }

    #[test]
    fn integrated_score_vanishes_at_its_maximizer() {
        let phi = dgp::SvSqParams::new(0.004, 0.1, 0.062).unwrap();
        let mut rng = RngStream::new(42, 0);
        let path = dgp::simulate_sv_sq(&phi, 120, &mut rng).unwrap();
        let model = AukfModel::default();
        let bj = fit_integrated_beta_j(&model, &path.returns, 1, 9).unwrap();
        let s = integrated_score(&model, &path.returns, bj, 1, 9).unwrap();
        assert!(s.abs() < 1e-4, "integrated score at maximizer: {s}");
    }

    #[test]
    fn out_of_range_beta_j_rejected() {
        let model = AukfModel::default();
        assert!(integrated_loglik(&model, &[1.0, 2.0, 3.0], 1.5, 1, 5).is_err());
        assert!(integrated_loglik(&model, &[1.0, 2.0, 3.0], 0.5, 7, 5).is_err());
    }
}
