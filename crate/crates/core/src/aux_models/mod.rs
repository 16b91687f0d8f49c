//! Auxiliary (misspecified) models whose likelihoods, maximizers, and
//! scores serve as the ABC summary statistics.

mod aukf;
mod fit;
mod garch;
mod integrated;

pub use aukf::{
    aukf_filter, aukf_loglik, sv_sq_builder, AukfTrace, AuxParamsSq, NoiseCenter,
    SigmaPointMatrix, AUX_SQ_FLOOR, SIGMA_SPREAD, SIGMA_WEIGHTS,
};
pub use fit::{
    fit_mle, fit_mle_coords, hessian_weight, numeric_score, numeric_score_coords, AuxFit,
    ScoreResult,
};
pub use garch::{garch_loglik, garch_t_loglik, std_t_logpdf, AuxParamsGarchT};
pub use integrated::{
    fit_integrated_beta_j, integrated_loglik, integrated_score, DEFAULT_QUAD_NODES,
};

use crate::error::Result;

/// A fittable auxiliary model: box bounds, feasibility, and the
/// log-likelihood of a data sequence at a parameter vector.
pub trait AuxModel: Sync {
    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn lower(&self) -> Vec<f64>;
    fn upper(&self) -> Vec<f64>;
    /// Box membership plus any nonlinear restrictions.
    fn feasible(&self, beta: &[f64]) -> bool;
    fn loglik(&self, data: &[f64], beta: &[f64]) -> Result<f64>;
    fn default_start(&self, data: &[f64]) -> Vec<f64>;
}

fn in_box(beta: &[f64], lower: &[f64], upper: &[f64]) -> bool {
    beta.len() == lower.len()
        && beta
            .iter()
            .zip(lower.iter().zip(upper))
            .all(|(&v, (&lo, &hi))| v.is_finite() && v >= lo && v <= hi)
}

/// AUKF evaluation of the discretized square-root model.
#[derive(Debug, Clone, Copy, Default)]
pub struct AukfModel {
    pub noise_center: NoiseCenter,
}

impl AuxModel for AukfModel {
    fn name(&self) -> &'static str {
        "aukf_sq"
    }
    fn dim(&self) -> usize {
        3
    }
    fn lower(&self) -> Vec<f64> {
        vec![AUX_SQ_FLOOR; 3]
    }
    fn upper(&self) -> Vec<f64> {
        vec![0.05, 1.0 - AUX_SQ_FLOOR, 0.3]
    }
    fn feasible(&self, beta: &[f64]) -> bool {
        in_box(beta, &self.lower(), &self.upper())
    }
    fn loglik(&self, data: &[f64], beta: &[f64]) -> Result<f64> {
        let params = AuxParamsSq::new(beta[0], beta[1], beta[2])?;
        aukf_loglik(data, &params, self.noise_center)
    }
    fn default_start(&self, _data: &[f64]) -> Vec<f64> {
        vec![0.01, 0.5, 0.1]
    }
}

/// Absolute-deviation GARCH(1,1) with standardized Student-t errors.
#[derive(Debug, Clone, Copy, Default)]
pub struct GarchTModel;

impl AuxModel for GarchTModel {
    fn name(&self) -> &'static str {
        "garch_t"
    }
    fn dim(&self) -> usize {
        4
    }
    fn lower(&self) -> Vec<f64> {
        vec![1e-8, 0.0, 0.0, 2.1]
    }
    fn upper(&self) -> Vec<f64> {
        vec![10.0, 0.9999, 0.9999, 200.0]
    }
    fn feasible(&self, beta: &[f64]) -> bool {
        in_box(beta, &self.lower(), &self.upper()) && beta[1] + beta[2] <= 0.9999
    }
    fn loglik(&self, data: &[f64], beta: &[f64]) -> Result<f64> {
        let params = AuxParamsGarchT::new(beta[0], beta[1], beta[2], beta[3])?;
        garch_t_loglik(data, &params)
    }
    fn default_start(&self, data: &[f64]) -> Vec<f64> {
        let mad = data.iter().map(|v| v.abs()).sum::<f64>() / data.len().max(1) as f64;
        vec![(0.1 * mad).max(1e-6), 0.1, 0.8, 8.0]
    }
}

/// Conventional GARCH(1,1) with Gaussian errors.
#[derive(Debug, Clone, Copy, Default)]
pub struct GarchModel;

impl AuxModel for GarchModel {
    fn name(&self) -> &'static str {
        "garch"
    }
    fn dim(&self) -> usize {
        3
    }
    fn lower(&self) -> Vec<f64> {
        vec![1e-10, 0.0, 0.0]
    }
    fn upper(&self) -> Vec<f64> {
        vec![10.0, 0.9999, 0.9999]
    }
    fn feasible(&self, beta: &[f64]) -> bool {
        in_box(beta, &self.lower(), &self.upper()) && beta[1] + beta[2] <= 0.9999
    }
    fn loglik(&self, data: &[f64], beta: &[f64]) -> Result<f64> {
        garch_loglik(data, &[beta[0], beta[1], beta[2]])
    }
    fn default_start(&self, data: &[f64]) -> Vec<f64> {
        let var = data.iter().map(|v| v * v).sum::<f64>() / data.len().max(1) as f64;
        vec![(0.1 * var).max(1e-8), 0.1, 0.8]
    }
}
