//! Auxiliary-likelihood approximate Bayesian computation for state space
//! models, with three stochastic-volatility data generating processes, an
//! AUKF / GARCH family of auxiliary models, summary-statistic ABC baselines,
//! and an exact grid-filter posterior oracle for the square-root model.

pub mod dgp;
pub mod error;
pub mod aux_models;
pub mod optim;
pub mod oracle;
pub mod kernels;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
