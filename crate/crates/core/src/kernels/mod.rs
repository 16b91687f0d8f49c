//! Seeded random sampling primitives shared by every simulator.
//!
//! All operations are pure functions of their parameters and an [`RngStream`];
//! streams are cheap to construct and safe to move across threads, so
//! parallel callers allocate one stream per draw.

mod cir;
mod gaussian;
mod rng;
mod stable;

pub use cir::{cir_transition_constants, sample_cir_stationary, sample_cir_transition};
pub use gaussian::{
    sample_log_chisq, sample_trunc_normal, LogChiSqNoise, TruncNormalSpec, LOG_CHISQ_MEAN,
    LOG_CHISQ_VAR,
};
pub use rng::RngStream;
pub use stable::{sample_alpha_stable, StableParams};
