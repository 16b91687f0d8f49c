//! Exact sampling of the square-root (CIR) volatility transition.
//!
//! The one-step transition x_{t} | x_{t-1} is non-central chi-squared;
//! 2c·x_t ~ χ²(2q+2, 2u) with c, u, q as below. Because 2q+2 is generally
//! non-integer, sampling uses the exact Poisson–Gamma composition:
//! J ~ Poisson(u), then x ~ Gamma(shape q+1+J, rate c).

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use crate::dgp::SvSqParams;
use crate::error::{Error, Result};

/// The constants (c, q) of the non-central chi-squared transition at unit step:
/// c = 2φ₂ / (φ₃²(1 − e^{−φ₂})), q = 2φ₁/φ₃² − 1.
pub fn cir_transition_constants(phi: &SvSqParams) -> (f64, f64) {
    let c = 2.0 * phi.phi2 / (phi.phi3 * phi.phi3 * (1.0 - (-phi.phi2).exp()));
    let q = 2.0 * phi.phi1 / (phi.phi3 * phi.phi3) - 1.0;
    (c, q)
}

/// One exact draw of x_t given x_{t-1} = `x_prev`.
pub fn sample_cir_transition<R: Rng + ?Sized>(
    x_prev: f64,
    phi: &SvSqParams,
    rng: &mut R,
) -> Result<f64> {
    if !(x_prev > 0.0 && x_prev.is_finite()) {
        return Err(Error::InvalidParam(format!(
            "CIR transition requires positive previous state, got {x_prev}"
        )));
    }
    let (c, q) = cir_transition_constants(phi);
    let u = c * x_prev * (-phi.phi2).exp();
    let jumps = Poisson::new(u)
        .map_err(|e| Error::Numerical(format!("Poisson({u}) construction failed: {e}")))?
        .sample(rng);
    let shape = q + 1.0 + jumps;
    let draw = Gamma::new(shape, 1.0 / c)
        .map_err(|e| Error::Numerical(format!("Gamma({shape}) construction failed: {e}")))?
        .sample(rng);
    Ok(draw.max(f64::MIN_POSITIVE))
}

/// One draw from the stationary law Gamma(2φ₁/φ₃², rate 2φ₂/φ₃²).
pub fn sample_cir_stationary<R: Rng + ?Sized>(phi: &SvSqParams, rng: &mut R) -> f64 {
    let shape = 2.0 * phi.phi1 / (phi.phi3 * phi.phi3);
    let scale = phi.phi3 * phi.phi3 / (2.0 * phi.phi2);
    Gamma::new(shape, scale).expect("feasible SvSqParams").sample(rng).max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::RngStream;
    use crate::stats;

    fn paper_phi() -> SvSqParams {
        SvSqParams::new(0.004, 0.1, 0.062).unwrap()
    }

    #[test]
    fn transition_constants_at_paper_values() {
        // Direct evaluation: c = 0.2/(0.062²·(1−e^{−0.1})) = 546.7394352120213,
        // q = 0.008/0.062² − 1 = 1.081165452653486.
        let (c, q) = cir_transition_constants(&paper_phi());
        assert!((c - 546.739_435_212_021_3).abs() < 1e-9, "c = {c}");
        assert!((q - 1.081_165_452_653_486).abs() < 1e-12, "q = {q}");
    }

    #[test]
    fn rejects_bad_previous_state() {
        let phi = paper_phi();
        let mut rng = RngStream::new(0, 0);
        assert!(sample_cir_transition(0.0, &phi, &mut rng).is_err());
        assert!(sample_cir_transition(-0.1, &phi, &mut rng).is_err());
        assert!(sample_cir_transition(f64::NAN, &phi, &mut rng).is_err());
    }

    #[test]
    fn output_is_strictly_positive() {
        let phi = paper_phi();
        let mut rng = RngStream::new(8, 0);
        let mut x = 0.04;
        for _ in 0..20_000 {
            x = sample_cir_transition(x, &phi, &mut rng).unwrap();
            assert!(x > 0.0);
        }
    }

    #[test]
    fn long_run_moments_match_stationary_law() {
        let phi = paper_phi();
        let mut rng = RngStream::new(12, 0);
        let mut x = 0.04;
        let n = 1_000_000usize;
        let mut path = Vec::with_capacity(n);
        for _ in 0..n {
            x = sample_cir_transition(x, &phi, &mut rng).unwrap();
            path.push(x);
        }
        let mean = stats::mean(&path);
        let var = stats::variance(&path);
        let expect_mean = phi.phi1 / phi.phi2;
        let expect_var = phi.phi3 * phi.phi3 * phi.phi1 / (2.0 * phi.phi2 * phi.phi2);
        assert!((mean - expect_mean).abs() / expect_mean < 0.02, "mean {mean}");
        assert!((var - expect_var).abs() / expect_var < 0.05, "var {var}");
    }

    #[test]
    fn deterministic_replay() {
        let phi = paper_phi();
        let run = |seed, stream| {
            let mut rng = RngStream::new(seed, stream);
            let mut x = 0.04;
            (0..50).map(|_| {
                x = sample_cir_transition(x, &phi, &mut rng).unwrap();
                x
            }).collect::<Vec<_>>()
        };
        assert_eq!(run(3, 4), run(3, 4));
        assert_ne!(run(3, 4), run(3, 5));
    }
}
