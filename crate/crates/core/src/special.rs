//! Standard-normal special functions used throughout the crate.

use statrs::function::erf;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;
pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / SQRT_2)
}

/// Upper tail 1 − Φ(x), accurate for large positive x.
pub fn std_normal_sf(x: f64) -> f64 {
    0.5 * erf::erfc(x / SQRT_2)
}

/// Inverse standard-normal CDF.
pub fn std_normal_ppf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "ppf argument must lie in (0,1)");
    -SQRT_2 * erf::erfc_inv(2.0 * p)
}

/// Mills-ratio mean of a standard normal truncated below at `c`:
/// λ(c) = φ(c) / (1 − Φ(c)).
pub fn truncnorm_lambda(c: f64) -> f64 {
    if c == f64::NEG_INFINITY {
        return 0.0;
    }
    if c < 20.0 {
        std_normal_pdf(c) / std_normal_sf(c)
    } else {
        // Asymptotic Mills ratio; avoids 0/0 once erfc underflows.
        let c2 = c * c;
        let c4 = c2 * c2;
        c / (1.0 - 1.0 / c2 + 3.0 / c4 - 15.0 / (c4 * c2) + 105.0 / (c4 * c4))
    }
}
