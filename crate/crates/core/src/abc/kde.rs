//! Gaussian kernel density estimation with Silverman's bandwidth.

use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone)]
pub struct KdeEstimate {
    pub grid: Vec<f64>,
    pub ordinates: Vec<f64>,
    pub bandwidth: f64,
}

/// 0.9·min(sd, IQR/1.34)·n^{−1/5}, floored at 1e-8 for zero-spread input.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let sd = stats::variance(values).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr = stats::quantile_sorted(&sorted, 0.75) - stats::quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    (0.9 * spread * n.powf(-0.2)).max(1e-8)
}

/// Gaussian-kernel density of `values` evaluated on `grid`.
pub fn kde(values: &[f64], grid: &[f64]) -> Result<KdeEstimate> {
    if values.len() < 50 {
        return Err(Error::InvalidParam(format!(
            "KDE needs at least 50 values, got {}",
            values.len()
        )));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParam("KDE grid must be ascending with >= 2 nodes".into()));
    }
    let bandwidth = silverman_bandwidth(values);
    let norm = 1.0 / (values.len() as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let ordinates = grid
        .iter()
        .map(|&g| {
            norm * values
                .iter()
                .map(|&v| {
                    let u = (g - v) / bandwidth;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
        })
        .collect();
    Ok(KdeEstimate { grid: grid.to_vec(), ordinates, bandwidth })
}

/// Equally spaced grid covering [lo, hi].
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::RngStream;
    use crate::special::std_normal_pdf;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn standard_normal_sample_matches_density() {
        let mut rng = RngStream::new(17, 0);
        let values: Vec<f64> = (0..10_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let grid = linspace(-4.5, 4.5, 256);
        let est = kde(&values, &grid).unwrap();
        let max_dev = grid
            .iter()
            .zip(&est.ordinates)
            .map(|(&g, &o)| (o - std_normal_pdf(g)).abs())
            .fold(0.0, f64::max);
        assert!(max_dev < 0.02, "max deviation from N(0,1) density: {max_dev}");
        let integral = crate::stats::trapezoid(&est.grid, &est.ordinates);
        assert!((0.99..=1.01).contains(&integral), "integral {integral}");
    }

    #[test]
    fn all_equal_input_is_a_spike() {
        let values = vec![0.7; 100];
        let grid = linspace(0.0, 1.4, 401);
        let est = kde(&values, &grid).unwrap();
        assert_eq!(est.bandwidth, 1e-8);
        let peak = est
            .ordinates
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap();
        assert!((est.grid[peak.0] - 0.7).abs() < 0.004);
    }

    #[test]
    fn too_few_values_rejected() {
        assert!(kde(&[1.0; 49], &[0.0, 1.0]).is_err());
    }
}
