//! Small numeric helpers shared across modules.

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (n − 1 denominator).
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Population variance (n denominator).
pub fn variance_pop(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Linear-interpolation quantile on a sorted slice (type-7, as in R).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    assert!(n > 0 && (0.0..=1.0).contains(&p));
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Trapezoid-rule integral of `f` sampled on the (ascending) `grid`.
pub fn trapezoid(grid: &[f64], f: &[f64]) -> f64 {
    assert_eq!(grid.len(), f.len());
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
    }
    acc
}

/// Trapezoid quadrature weights for an ascending grid.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let n = grid.len();
    assert!(n >= 2);
    let mut w = vec![0.0; n];
    w[0] = 0.5 * (grid[1] - grid[0]);
    w[n - 1] = 0.5 * (grid[n - 1] - grid[n - 2]);
    for i in 1..n - 1 {
        w[i] = 0.5 * (grid[i + 1] - grid[i - 1]);
    }
    w
}

/// log(Σ exp(xs)) with max shift; -inf entries are skipped.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Linear interpolation of (xs, ys) at `x`; zero outside the range.
pub fn interp_or_zero(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return 0.0;
    }
    match xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => ys[i],
        Err(i) => {
            // binary_search returns the insertion point; x lies in (xs[i-1], xs[i]).
            let (x0, x1) = (xs[i - 1], xs[i]);
            let t = (x - x0) / (x1 - x0);
            ys[i - 1] + t * (ys[i] - ys[i - 1])
        }
    }
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1],
/// by Newton iteration on Legendre polynomials.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Initial guess (Abramowitz–Stegun 25.4.30 style).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_endpoints_and_midpoint() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 4.0);
        assert!((quantile_sorted(&xs, 0.5) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let grid: Vec<f64> = (0..11).map(|i| i as f64 / 10.0).collect();
        let f: Vec<f64> = grid.iter().map(|&x| 2.0 * x + 1.0).collect();
        assert!((trapezoid(&grid, &f) - 2.0).abs() < 1e-12);
        let w = trapezoid_weights(&grid);
        let via_weights: f64 = w.iter().zip(&f).map(|(wi, fi)| wi * fi).sum();
        assert!((via_weights - 2.0).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_matches_naive() {
        let xs = [-700.0f64, -701.0, -699.5];
        let naive = (xs.iter().map(|&x| (x + 700.0).exp()).sum::<f64>()).ln() - 700.0;
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(15);
        // Degree-6 polynomial integrates exactly with 15 nodes.
        let integral: f64 = x.iter().zip(&w).map(|(&t, &wi)| wi * (t.powi(6) + t)).sum();
        assert!((integral - 2.0 / 7.0).abs() < 1e-13);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn interp_zero_outside() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 10.0, 0.0];
        assert_eq!(interp_or_zero(&xs, &ys, -0.1), 0.0);
        assert_eq!(interp_or_zero(&xs, &ys, 2.1), 0.0);
        assert!((interp_or_zero(&xs, &ys, 0.5) - 5.0).abs() < 1e-12);
        assert!((interp_or_zero(&xs, &ys, 1.0) - 10.0).abs() < 1e-12);
    }
}
