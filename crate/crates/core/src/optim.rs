//! Bounded derivative-free minimization: Nelder–Mead with box projection.
//!
//! The auxiliary likelihoods are non-smooth in places (sigma-point
//! truncation), so fitting stays derivative-free. Candidate points are
//! clamped into the box; the objective returns +inf for infeasible points,
//! which the simplex treats as worst.

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    pub max_evals: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    /// Rebuild the simplex once around the best point after convergence,
    /// guarding against premature collapse.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_evals: 2000, f_tol: 1e-10, x_tol: 1e-9, restarts: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn clamp(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(lo, hi);
    }
}

/// Minimize `f` over the box [lower, upper] starting from `start`.
/// Deterministic given identical inputs.
pub fn minimize_bounded<F>(
    mut f: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &NelderMeadOptions,
) -> OptimResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = start.len();
    assert!(d >= 1 && lower.len() == d && upper.len() == d);
    let mut evals = 0usize;
    fn call(f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], evals: &mut usize) -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }

    let mut best_x = start.to_vec();
    clamp(&mut best_x, lower, upper);
    let mut best_f = call(&mut f, &best_x, &mut evals);
    let mut converged = false;

    let mut scale = 0.05;
    for _round in 0..=opts.restarts {
        // Initial simplex around the current best point.
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
        simplex.push((best_x.clone(), best_f));
        for i in 0..d {
            let mut x = best_x.clone();
            let step = scale * (upper[i] - lower[i]);
            x[i] = if x[i] + step <= upper[i] { x[i] + step } else { x[i] - step };
            clamp(&mut x, lower, upper);
            let fx = call(&mut f, &x, &mut evals);
            simplex.push((x, fx));
        }

        while evals < opts.max_evals {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            let f_best = simplex[0].1;
            let f_worst = simplex[d].1;
            let x_spread = (0..d)
                .map(|i| {
                    simplex
                        .iter()
                        .map(|(x, _)| (x[i] - simplex[0].0[i]).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if (f_worst - f_best).abs() <= opts.f_tol * (f_best.abs() + opts.f_tol)
                && x_spread <= opts.x_tol
            {
                converged = true;
                break;
            }

            // Centroid of all but the worst vertex.
            let mut centroid = vec![0.0; d];
            for (x, _) in simplex.iter().take(d) {
                for (c, &v) in centroid.iter_mut().zip(x) {
                    *c += v / d as f64;
                }
            }
            let worst = simplex[d].clone();
            let point = |coef: f64| -> Vec<f64> {
                let mut x: Vec<f64> = centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(&c, &w)| c + coef * (c - w))
                    .collect();
                clamp(&mut x, lower, upper);
                x
            };

            let xr = point(1.0);
            let fr = call(&mut f, &xr, &mut evals);
            if fr < simplex[0].1 {
                let xe = point(2.0);
                let fe = call(&mut f, &xe, &mut evals);
                simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[d - 1].1 {
                simplex[d] = (xr, fr);
            } else {
                let xc = point(-0.5);
                let fc = call(&mut f, &xc, &mut evals);
                if fc < simplex[d].1 {
                    simplex[d] = (xc, fc);
                } else {
                    // Shrink toward the best vertex.
                    let best = simplex[0].0.clone();
                    for (x, fx) in simplex.iter_mut().skip(1) {
                        for (v, &b) in x.iter_mut().zip(&best) {
                            *v = b + 0.5 * (*v - b);
                        }
                        clamp(x, lower, upper);
                        *fx = call(&mut f, x, &mut evals);
                    }
                }
            }
        }

        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        if simplex[0].1 <= best_f {
            best_x = simplex[0].0.clone();
            best_f = simplex[0].1;
        }
        scale *= 0.2;
        if evals >= opts.max_evals {
            break;
        }
    }

    // BFGS polish with numerical gradients: the simplex stalls on narrow
    // correlated valleys well before the gradient vanishes, so a
    // quasi-Newton phase drives the solution to the stationary point when
    // the objective is smooth there. Interior optima only — the phase
    // stops at the box boundary.
    fn num_grad(
        f: &mut dyn FnMut(&[f64]) -> f64,
        x: &[f64],
        lower: &[f64],
        upper: &[f64],
        evals: &mut usize,
    ) -> Option<Vec<f64>> {
        let d = x.len();
        let mut g = vec![0.0; d];
        for i in 0..d {
            let h = (1e-7f64).max(1e-7 * x[i].abs());
            if x[i] + h > upper[i] || x[i] - h < lower[i] {
                return None;
            }
            let mut p = x.to_vec();
            p[i] = x[i] + h;
            let fp = call(f, &p, evals);
            p[i] = x[i] - h;
            let fm = call(f, &p, evals);
            if !(fp.is_finite() && fm.is_finite()) {
                return None;
            }
            g[i] = (fp - fm) / (2.0 * h);
        }
        Some(g)
    }
    let polish_budget = opts.max_evals + 80 * (d + 2) * d;
    let scale: Vec<f64> = (0..d).map(|i| (upper[i] - lower[i]).max(1e-8)).collect();
    if let Some(mut g) = num_grad(&mut f, &best_x, lower, upper, &mut evals) {
        let mut h_inv = vec![vec![0.0; d]; d];
        for (i, row) in h_inv.iter_mut().enumerate() {
            row[i] = 1e-4 * scale[i] * scale[i];
        }
        for _iter in 0..100 {
            if evals > polish_budget {
                break;
            }
            let gnorm_scaled: f64 =
                g.iter().zip(&scale).map(|(gi, s)| (gi * s) * (gi * s)).sum::<f64>().sqrt();
            if gnorm_scaled < 1e-9 * best_f.abs().max(1.0) {
                converged = true;
                break;
            }
            let mut dir = vec![0.0; d];
            for i in 0..d {
                for j in 0..d {
                    dir[i] -= h_inv[i][j] * g[j];
                }
            }
            let descent: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
            if !(descent < 0.0) {
                // Reset a corrupted curvature estimate.
                for (i, row) in h_inv.iter_mut().enumerate() {
                    row.iter_mut().for_each(|v| *v = 0.0);
                    row[i] = 1e-4 * scale[i] * scale[i];
                }
                for i in 0..d {
                    dir[i] = -h_inv[i][i] * g[i];
                }
            }
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..30 {
                let mut x_new: Vec<f64> =
                    best_x.iter().zip(&dir).map(|(x, s)| x + t * s).collect();
                clamp(&mut x_new, lower, upper);
                let f_new = call(&mut f, &x_new, &mut evals);
                if f_new < best_f {
                    accepted = Some((x_new, f_new));
                    break;
                }
                t *= 0.5;
            }
            let Some((x_new, f_new)) = accepted else { break };
            let Some(g_new) = num_grad(&mut f, &x_new, lower, upper, &mut evals) else {
                best_x = x_new;
                best_f = f_new;
                break;
            };
            let s: Vec<f64> = x_new.iter().zip(&best_x).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&yv).map(|(a, b)| a * b).sum();
            if sy > 1e-18 {
                // Inverse-Hessian BFGS update.
                let mut hy = vec![0.0; d];
                for i in 0..d {
                    for j in 0..d {
                        hy[i] += h_inv[i][j] * yv[j];
                    }
                }
                let yhy: f64 = yv.iter().zip(&hy).map(|(a, b)| a * b).sum();
                let c1 = (sy + yhy) / (sy * sy);
                for i in 0..d {
                    for j in 0..d {
                        h_inv[i][j] +=
                            c1 * s[i] * s[j] - (hy[i] * s[j] + s[i] * hy[j]) / sy;
                    }
                }
            }
            best_x = x_new;
            best_f = f_new;
            g = g_new;
        }
    }

    OptimResult { x: best_x, f: best_f, evaluations: evals, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_quadratic_vertex() {
        let f = |x: &[f64]| {
            (x[0] - 0.3).powi(2) + 2.0 * (x[1] + 0.7).powi(2) + 0.5 * (x[0] - 0.3) * (x[1] + 0.7)
        };
        let res = minimize_bounded(
            f,
            &[0.0, 0.0],
            &[-2.0, -2.0],
            &[2.0, 2.0],
            &NelderMeadOptions::default(),
        );
        assert!(res.converged);
        assert!((res.x[0] - 0.3).abs() < 1e-6, "x0 = {}", res.x[0]);
        assert!((res.x[1] + 0.7).abs() < 1e-6, "x1 = {}", res.x[1]);
    }

    #[test]
    fn respects_box_constraints() {
        let f = |x: &[f64]| (x[0] - 5.0).powi(2);
        let res =
            minimize_bounded(f, &[0.5], &[0.0], &[1.0], &NelderMeadOptions::default());
        assert!((res.x[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn infinite_regions_are_avoided() {
        // Feasibility penalty: +inf left of 0.2.
        let f = |x: &[f64]| {
            if x[0] < 0.2 {
                f64::INFINITY
            } else {
                (x[0] - 0.1).powi(2)
            }
        };
        let res = minimize_bounded(f, &[0.8], &[0.0], &[1.0], &NelderMeadOptions::default());
        assert!((res.x[0] - 0.2).abs() < 1e-6, "x = {}", res.x[0]);
        assert!(res.f.is_finite());
    }

    #[test]
    fn deterministic_given_same_inputs() {
        let f = |x: &[f64]| x[0].sin() * (3.0 * x[1]).cos() + x[0] * x[0] * 0.1;
        let opts = NelderMeadOptions::default();
        let a = minimize_bounded(f, &[0.4, -0.3], &[-3.0, -3.0], &[3.0, 3.0], &opts);
        let b = minimize_bounded(f, &[0.4, -0.3], &[-3.0, -3.0], &[3.0, 3.0], &opts);
        assert_eq!(a.x, b.x);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn one_dimensional_works() {
        let f = |x: &[f64]| (x[0] - 0.123_456).powi(2);
        let res = minimize_bounded(f, &[0.9], &[0.0], &[1.0], &NelderMeadOptions::default());
        assert!((res.x[0] - 0.123_456).abs() < 1e-6);
    }
}
