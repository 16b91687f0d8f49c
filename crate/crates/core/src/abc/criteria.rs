//! The four ABC matching criteria: auxiliary score, auxiliary MLE,
//! variance-weighted Euclidean summaries, and the Fearnhead–Prangle
//! regression distance, plus the integrated-score variant.

use nalgebra::DMatrix;

use crate::aux_models::{
    fit_mle_coords, integrated_score, numeric_score_coords, AukfModel, AuxModel,
};
use crate::dgp::{ar1_summary_stats, SummaryTransform, SummaryVector};
use crate::error::{Error, Result};

/// Symmetric positive-definite weighting matrix, validated by Cholesky at
/// construction.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    m: DMatrix<f64>,
}

impl WeightMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidParam("weight matrix must be square".into()));
        }
        let sym = (m.clone() + m.transpose()) * 0.5;
        if sym.clone().cholesky().is_none() {
            return Err(Error::InvalidParam("weight matrix is not positive definite".into()));
        }
        Ok(Self { m: sym })
    }

    pub fn identity(d: usize) -> Self {
        Self { m: DMatrix::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let x = nalgebra::DVector::from_row_slice(v);
        (x.transpose() * &self.m * x)[(0, 0)]
    }
}

/// √((β̂(y) − β̂(z))ᵀ Ω (β̂(y) − β̂(z))).
pub fn dist_mle(beta_y: &[f64], beta_z: &[f64], omega: &WeightMatrix) -> f64 {
    assert_eq!(beta_y.len(), beta_z.len());
    assert_eq!(beta_y.len(), omega.dim());
    let diff: Vec<f64> = beta_y.iter().zip(beta_z).map(|(a, b)| a - b).collect();
    omega.quad_form(&diff).max(0.0).sqrt()
}

/// √(S(z; β̂(y))ᵀ Σ S(z; β̂(y))); with a 1×1 identity weight this is |S|,
/// the scalar-parameter form.
pub fn dist_score(score_z: &[f64], sigma: &WeightMatrix) -> f64 {
    assert_eq!(score_z.len(), sigma.dim());
    sigma.quad_form(score_z).max(0.0).sqrt()
}

/// [Σⱼ (sⱼ − sⱼ^obs)²/var(sⱼ)]^{1/2}; coordinates with zero variance are
/// dropped (signalled by a non-finite or non-positive variance entry).
pub fn dist_euclid_weighted(s_z: &SummaryVector, s_obs: &SummaryVector, var: &[f64; 5]) -> f64 {
    let mut acc = 0.0;
    for j in 0..5 {
        if var[j] > 0.0 && var[j].is_finite() {
            let d = s_z.s[j] - s_obs.s[j];
            acc += d * d / var[j];
        }
    }
    acc.sqrt()
}

/// Fearnhead–Prangle least squares: regress φⱼ draws on (1, s) and return
/// the fitted coefficients along with per-draw distances
/// |sᵢᵀγ̂ − s_obsᵀγ̂|. Entries of `summaries` that are None (failed draws)
/// are excluded from the regression and get +∞ distance.
pub struct FpFit {
    /// Intercept followed by the five summary coefficients.
    pub coefficients: Vec<f64>,
    /// Whether the normal equations needed a ridge repair.
    pub ridged: bool,
}

pub fn fp_pipeline(
    phi_j: &[f64],
    summaries: &[Option<[f64; 5]>],
    s_obs: &[f64; 5],
) -> Result<(FpFit, Vec<f64>)> {
    let n_ok = summaries.iter().flatten().count();
    if n_ok <= 6 {
        return Err(Error::InvalidParam(format!(
            "FP regression needs more than 6 usable draws, got {n_ok}"
        )));
    }
    let d = 6;
    let mut xtx = DMatrix::<f64>::zeros(d, d);
    let mut xty = nalgebra::DVector::<f64>::zeros(d);
    for (phi, s) in phi_j.iter().zip(summaries) {
        let Some(s) = s else { continue };
        let row = [1.0, s[0], s[1], s[2], s[3], s[4]];
        for a in 0..d {
            xty[a] += row[a] * phi;
            for b in 0..d {
                xtx[(a, b)] += row[a] * row[b];
            }
        }
    }
    let mut ridged = false;
    let gamma = match xtx.clone().cholesky() {
        Some(ch) => ch.solve(&xty),
        None => {
            ridged = true;
            let ridge = 1e-8 * xtx.trace().max(1.0) / d as f64;
            let repaired = xtx + DMatrix::identity(d, d) * ridge;
            repaired
                .cholesky()
                .ok_or_else(|| Error::Numerical("FP normal equations are singular".into()))?
                .solve(&xty)
        }
    };
    let predict = |s: &[f64; 5]| -> f64 {
        gamma[0] + (0..5).map(|j| gamma[j + 1] * s[j]).sum::<f64>()
    };
    let obs_fit = predict(s_obs);
    let distances = summaries
        .iter()
        .map(|s| match s {
            Some(s) => (predict(s) - obs_fit).abs(),
            None => f64::INFINITY,
        })
        .collect();
    Ok((FpFit { coefficients: gamma.iter().cloned().collect(), ridged }, distances))
}

/// Per-draw summary + pooled distance computation for one ABC criterion.
pub trait AbcCriterion: Sync {
    /// Summary statistics of one simulated path; None marks a failed
    /// evaluation (the draw will carry +∞ distance).
    fn summarize(&self, z: &[f64]) -> Option<Vec<f64>>;

    /// Distances for the whole pool. `phis` are the parameter draws
    /// (needed by criteria that pool across draws).
    fn distances(&self, phis: &[Vec<f64>], summaries: &[Option<Vec<f64>>]) -> Result<Vec<f64>>;
}

/// Auxiliary score criterion: S(z; β̂(y)) over selected β coordinates,
/// weighted by Σ.
pub struct ScoreCriterion<'a> {
    pub model: &'a dyn AuxModel,
    pub beta_hat_y: Vec<f64>,
    pub coords: Vec<usize>,
    pub sigma: WeightMatrix,
}

impl AbcCriterion for ScoreCriterion<'_> {
    fn summarize(&self, z: &[f64]) -> Option<Vec<f64>> {
        numeric_score_coords(self.model, z, &self.beta_hat_y, &self.coords)
            .ok()
            .map(|s| s.values)
    }

    fn distances(&self, _phis: &[Vec<f64>], summaries: &[Option<Vec<f64>>]) -> Result<Vec<f64>> {
        Ok(summaries
            .iter()
            .map(|s| match s {
                Some(v) => dist_score(v, &self.sigma),
                None => f64::INFINITY,
            })
            .collect())
    }
}

/// Auxiliary MLE criterion: refit β on each simulated path (warm-started
/// from β̂(y)) and weight the difference by Ω.
pub struct MleCriterion<'a> {
    pub model: &'a dyn AuxModel,
    pub beta_hat_y: Vec<f64>,
    pub free: Vec<usize>,
    pub omega: WeightMatrix,
}

impl AbcCriterion for MleCriterion<'_> {
    fn summarize(&self, z: &[f64]) -> Option<Vec<f64>> {
        let fit = fit_mle_coords(self.model, z, &self.beta_hat_y, &self.free).ok()?;
        Some(self.free.iter().map(|&i| fit.beta_hat[i]).collect())
    }

    fn distances(&self, _phis: &[Vec<f64>], summaries: &[Option<Vec<f64>>]) -> Result<Vec<f64>> {
        let reference: Vec<f64> = self.free.iter().map(|&i| self.beta_hat_y[i]).collect();
        Ok(summaries
            .iter()
            .map(|s| match s {
                Some(v) => dist_mle(&reference, v, &self.omega),
                None => f64::INFINITY,
            })
            .collect())
    }
}

/// Weighted Euclidean distance on the AR(1) summary statistics, each
/// coordinate weighted by the inverse of its variance across the pool.
pub struct EuclidCriterion {
    pub s_obs: SummaryVector,
    pub transform: SummaryTransform,
}

impl AbcCriterion for EuclidCriterion {
    fn summarize(&self, z: &[f64]) -> Option<Vec<f64>> {
        ar1_summary_stats(z, self.transform).ok().map(|s| s.s.to_vec())
    }

    fn distances(&self, _phis: &[Vec<f64>], summaries: &[Option<Vec<f64>>]) -> Result<Vec<f64>> {
        let mut var = [0.0f64; 5];
        let mut mean = [0.0f64; 5];
        let n_ok = summaries.iter().flatten().count();
        if n_ok < 2 {
            return Err(Error::Numerical("too few usable draws for summary variances".into()));
        }
        for s in summaries.iter().flatten() {
            for j in 0..5 {
                mean[j] += s[j];
            }
        }
        for m in mean.iter_mut() {
            *m /= n_ok as f64;
        }
        for s in summaries.iter().flatten() {
            for j in 0..5 {
                var[j] += (s[j] - mean[j]) * (s[j] - mean[j]);
            }
        }
        for v in var.iter_mut() {
            *v /= (n_ok - 1) as f64;
        }
        for (j, v) in var.iter().enumerate() {
            if !(*v > 0.0) {
                eprintln!("warning: summary statistic s{} has zero variance; dropped", j + 1);
            }
        }
        Ok(summaries
            .iter()
            .map(|s| match s {
                Some(v) => {
                    let sv = SummaryVector { s: [v[0], v[1], v[2], v[3], v[4]] };
                    dist_euclid_weighted(&sv, &self.s_obs, &var)
                }
                None => f64::INFINITY,
            })
            .collect())
    }
}

/// Fearnhead–Prangle criterion for one φ coordinate: the full pool is both
/// the regression sample and the selection sample.
pub struct FpCriterion {
    pub s_obs: SummaryVector,
    pub transform: SummaryTransform,
    pub coord: usize,
}

impl AbcCriterion for FpCriterion {
    fn summarize(&self, z: &[f64]) -> Option<Vec<f64>> {
        ar1_summary_stats(z, self.transform).ok().map(|s| s.s.to_vec())
    }

    fn distances(&self, phis: &[Vec<f64>], summaries: &[Option<Vec<f64>>]) -> Result<Vec<f64>> {
        let phi_j: Vec<f64> = phis.iter().map(|p| p[self.coord]).collect();
        let sums: Vec<Option<[f64; 5]>> = summaries
            .iter()
            .map(|s| s.as_ref().map(|v| [v[0], v[1], v[2], v[3], v[4]]))
            .collect();
        let (fit, distances) = fp_pipeline(&phi_j, &sums, &self.s_obs.s)?;
        if fit.ridged {
            eprintln!("warning: FP design was rank deficient; ridge fallback used");
        }
        Ok(distances)
    }
}

/// Integrated-score criterion: the scalar derivative of the integrated
/// auxiliary likelihood at β̂ⱼ.
pub struct IntScoreCriterion {
    pub model: AukfModel,
    pub beta_j_hat: f64,
    pub j: usize,
    pub nodes: usize,
}

impl AbcCriterion for IntScoreCriterion {
    fn summarize(&self, z: &[f64]) -> Option<Vec<f64>> {
        integrated_score(&self.model, z, self.beta_j_hat, self.j, self.nodes)
            .ok()
            .map(|s| vec![s])
    }

    fn distances(&self, _phis: &[Vec<f64>], summaries: &[Option<Vec<f64>>]) -> Result<Vec<f64>> {
        Ok(summaries
            .iter()
            .map(|s| match s {
                Some(v) => v[0].abs(),
                None => f64::INFINITY,
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dist_mle_hand_cases() {
        let id = WeightMatrix::identity(2);
        assert_eq!(dist_mle(&[1.0, 2.0], &[1.0, 2.0], &id), 0.0);
        assert!((dist_mle(&[3.0, 4.0], &[0.0, 0.0], &id) - 5.0).abs() < 1e-14);
        let diag = WeightMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            4.0, 1.0,
        ])))
        .unwrap();
        let d = dist_mle(&[1.0, 1.0], &[0.0, 0.0], &diag);
        assert!((d - 5.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn dist_score_scalar_case() {
        let one = WeightMatrix::identity(1);
        assert!((dist_score(&[-0.3], &one) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn weight_matrix_rejects_non_pd() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(WeightMatrix::new(m).is_err());
        let ok = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        assert!(WeightMatrix::new(ok).is_ok());
    }

    #[test]
    fn quad_form_invariant_to_refactorization() {
        // The value depends only on the matrix, not on how it was built.
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.0, 1.5, 0.2, 0.0, 0.0, 0.9]);
        let m = &a * a.transpose();
        let w1 = WeightMatrix::new(m.clone()).unwrap();
        // Rebuild from the Cholesky factor.
        let l = m.clone().cholesky().unwrap().l();
        let w2 = WeightMatrix::new(&l * l.transpose()).unwrap();
        let v = [0.7, -1.3, 0.4];
        assert!((w1.quad_form(&v) - w2.quad_form(&v)).abs() < 1e-12);
        let direct = {
            let x = nalgebra::DVector::from_row_slice(&v);
            (x.transpose() * &m * x)[(0, 0)]
        };
        assert!((w1.quad_form(&v) - direct).abs() < 1e-12);
    }

    #[test]
    fn euclid_hand_cases() {
        let s_obs = SummaryVector { s: [0.0; 5] };
        let same = dist_euclid_weighted(&s_obs, &s_obs, &[1.0; 5]);
        assert_eq!(same, 0.0);
        let s_z = SummaryVector { s: [1.0, 2.0, 0.0, 0.0, 0.0] };
        let d = dist_euclid_weighted(&s_z, &s_obs, &[1.0, 4.0, 1.0, 1.0, 1.0]);
        assert!((d - 2.0f64.sqrt()).abs() < 1e-14);
        // Unit variances reduce to the plain Euclidean distance.
        let plain = dist_euclid_weighted(&s_z, &s_obs, &[1.0; 5]);
        assert!((plain - 5.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fp_recovers_planted_coefficients_and_ranks_exactly() {
        // φ exactly linear in s with zero noise: recover γ to 1e-8 and the
        // distance ranks draws by |Ê(φ|z) − Ê(φ|y)|.
        let gamma = [0.5, 1.0, -2.0, 0.3, 0.0, 1.5];
        let mut rng = crate::kernels::RngStream::new(9, 0);
        use rand::Rng as _;
        let n = 200;
        let mut phis = Vec::new();
        let mut sums: Vec<Option<[f64; 5]>> = Vec::new();
        for _ in 0..n {
            let s: [f64; 5] = std::array::from_fn(|_| rng.gen::<f64>() * 2.0 - 1.0);
            let phi = gamma[0] + (0..5).map(|j| gamma[j + 1] * s[j]).sum::<f64>();
            phis.push(phi);
            sums.push(Some(s));
        }
        let s_obs = [0.1, 0.2, -0.3, 0.4, -0.5];
        let (fit, distances) = fp_pipeline(&phis, &sums, &s_obs).unwrap();
        for (got, want) in fit.coefficients.iter().zip(&gamma) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
        assert!(!fit.ridged);
        let obs_phi = gamma[0] + (0..5).map(|j| gamma[j + 1] * s_obs[j]).sum::<f64>();
        for (d, phi) in distances.iter().zip(&phis) {
            assert!((d - (phi - obs_phi).abs()).abs() < 1e-8);
        }
    }

    #[test]
    fn fp_matches_normal_equations_oracle() {
        // Noisy case: coefficients equal an independently solved
        // normal-equations system.
        let mut rng = crate::kernels::RngStream::new(10, 0);
        use rand::Rng as _;
        let n = 300;
        let mut phis = Vec::new();
        let mut sums: Vec<Option<[f64; 5]>> = Vec::new();
        for _ in 0..n {
            let s: [f64; 5] = std::array::from_fn(|_| rng.gen::<f64>() * 2.0 - 1.0);
            let phi = 0.3 - 0.7 * s[1] + 0.2 * s[4] + 0.05 * (rng.gen::<f64>() - 0.5);
            phis.push(phi);
            sums.push(Some(s));
        }
        let (fit, _) = fp_pipeline(&phis, &sums, &[0.0; 5]).unwrap();
        // Oracle: dense 6×6 solve via nalgebra LU on explicitly built X.
        let mut x = DMatrix::zeros(n, 6);
        let mut y = nalgebra::DVector::zeros(n);
        for (i, (phi, s)) in phis.iter().zip(&sums).enumerate() {
            let s = s.unwrap();
            x[(i, 0)] = 1.0;
            for j in 0..5 {
                x[(i, j + 1)] = s[j];
            }
            y[i] = *phi;
        }
        let oracle = (x.transpose() * &x).lu().solve(&(x.transpose() * y)).unwrap();
        for (got, want) in fit.coefficients.iter().zip(oracle.iter()) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn fp_rescaling_leaves_ranking_unchanged() {
        let mut rng = crate::kernels::RngStream::new(11, 0);
        use rand::Rng as _;
        let n = 150;
        let mut phis = Vec::new();
        let mut sums: Vec<Option<[f64; 5]>> = Vec::new();
        for _ in 0..n {
            let s: [f64; 5] = std::array::from_fn(|_| rng.gen::<f64>() * 2.0 - 1.0);
            let phi = 0.3 - 0.7 * s[1] + 0.2 * s[4] + 0.3 * (rng.gen::<f64>() - 0.5);
            phis.push(phi);
            sums.push(Some(s));
        }
        let s_obs = [0.1; 5];
        let (_, d1) = fp_pipeline(&phis, &sums, &s_obs).unwrap();
        let scaled: Vec<Option<[f64; 5]>> = sums
            .iter()
            .map(|s| s.map(|v| std::array::from_fn(|j| 37.5 * v[j])))
            .collect();
        let s_obs_scaled: [f64; 5] = std::array::from_fn(|j| 37.5 * s_obs[j]);
        let (_, d2) = fp_pipeline(&phis, &scaled, &s_obs_scaled).unwrap();
        let mut order1: Vec<usize> = (0..n).collect();
        order1.sort_by(|&a, &b| d1[a].partial_cmp(&d1[b]).unwrap());
        let mut order2: Vec<usize> = (0..n).collect();
        order2.sort_by(|&a, &b| d2[a].partial_cmp(&d2[b]).unwrap());
        assert_eq!(order1, order2);
    }

    #[test]
    fn failed_draws_get_infinite_distance() {
        let phis = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
        let mut sums: Vec<Option<[f64; 5]>> =
            (0..8).map(|i| Some([i as f64, 1.0, 2.0, 3.0, 4.0])).collect();
        sums[3] = None;
        let (_, d) = fp_pipeline(&phis, &sums, &[0.0; 5]).unwrap();
        assert!(d[3].is_infinite());
        assert!(d.iter().enumerate().all(|(i, v)| i == 3 || v.is_finite()));
    }
}
