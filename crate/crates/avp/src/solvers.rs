//! First-stage estimators and refitting: lasso coordinate descent, ridge
//! regression, thresholded ridge, pseudo-inverse least squares on a support,
//! and the iterative noise-level estimator.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Dataset, RefitEstimate, Support};

/// Relative singular-value cutoff for numerical rank decisions.
pub const RANK_RTOL: f64 = 1e-10;

/// Controls for the lasso coordinate-descent solver.
///
/// `tol` bounds the largest coordinate update in a sweep; `support_zero_tol`
/// is the magnitude below which a coefficient counts as zero when reading a
/// support off an estimate.
#[derive(Debug, Clone)]
pub struct LassoConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub support_zero_tol: f64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        LassoConfig {
            max_iter: 10_000,
            tol: 1e-7,
            support_zero_tol: 1e-10,
        }
    }
}

/// Ridge shrinkage `gamma` plus hard threshold `lambda`.
#[derive(Debug, Clone, Copy)]
pub struct ThrrParams {
    pub gamma: f64,
    pub lambda: f64,
}

/// Output of [`scaled_lasso_sigma`].
#[derive(Debug, Clone, Copy)]
pub struct NoiseEstimate {
    pub sigma_hat: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

pub(crate) struct CdOutcome {
    pub beta: DVector<f64>,
    pub converged: bool,
    pub sweeps: usize,
}

/// Cyclic coordinate descent on the objective
/// `||y - x b||_2^2 + 2 lambda ||b||_1`, driven entirely by the Gram matrix
/// `x^T x` and the correlation vector `x^T y`.
pub(crate) fn lasso_cd_gram(
    gram: &DMatrix<f64>,
    xty: &DVector<f64>,
    lambda: f64,
    cfg: &LassoConfig,
    start: DVector<f64>,
) -> CdOutcome {
    let p = xty.len();
    let mut beta = start;
    let mut gram_beta = gram * &beta;
    for sweep in 1..=cfg.max_iter {
        let mut max_delta = 0.0f64;
        for j in 0..p {
            let gjj = gram[(j, j)];
            if gjj <= 0.0 {
                continue;
            }
            let c = xty[j] - gram_beta[j] + gjj * beta[j];
            let new = soft_threshold(c, lambda) / gjj;
            let delta = new - beta[j];
            if delta != 0.0 {
                gram_beta.axpy(delta, &gram.column(j), 1.0);
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta <= cfg.tol {
            return CdOutcome {
                beta,
                converged: true,
                sweeps: sweep,
            };
        }
    }
    CdOutcome {
        beta,
        converged: false,
        sweeps: cfg.max_iter,
    }
}

pub(crate) fn lasso_fit_raw(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    cfg: &LassoConfig,
) -> Result<DVector<f64>> {
    let gram = x.tr_mul(x);
    let xty = x.tr_mul(y);
    let out = lasso_cd_gram(&gram, &xty, lambda, cfg, DVector::zeros(x.ncols()));
    if out.converged {
        Ok(out.beta)
    } else {
        Err(Error::NoConvergence {
            iterations: out.sweeps,
            last: Box::new(out.beta),
        })
    }
}

/// Warm-started fits along a sequence of penalties, reusing one Gram matrix.
/// Non-converged fits keep their last iterate and are reported through the
/// returned flags rather than as a hard error.
pub(crate) fn lasso_path_lenient(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambdas: &[f64],
    cfg: &LassoConfig,
) -> (Vec<DVector<f64>>, Vec<bool>) {
    let gram = x.tr_mul(x);
    let xty = x.tr_mul(y);
    let mut fits = Vec::with_capacity(lambdas.len());
    let mut flags = Vec::with_capacity(lambdas.len());
    let mut warm = DVector::zeros(x.ncols());
    for &lambda in lambdas {
        let out = lasso_cd_gram(&gram, &xty, lambda, cfg, warm);
        warm = out.beta.clone();
        flags.push(out.converged);
        fits.push(out.beta);
    }
    (fits, flags)
}

/// Solves the lasso `argmin ||y - x b||_2^2 + 2 lambda ||b||_1` by cyclic
/// coordinate descent.
///
/// For `lambda >= ||x^T y||_inf` the zero vector is returned exactly.
pub fn lasso_fit(data: &Dataset, lambda: f64, cfg: &LassoConfig) -> Result<DVector<f64>> {
    assert!(lambda >= 0.0, "lasso penalty must be nonnegative");
    lasso_fit_raw(data.x(), data.y(), lambda, cfg)
}

/// Lasso fits along a penalty sequence with warm starts and a shared Gram
/// matrix. Fails on the first value that does not converge.
pub fn lasso_path(data: &Dataset, lambdas: &[f64], cfg: &LassoConfig) -> Result<Vec<DVector<f64>>> {
    let (fits, flags) = lasso_path_lenient(data.x(), data.y(), lambdas, cfg);
    if let Some(bad) = flags.iter().position(|&ok| !ok) {
        return Err(Error::NoConvergence {
            iterations: cfg.max_iter,
            last: Box::new(fits[bad].clone()),
        });
    }
    Ok(fits)
}

/// Indices whose coefficient magnitude exceeds `cfg.support_zero_tol`.
pub fn lasso_support(beta_hat: &DVector<f64>, cfg: &LassoConfig) -> Support {
    Support::new(
        (0..beta_hat.len())
            .filter(|&j| beta_hat[j].abs() > cfg.support_zero_tol)
            .collect(),
    )
}

pub(crate) fn ridge_raw(x: &DMatrix<f64>, y: &DVector<f64>, gamma: f64) -> DVector<f64> {
    let (n, p) = x.shape();
    if p <= n {
        let mut a = x.tr_mul(x);
        for j in 0..p {
            a[(j, j)] += gamma;
        }
        let xty = x.tr_mul(y);
        match Cholesky::new(a.clone()) {
            Some(chol) => chol.solve(&xty),
            None => a.lu().solve(&xty).expect("regularized normal equations"),
        }
    } else {
        // p > n: solve the n x n dual system x x^T + gamma I instead;
        // (x^T x + gamma I)^{-1} x^T y = x^T (x x^T + gamma I)^{-1} y.
        let mut a = x * x.transpose();
        for i in 0..n {
            a[(i, i)] += gamma;
        }
        let u = match Cholesky::new(a.clone()) {
            Some(chol) => chol.solve(y),
            None => a.lu().solve(y).expect("regularized dual system"),
        };
        x.tr_mul(&u)
    }
}

/// Ridge regression `(x^T x + gamma I)^{-1} x^T y` for `gamma > 0`.
pub fn ridge_fit(data: &Dataset, gamma: f64) -> DVector<f64> {
    assert!(gamma > 0.0, "ridge parameter must be positive");
    ridge_raw(data.x(), data.y(), gamma)
}

pub(crate) fn thrr_from_ridge(ridge: &DVector<f64>, lambda: f64) -> (DVector<f64>, Support) {
    let mut kept = ridge.clone();
    let mut indices = Vec::new();
    for j in 0..ridge.len() {
        if ridge[j].abs() > lambda {
            indices.push(j);
        } else {
            kept[j] = 0.0;
        }
    }
    (kept, Support::new(indices))
}

/// Thresholded ridge regression: ridge coefficients with entries of
/// magnitude `<= lambda` zeroed (strictly larger magnitudes survive).
pub fn thrr_estimate(data: &Dataset, params: ThrrParams) -> (DVector<f64>, Support) {
    assert!(params.gamma > 0.0, "ridge parameter must be positive");
    assert!(params.lambda >= 0.0, "threshold must be nonnegative");
    let ridge = ridge_fit(data, params.gamma);
    thrr_from_ridge(&ridge, params.lambda)
}

pub(crate) fn refit_raw(x: &DMatrix<f64>, y: &DVector<f64>, support: &Support) -> RefitEstimate {
    let (n, p) = x.shape();
    if let Some(max) = support.max_index() {
        assert!(max < p, "support index {max} out of range for p = {p}");
    }
    let m = support.len();
    if m == 0 {
        return RefitEstimate {
            support: support.clone(),
            coefficients: DVector::zeros(p),
            fitted: DVector::zeros(n),
            rank: 0,
            basis: DMatrix::zeros(n, 0),
        };
    }

    let xs = DMatrix::from_fn(n, m, |i, k| x[(i, support.indices()[k])]);
    let svd = xs.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let sigma_max = svd.singular_values.max();
    let cutoff = RANK_RTOL * sigma_max;

    let mut beta_s = DVector::zeros(m);
    let mut kept = Vec::new();
    for (i, &sv) in svd.singular_values.iter().enumerate() {
        if sv > cutoff && sv > 0.0 {
            let coef = u.column(i).dot(y) / sv;
            beta_s.axpy(coef, &v_t.row(i).transpose(), 1.0);
            kept.push(i);
        }
    }
    let rank = kept.len();
    let mut basis = DMatrix::zeros(n, rank);
    for (col, &i) in kept.iter().enumerate() {
        basis.set_column(col, &u.column(i));
    }

    let fitted = &xs * &beta_s;
    let mut coefficients = DVector::zeros(p);
    for (k, &j) in support.indices().iter().enumerate() {
        coefficients[j] = beta_s[k];
    }
    RefitEstimate {
        support: support.clone(),
        coefficients,
        fitted,
        rank,
        basis,
    }
}

/// Least-squares refit on a support via a rank-revealing SVD.
///
/// Singular values below `1e-10` times the largest are treated as zero, so
/// rank-deficient supports resolve to the minimum-norm solution. An empty
/// support yields the zero estimate.
pub fn refit_least_squares(data: &Dataset, support: &Support) -> RefitEstimate {
    refit_raw(data.x(), data.y(), support)
}

/// Alternating noise-level estimation with early stopping.
///
/// Starting from `sigma_hat = 1`, repeats: set `lambda = sigma_hat *
/// sqrt(2 n log p)`, fit the lasso, update `sigma_hat = ||y - x b|| /
/// sqrt(n)`, and stop once successive estimates differ by at most `delta`.
/// The loop is capped at 50 iterations (`converged = false` then).
pub fn scaled_lasso_sigma(data: &Dataset, delta: f64, cfg: &LassoConfig) -> NoiseEstimate {
    assert!(delta > 0.0, "stopping tolerance must be positive");
    assert!(data.p() >= 2, "need p >= 2 so that log p > 0");
    let n = data.n() as f64;
    let lambda0 = (2.0 * n * (data.p() as f64).ln()).sqrt();

    let gram = data.x().tr_mul(data.x());
    let xty = data.x().tr_mul(data.y());

    let mut sigma_hat = 1.0f64;
    let mut warm = DVector::zeros(data.p());
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=50 {
        iterations = it;
        let prev = sigma_hat;
        let lambda = sigma_hat * lambda0;
        // A non-converged inner fit still moves the estimate; the outer
        // stopping rule is what matters for this rough estimator.
        let out = lasso_cd_gram(&gram, &xty, lambda, cfg, warm);
        warm = out.beta.clone();
        sigma_hat = (data.y() - data.x() * out.beta).norm() / n.sqrt();
        if (sigma_hat - prev).abs() <= delta {
            converged = true;
            break;
        }
    }
    NoiseEstimate {
        sigma_hat,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn diag2_dataset(y: Vec<f64>) -> Dataset {
        // X = 2 I4 has columns of norm 2 = sqrt(4).
        let x = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0, 2.0, 2.0]));
        Dataset::from_standardized(x, DVector::from_vec(y)).unwrap()
    }

    #[test]
    fn lasso_matches_hand_soft_threshold() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let beta = lasso_fit(&data, 2.0, &LassoConfig::default()).unwrap();
        let expected = [1.5, 0.0, -1.0, 0.0];
        for (b, e) in beta.iter().zip(expected.iter()) {
            assert!((b - e).abs() < 1e-12, "{beta:?}");
        }
    }

    #[test]
    fn lasso_is_exactly_zero_at_lambda_max() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let lambda_max = data.x().tr_mul(data.y()).amax();
        assert_eq!(lambda_max, 8.0);
        let beta = lasso_fit(&data, lambda_max, &LassoConfig::default()).unwrap();
        assert!(beta.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn lasso_at_zero_penalty_is_least_squares() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let beta = lasso_fit(&data, 0.0, &LassoConfig::default()).unwrap();
        let expected = [2.0, 0.5, -1.5, 0.0];
        for (b, e) in beta.iter().zip(expected.iter()) {
            assert!((b - e).abs() < 1e-10);
        }
    }

    #[test]
    fn lasso_support_thresholds_magnitudes() {
        let cfg = LassoConfig::default();
        let s = lasso_support(&DVector::from_vec(vec![1.5, 0.0, -1.0, 0.0]), &cfg);
        assert_eq!(s.indices(), &[0, 2]);
        let s = lasso_support(&DVector::from_vec(vec![0.0; 4]), &cfg);
        assert!(s.is_empty());
        let s = lasso_support(&DVector::from_vec(vec![1e-12, 2.0, 0.0, 0.0]), &cfg);
        assert_eq!(s.indices(), &[1]);
    }

    #[test]
    fn ridge_matches_hand_solution() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        // (4 + 4)^{-1} * 2 y = y / 4
        let beta = ridge_fit(&data, 4.0);
        let expected = [1.0, 0.25, -0.75, 0.0];
        for (b, e) in beta.iter().zip(expected.iter()) {
            assert!((b - e).abs() < 1e-12);
        }
    }

    #[test]
    fn ridge_of_zero_response_is_zero() {
        let data = diag2_dataset(vec![0.0; 4]);
        assert!(ridge_fit(&data, 1.0).iter().all(|&b| b == 0.0));
    }

    #[test]
    fn ridge_shrinks_to_zero_for_huge_gamma() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let beta = ridge_fit(&data, 1e6);
        let xty_norm = data.x().tr_mul(data.y()).norm();
        assert!(beta.norm() < 1e-3 * xty_norm);
    }

    #[test]
    fn ridge_primal_and_dual_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 6;
        let p = 9; // p > n triggers the dual route
        let x_raw = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let dual = ridge_raw(&x_raw, &y, 0.7);
        // Primal route, forced by hand.
        let mut a = x_raw.tr_mul(&x_raw);
        for j in 0..p {
            a[(j, j)] += 0.7;
        }
        let primal = a.lu().solve(&x_raw.tr_mul(&y)).unwrap();
        for (d, pr) in dual.iter().zip(primal.iter()) {
            assert!((d - pr).abs() < 1e-10);
        }
    }

    #[test]
    fn thrr_keeps_strictly_larger_magnitudes() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let (vec, support) = thrr_estimate(
            &data,
            ThrrParams {
                gamma: 4.0,
                lambda: 0.5,
            },
        );
        assert_eq!(support.indices(), &[0, 2]);
        let expected = [1.0, 0.0, -0.75, 0.0];
        for (v, e) in vec.iter().zip(expected.iter()) {
            assert!((v - e).abs() < 1e-12);
        }

        // lambda = 0 keeps every nonzero ridge coefficient.
        let (_, support) = thrr_estimate(
            &data,
            ThrrParams {
                gamma: 4.0,
                lambda: 0.0,
            },
        );
        assert_eq!(support.indices(), &[0, 1, 2]);

        // lambda at the max magnitude empties the support (strict inequality).
        let (_, support) = thrr_estimate(
            &data,
            ThrrParams {
                gamma: 4.0,
                lambda: 1.0,
            },
        );
        assert!(support.is_empty());
    }

    #[test]
    fn refit_on_empty_support_is_zero() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let refit = refit_least_squares(&data, &Support::empty());
        assert!(refit.coefficients.iter().all(|&b| b == 0.0));
        assert!(refit.fitted.iter().all(|&f| f == 0.0));
        assert_eq!(refit.rank, 0);
    }

    #[test]
    fn refit_matches_hand_truncation() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let refit = refit_least_squares(&data, &Support::new(vec![0, 2]));
        let expected = [2.0, 0.0, -1.5, 0.0];
        for (b, e) in refit.coefficients.iter().zip(expected.iter()) {
            assert!((b - e).abs() < 1e-10);
        }
        assert_eq!(refit.rank, 2);
        // fitted = x * coefficients
        let recomputed = data.x() * &refit.coefficients;
        for (f, g) in refit.fitted.iter().zip(recomputed.iter()) {
            assert!((f - g).abs() <= 1e-8 * (1.0 + g.abs()));
        }
    }

    #[test]
    fn refit_handles_duplicate_columns() {
        // Columns 0 and 1 are the same; the refit must project onto the
        // shared column with rank 1.
        let c = DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0]);
        let d = DVector::from_vec(vec![2.0, 0.0, 0.0, 0.0]);
        let x = DMatrix::from_columns(&[c.clone(), c.clone(), d]);
        let y = DVector::from_vec(vec![3.0, 1.0, -1.0, 5.0]);
        let data = Dataset::from_standardized(x, y.clone()).unwrap();
        let refit = refit_least_squares(&data, &Support::new(vec![0, 1]));
        assert_eq!(refit.rank, 1);
        // Brute-force projection onto span{c}: (c^T y / c^T c) c.
        let proj = c.clone() * (c.dot(&y) / c.dot(&c));
        for (f, e) in refit.fitted.iter().zip(proj.iter()) {
            assert!((f - e).abs() < 1e-10);
        }
    }

    #[test]
    fn refit_residual_is_orthogonal_to_selected_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 12;
            let p = 6;
            let x_raw = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
            let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let data = Dataset::new(x_raw, y).unwrap();
            let support = Support::new(vec![0, 2, 5]);
            let refit = refit_least_squares(&data, &support);
            let resid = data.y() - &refit.fitted;
            for &j in support.indices() {
                let dot = data.x().column(j).dot(&resid).abs();
                assert!(dot <= 1e-6 * data.y().norm(), "dot = {dot}");
            }
        }
    }

    #[test]
    fn scaled_lasso_on_zero_response() {
        let data = diag2_dataset(vec![0.0; 4]);
        let est = scaled_lasso_sigma(&data, 0.01, &LassoConfig::default());
        assert_eq!(est.sigma_hat, 0.0);
        assert_eq!(est.iterations, 2);
        assert!(est.converged);
    }

    #[test]
    fn scaled_lasso_stops_after_one_iteration_for_huge_delta() {
        let data = diag2_dataset(vec![4.0, 1.0, -3.0, 0.0]);
        let est = scaled_lasso_sigma(&data, 1e9, &LassoConfig::default());
        assert_eq!(est.iterations, 1);
        assert!(est.converged);
    }

    #[test]
    fn objective_never_increases_across_sweeps() {
        // Run coordinate descent with growing sweep caps; the objective of
        // the returned iterate must be nonincreasing in the cap.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20;
        let p = 12;
        let x_raw = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let data = Dataset::new(x_raw, y).unwrap();
        let lambda = 0.5;
        let objective = |b: &DVector<f64>| -> f64 {
            (data.y() - data.x() * b).norm_squared() + 2.0 * lambda * b.abs().sum()
        };
        let mut last = f64::INFINITY;
        for cap in 1..=8 {
            let cfg = LassoConfig {
                max_iter: cap,
                tol: 0.0,
                ..LassoConfig::default()
            };
            let beta = match lasso_fit(&data, lambda, &cfg) {
                Ok(b) => b,
                Err(Error::NoConvergence { last, .. }) => *last,
                Err(e) => panic!("{e}"),
            };
            let obj = objective(&beta);
            assert!(obj <= last + 1e-12, "objective rose: {obj} > {last}");
            last = obj;
        }
    }

    #[test]
    fn no_convergence_carries_last_iterate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10;
        let p = 8;
        let x_raw = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DVector::from_fn(n, |_, _| 5.0 * rng.sample::<f64, _>(StandardNormal));
        let data = Dataset::new(x_raw, y).unwrap();
        let cfg = LassoConfig {
            max_iter: 1,
            tol: 0.0,
            ..LassoConfig::default()
        };
        match lasso_fit(&data, 0.1, &cfg) {
            Err(Error::NoConvergence { iterations, last }) => {
                assert_eq!(iterations, 1);
                assert!(last.iter().any(|&b| b != 0.0));
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn orthogonal_design_soft_and_hard_threshold_forms() {
        // X = sqrt(n) I: the lasso is entrywise soft thresholding and the
        // refit on its support is entrywise hard thresholding.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 8;
        let sqrt_n = (n as f64).sqrt();
        let x = DMatrix::from_diagonal(&DVector::from_element(n, sqrt_n));
        let cfg = LassoConfig::default();
        for _ in 0..25 {
            let y = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let lambda: f64 = rng.random_range(0.0..3.0 * sqrt_n);
            let data = Dataset::from_standardized(x.clone(), y.clone()).unwrap();
            let beta = lasso_fit(&data, lambda, &cfg).unwrap();
            for i in 0..n {
                let soft = if y[i].abs() > 0.0 {
                    (1.0 - lambda / (sqrt_n * y[i].abs())).max(0.0) * y[i] / sqrt_n
                } else {
                    0.0
                };
                assert!((beta[i] - soft).abs() < 1e-8);
            }
            let refit = refit_least_squares(&data, &lasso_support(&beta, &cfg));
            for i in 0..n {
                let hard = if y[i].abs() > lambda / sqrt_n {
                    y[i] / sqrt_n
                } else {
                    0.0
                };
                assert!((refit.coefficients[i] - hard).abs() < 1e-8);
            }
        }
    }
}
