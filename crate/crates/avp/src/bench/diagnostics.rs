//! Empirical diagnostics: path robustness probing, the constrained-form
//! optimality check linking the lasso path to the square-root variant, and
//! scale-symmetry checks for both first-stage families.

use std::collections::HashSet;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Dataset, Support};
use crate::solvers::{lasso_path_lenient, lasso_support, ridge_raw, thrr_from_ridge, LassoConfig};

fn support_family(
    data: &Dataset,
    y: &DVector<f64>,
    grid: &[f64],
    cfg: &LassoConfig,
) -> HashSet<Support> {
    let (fits, _) = lasso_path_lenient(data.x(), y, grid, cfg);
    fits.iter().map(|b| lasso_support(b, cfg)).collect()
}

/// Perturbs the noiseless target `x beta` inside an l-infinity ball and
/// reports the fraction of probes whose support family along the grid equals
/// the family at the target itself. A fraction of 1.0 certifies the radius
/// as an empirical lower bound on the path-robustness radius restricted to
/// this grid.
///
/// Probe directions are drawn from `seed` uniformly in `[-1, 1]^n` and
/// scaled by `radius`, so families at different radii reuse the same
/// directions.
pub fn probe_path_robustness(
    data: &Dataset,
    grid: &[f64],
    n_probe: usize,
    radius: f64,
    seed: u64,
    cfg: &LassoConfig,
) -> Result<f64> {
    let truth = data.truth().ok_or_else(|| {
        Error::Validation("path-robustness probe needs ground truth for the target".into())
    })?;
    assert!(radius >= 0.0);
    assert!(n_probe > 0);
    let center = data.x() * &truth.beta;
    let base = support_family(data, &center, grid, cfg);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n_probe {
        let direction = DVector::from_fn(data.n(), |_, _| rng.random_range(-1.0..=1.0));
        let y = &center + radius * direction;
        if support_family(data, &y, grid, cfg) == base {
            hits += 1;
        }
    }
    Ok(hits as f64 / n_probe as f64)
}

/// One constrained-form optimality check at a single penalty.
#[derive(Debug, Clone)]
pub struct KktCheck {
    pub lambda: f64,
    /// l1 norm of the penalized solution, i.e. the constraint radius it must
    /// be optimal for.
    pub radius_l1: f64,
    pub passed: bool,
    /// Largest spread among active-coordinate correlation magnitudes.
    pub active_spread: f64,
    /// Largest amount by which an inactive correlation exceeds the active
    /// level (negative when comfortably inside).
    pub inactive_excess: f64,
}

#[derive(Debug, Clone)]
pub struct SqrtLassoReport {
    pub checks: Vec<KktCheck>,
}

impl SqrtLassoReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub(crate) fn kkt_check_solution(
    data: &Dataset,
    beta: &DVector<f64>,
    lambda: f64,
    cfg: &LassoConfig,
) -> KktCheck {
    let tol = 1e-6;
    let residual = data.y() - data.x() * beta;
    let corr = data.x().tr_mul(&residual);
    let active: Vec<usize> = (0..beta.len())
        .filter(|&j| beta[j].abs() > cfg.support_zero_tol)
        .collect();

    if active.is_empty() {
        // Zero solution: constraint radius 0, trivially optimal.
        return KktCheck {
            lambda,
            radius_l1: 0.0,
            passed: true,
            active_spread: 0.0,
            inactive_excess: 0.0,
        };
    }

    let mags: Vec<f64> = active.iter().map(|&j| corr[j].abs()).collect();
    let hi = mags.iter().cloned().fold(f64::MIN, f64::max);
    let lo = mags.iter().cloned().fold(f64::MAX, f64::min);
    let scale = 1.0 + hi;
    let signs_ok = active
        .iter()
        .all(|&j| corr[j].signum() == beta[j].signum() || corr[j].abs() <= tol * scale);
    let active_spread = hi - lo;
    let inactive_excess = (0..beta.len())
        .filter(|j| !active.contains(j))
        .map(|j| corr[j].abs() - hi)
        .fold(f64::NEG_INFINITY, f64::max);
    let inactive_ok = inactive_excess == f64::NEG_INFINITY || inactive_excess <= tol * scale;

    KktCheck {
        lambda,
        radius_l1: beta.abs().sum(),
        passed: signs_ok && active_spread <= tol * scale && inactive_ok,
        active_spread,
        inactive_excess: if inactive_excess == f64::NEG_INFINITY {
            0.0
        } else {
            inactive_excess
        },
    }
}

/// Verifies, for every penalty on the grid, that the fitted solution solves
/// the l1-constrained least-squares problem at radius equal to its own l1
/// norm: active residual correlations share a common magnitude (up to
/// tolerance 1e-6, relative to that level) with matching signs, and inactive
/// correlations do not exceed it. This constrained form is exactly the one
/// shared with the square-root variant of the penalty, so a pass certifies
/// the path correspondence point by point.
pub fn check_sqrt_lasso_equivalence(
    data: &Dataset,
    grid: &[f64],
    cfg: &LassoConfig,
) -> Result<SqrtLassoReport> {
    let fits = crate::solvers::lasso_path(data, grid, cfg)?;
    let checks = fits
        .iter()
        .zip(grid.iter())
        .map(|(beta, &lambda)| kkt_check_solution(data, beta, lambda, cfg))
        .collect();
    Ok(SqrtLassoReport { checks })
}

/// Support invariance under joint rescaling for the lasso:
/// `supp(fit(y, lambda)) == supp(fit(y / lambda, 1))` for each positive
/// lambda. Returns one (lambda, passed) pair per usable grid value.
pub fn check_scale_symmetry_lasso(
    data: &Dataset,
    lambdas: &[f64],
    cfg: &LassoConfig,
) -> Result<Vec<(f64, bool)>> {
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda <= 0.0 {
            continue;
        }
        let (fit_scaled, _) = lasso_path_lenient(data.x(), data.y(), &[lambda], cfg);
        let y_scaled = data.y() / lambda;
        let (fit_unit, _) = lasso_path_lenient(data.x(), &y_scaled, &[1.0], cfg);
        let a = lasso_support(&fit_scaled[0], cfg);
        let b = lasso_support(&fit_unit[0], cfg);
        out.push((lambda, a == b));
    }
    Ok(out)
}

/// Same support invariance for thresholded ridge (fixed gamma):
/// `{|ridge(y)| > lambda} == {|ridge(y / lambda)| > 1}`.
pub fn check_scale_symmetry_thrr(
    data: &Dataset,
    gamma: f64,
    lambdas: &[f64],
) -> Result<Vec<(f64, bool)>> {
    let ridge = ridge_raw(data.x(), data.y(), gamma);
    let mut out = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        if lambda <= 0.0 {
            continue;
        }
        let (_, a) = thrr_from_ridge(&ridge, lambda);
        let y_scaled = data.y() / lambda;
        let ridge_scaled = ridge_raw(data.x(), &y_scaled, gamma);
        let (_, b) = thrr_from_ridge(&ridge_scaled, 1.0);
        out.push((lambda, a == b));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{generate_dataset, SimConfig};
    use crate::path::{lasso_grid, GridSpec};
    use nalgebra::DMatrix;

    fn probe_setup() -> (Dataset, Vec<f64>) {
        let cfg = SimConfig {
            n: 60,
            p: 10,
            s: 3,
            sigma: 1.0,
            rho: 0.0,
            seed: 5,
            ..SimConfig::default()
        };
        let data = generate_dataset(&cfg, 0).unwrap();
        let grid = lasso_grid(&data, &GridSpec::lasso(6)).unwrap();
        (data, grid)
    }

    #[test]
    fn zero_radius_probe_is_always_stable() {
        let (data, grid) = probe_setup();
        let frac =
            probe_path_robustness(&data, &grid, 10, 0.0, 1, &LassoConfig::default()).unwrap();
        assert_eq!(frac, 1.0);
    }

    #[test]
    fn huge_radius_probe_breaks_the_path() {
        let (data, grid) = probe_setup();
        let frac =
            probe_path_robustness(&data, &grid, 10, 1e6, 1, &LassoConfig::default()).unwrap();
        assert!(frac < 1.0, "fraction {frac}");
    }

    #[test]
    fn probe_fraction_nonincreasing_along_radius_chain() {
        let (data, grid) = probe_setup();
        let cfg = LassoConfig::default();
        let tiny = probe_path_robustness(&data, &grid, 10, 1e-9, 1, &cfg).unwrap();
        let huge = probe_path_robustness(&data, &grid, 10, 1e6, 1, &cfg).unwrap();
        assert!(1.0 >= tiny && tiny >= huge);
    }

    #[test]
    fn kkt_check_passes_on_orthogonal_design_closed_form() {
        let n = 16;
        let sqrt_n = (n as f64).sqrt();
        let x = DMatrix::from_diagonal(&DVector::from_element(n, sqrt_n));
        let y = DVector::from_fn(n, |i, _| ((i as f64) - 7.5) / 3.0);
        let data = Dataset::from_standardized(x, y).unwrap();
        let grid = lasso_grid(&data, &GridSpec::lasso(8)).unwrap();
        let cfg = LassoConfig {
            tol: 1e-12,
            ..LassoConfig::default()
        };
        let report = check_sqrt_lasso_equivalence(&data, &grid, &cfg).unwrap();
        assert!(report.all_passed(), "{:?}", report.checks);
        // The lambda >= lambda_max entry is the all-zero solution.
        assert_eq!(report.checks[0].radius_l1, 0.0);
        assert!(report.checks[0].passed);
    }

    #[test]
    fn kkt_check_rejects_corrupted_solution() {
        let (data, grid) = probe_setup();
        let cfg = LassoConfig {
            tol: 1e-12,
            ..LassoConfig::default()
        };
        let fits = crate::solvers::lasso_path(&data, &grid, &cfg).unwrap();
        // Pick a grid point with an active coordinate and nudge it.
        let (beta, lambda) = fits
            .iter()
            .zip(grid.iter())
            .find(|(b, _)| b.amax() > 0.1)
            .map(|(b, &l)| (b.clone(), l))
            .expect("some active fit");
        let check = kkt_check_solution(&data, &beta, lambda, &cfg);
        assert!(check.passed);
        let mut corrupted = beta;
        let j = (0..corrupted.len())
            .find(|&j| corrupted[j].abs() > 0.1)
            .unwrap();
        corrupted[j] += 0.1;
        let check = kkt_check_solution(&data, &corrupted, lambda, &cfg);
        assert!(!check.passed);
    }

    #[test]
    fn scale_symmetry_holds_on_a_generic_instance() {
        let (data, grid) = probe_setup();
        let cfg = LassoConfig::default();
        for (lambda, ok) in check_scale_symmetry_lasso(&data, &grid, &cfg).unwrap() {
            assert!(ok, "lasso symmetry failed at lambda = {lambda}");
        }
        let gamma = (data.p() as f64).sqrt();
        let thresholds: Vec<f64> = vec![0.05, 0.2, 0.5];
        for (lambda, ok) in check_scale_symmetry_thrr(&data, gamma, &thresholds).unwrap() {
            assert!(ok, "thrr symmetry failed at lambda = {lambda}");
        }
    }
}
