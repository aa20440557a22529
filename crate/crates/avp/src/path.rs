//! Tuning-parameter grids and support-path construction.

use std::collections::HashMap;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::model::{support_order, Dataset, Support, SupportPath};
use crate::solvers::{self, LassoConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Geometric penalty grid from `||X^T Y||_inf` downward.
    LassoGeometric,
    /// Thresholds chosen so ridge supports hit target sizes `ceil(k p / 50)`.
    ThrrSizes,
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub kind: GridKind,
    pub r: usize,
    /// Ratio between the last and first lasso grid values.
    pub ratio_floor: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            kind: GridKind::LassoGeometric,
            r: 10,
            ratio_floor: 1e-3,
        }
    }
}

impl GridSpec {
    pub fn lasso(r: usize) -> Self {
        GridSpec {
            kind: GridKind::LassoGeometric,
            r,
            ratio_floor: 1e-3,
        }
    }

    pub fn thrr(r: usize) -> Self {
        GridSpec {
            kind: GridKind::ThrrSizes,
            r,
            ratio_floor: 1e-3,
        }
    }
}

/// Decreasing geometric grid of `r` penalties from `lambda_max =
/// ||X^T Y||_inf` down to `lambda_max * ratio_floor`.
pub fn lasso_grid(data: &Dataset, spec: &GridSpec) -> Result<Vec<f64>> {
    if spec.kind != GridKind::LassoGeometric {
        return Err(Error::Validation(
            "grid kind must be lasso_geometric".into(),
        ));
    }
    if spec.r < 2 {
        return Err(Error::Validation("lasso grid needs r >= 2".into()));
    }
    if !(spec.ratio_floor > 0.0 && spec.ratio_floor < 1.0) {
        return Err(Error::Validation("ratio_floor must lie in (0, 1)".into()));
    }
    let lambda_max = data.x().tr_mul(data.y()).amax();
    if lambda_max < 1e-12 {
        return Err(Error::DegenerateGrid);
    }
    let denom = (spec.r - 1) as f64;
    Ok((0..spec.r)
        .map(|i| lambda_max * spec.ratio_floor.powf(i as f64 / denom))
        .collect())
}

/// Threshold grid for thresholded ridge regression, plus metadata.
#[derive(Debug, Clone)]
pub struct ThrrGrid {
    /// Nonincreasing thresholds, one per target size.
    pub thresholds: Vec<f64>,
    /// Requested support sizes `ceil(k p / 50)`, k = 1..=r, capped at p.
    pub target_sizes: Vec<usize>,
    /// Support size each threshold actually achieves.
    pub achieved_sizes: Vec<usize>,
    /// False where magnitude ties made the target size unachievable and the
    /// nearest achievable size was used instead.
    pub exact: Vec<bool>,
    /// The ridge coefficients the thresholds were derived from.
    pub ridge: DVector<f64>,
}

impl ThrrGrid {
    pub fn all_exact(&self) -> bool {
        self.exact.iter().all(|&e| e)
    }
}

/// Picks `r` thresholds so that the thresholded ridge supports have sizes
/// `ceil(k p / 50)`, k = 1..=r. Each threshold sits at the midpoint between
/// the last kept and first dropped coefficient magnitudes; when ties make a
/// size unachievable the nearest achievable size is used and flagged.
pub fn thrr_grid(data: &Dataset, gamma: f64, spec: &GridSpec) -> Result<ThrrGrid> {
    if spec.kind != GridKind::ThrrSizes {
        return Err(Error::Validation("grid kind must be thrr_sizes".into()));
    }
    if spec.r < 1 {
        return Err(Error::Validation("thrr grid needs r >= 1".into()));
    }
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::Validation("ridge parameter must be positive".into()));
    }
    let p = data.p();
    let ridge = solvers::ridge_fit(data, gamma);

    // Distinct magnitudes, descending, with cumulative counts. A threshold
    // strictly between two neighbors keeps exactly the cumulative count of
    // the larger one; zero magnitudes can never be kept.
    let mut mags: Vec<f64> = ridge.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut distinct: Vec<(f64, usize)> = Vec::new();
    for &m in &mags {
        if m == 0.0 {
            break;
        }
        match distinct.last_mut() {
            Some((v, c)) if *v == m => *c += 1,
            _ => distinct.push((m, 1)),
        }
    }
    let mut cum = 0usize;
    // (size, threshold achieving that size)
    let mut achievable: Vec<(usize, f64)> = vec![(
        0,
        if distinct.is_empty() {
            0.0
        } else {
            distinct[0].0
        },
    )];
    for (t, &(v, c)) in distinct.iter().enumerate() {
        cum += c;
        let next = distinct.get(t + 1).map(|&(w, _)| w).unwrap_or(0.0);
        achievable.push((cum, 0.5 * (v + next)));
    }

    let mut thresholds = Vec::with_capacity(spec.r);
    let mut target_sizes = Vec::with_capacity(spec.r);
    let mut achieved_sizes = Vec::with_capacity(spec.r);
    let mut exact = Vec::with_capacity(spec.r);
    for k in 1..=spec.r {
        let target = (((k * p) as f64) / 50.0).ceil() as usize;
        let target = target.clamp(1, p);
        let &(size, lambda) = achievable
            .iter()
            .min_by_key(|&&(size, _)| {
                let diff = size.abs_diff(target);
                (diff, size)
            })
            .expect("achievable sizes nonempty");
        target_sizes.push(target);
        achieved_sizes.push(size);
        exact.push(size == target);
        thresholds.push(lambda);
    }
    Ok(ThrrGrid {
        thresholds,
        target_sizes,
        achieved_sizes,
        exact,
        ridge,
    })
}

/// Deduplicates supports (keeping the first parameter that produced each)
/// and orders them by (cardinality, lexicographic index list).
pub fn build_path(supports_raw: &[(Support, f64)]) -> Result<SupportPath> {
    if supports_raw.is_empty() {
        return Err(Error::EmptyPath);
    }
    let mut first_param: HashMap<Support, f64> = HashMap::new();
    let mut distinct: Vec<Support> = Vec::new();
    for (s, param) in supports_raw {
        if !first_param.contains_key(s) {
            first_param.insert(s.clone(), *param);
            distinct.push(s.clone());
        }
    }
    distinct.sort_by(support_order);
    let params = distinct.iter().map(|s| first_param[s]).collect::<Vec<_>>();
    Ok(SupportPath::from_sorted_parts(distinct, params))
}

/// Sorted union of two supports.
pub fn union_support(a: &Support, b: &Support) -> Support {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (xs, ys) = (a.indices(), b.indices());
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => {
                out.push(xs[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(ys[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(xs[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&xs[i..]);
    out.extend_from_slice(&ys[j..]);
    Support::new(out)
}

/// Lasso grid, warm-started fits, and the deduplicated ordered path in one
/// call. Returns the grid alongside the path.
pub fn lasso_support_path(
    data: &Dataset,
    spec: &GridSpec,
    cfg: &LassoConfig,
) -> Result<(Vec<f64>, SupportPath)> {
    let grid = lasso_grid(data, spec)?;
    let fits = solvers::lasso_path(data, &grid, cfg)?;
    let raw: Vec<(Support, f64)> = fits
        .iter()
        .zip(grid.iter())
        .map(|(b, &lambda)| (solvers::lasso_support(b, cfg), lambda))
        .collect();
    Ok((grid, build_path(&raw)?))
}

/// Threshold grid and the thresholded-ridge support path in one call.
pub fn thrr_support_path(
    data: &Dataset,
    gamma: f64,
    spec: &GridSpec,
) -> Result<(ThrrGrid, SupportPath)> {
    let grid = thrr_grid(data, gamma, spec)?;
    let raw: Vec<(Support, f64)> = grid
        .thresholds
        .iter()
        .map(|&lambda| {
            let (_, support) = solvers::thrr_from_ridge(&grid.ridge, lambda);
            (support, lambda)
        })
        .collect();
    Ok((grid, build_path(&raw)?))
}
