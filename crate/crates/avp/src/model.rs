//! Core regression types: standardized datasets, supports, ordered support
//! paths, least-squares refits, and the prediction-loss metric.
//!
//! Conventions used throughout the crate:
//! - design columns are standardized to Euclidean norm `sqrt(n)`,
//! - supports are strictly increasing index lists, 0-based internally,
//! - paths are ordered by (cardinality, lexicographic index list).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for the column-norm invariant `||x_j||_2 = sqrt(n)`.
pub const STANDARDIZATION_RTOL: f64 = 1e-10;

/// Columns with norm below this are rejected as degenerate features.
pub const ZERO_COLUMN_TOL: f64 = 1e-12;

/// Ground truth attached to synthetic data.
#[derive(Debug, Clone)]
pub struct Truth {
    pub beta: DVector<f64>,
    pub sigma: f64,
}

/// A response vector together with a column-standardized design matrix.
///
/// Every column of `x` has Euclidean norm `sqrt(n)` (relative tolerance
/// 1e-10). Construction goes through [`Dataset::new`] (which standardizes)
/// or [`Dataset::from_standardized`] (which validates).
#[derive(Debug, Clone)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: DVector<f64>,
    truth: Option<Truth>,
}

impl Dataset {
    /// Standardizes `x_raw` column-wise and pairs it with `y`.
    pub fn new(x_raw: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let x = standardize_columns(&x_raw)?;
        Self::from_standardized(x, y)
    }

    /// Wraps an already-standardized design, validating the norm invariant.
    pub fn from_standardized(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let (n, p) = x.shape();
        if n == 0 || p == 0 {
            return Err(Error::Validation(
                "design matrix must have at least one row and one column".into(),
            ));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                what: "response length",
                expected: n,
                actual: y.len(),
            });
        }
        let target = (n as f64).sqrt();
        for j in 0..p {
            let norm = x.column(j).norm();
            if (norm - target).abs() > STANDARDIZATION_RTOL * target {
                return Err(Error::Validation(format!(
                    "column {j} has norm {norm}, expected sqrt(n) = {target}"
                )));
            }
        }
        Ok(Dataset { x, y, truth: None })
    }

    /// Attaches a ground-truth regression vector and noise level.
    pub fn with_truth(mut self, beta: DVector<f64>, sigma: f64) -> Result<Self> {
        if beta.len() != self.p() {
            return Err(Error::DimensionMismatch {
                what: "truth beta length",
                expected: self.p(),
                actual: beta.len(),
            });
        }
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Validation("truth sigma must be positive".into()));
        }
        self.truth = Some(Truth { beta, sigma });
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn truth(&self) -> Option<&Truth> {
        self.truth.as_ref()
    }

    /// Support of the true regression vector, when truth is attached.
    pub fn true_support(&self) -> Option<Support> {
        self.truth.as_ref().map(|t| {
            Support::new(
                (0..t.beta.len())
                    .filter(|&j| t.beta[j] != 0.0)
                    .collect::<Vec<_>>(),
            )
        })
    }
}

/// Rescales every column of `x_raw` to Euclidean norm `sqrt(n)`.
///
/// Fails with [`Error::ZeroColumn`] when a column norm is below 1e-12.
pub fn standardize_columns(x_raw: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (n, p) = x_raw.shape();
    let target = (n as f64).sqrt();
    let mut x = x_raw.clone();
    for j in 0..p {
        let norm = x.column(j).norm();
        if norm < ZERO_COLUMN_TOL {
            return Err(Error::ZeroColumn { column: j });
        }
        let scale = target / norm;
        x.column_mut(j).scale_mut(scale);
    }
    Ok(x)
}

/// Squared prediction loss `||x (estimate - beta_true)||_2^2`.
pub fn prediction_loss(
    estimate: &DVector<f64>,
    beta_true: &DVector<f64>,
    x: &DMatrix<f64>,
) -> Result<f64> {
    if estimate.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            what: "estimate length",
            expected: x.ncols(),
            actual: estimate.len(),
        });
    }
    if beta_true.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            what: "beta_true length",
            expected: x.ncols(),
            actual: beta_true.len(),
        });
    }
    let diff = estimate - beta_true;
    Ok((x * diff).norm_squared())
}

/// An active set: strictly increasing column indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Support(Vec<usize>);

impl Support {
    /// Builds a support from arbitrary indices; sorts and removes duplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Support(indices)
    }

    pub fn empty() -> Self {
        Support(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn is_superset_of(&self, other: &Support) -> bool {
        other.0.iter().all(|&j| self.contains(j))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl std::fmt::Display for Support {
    /// Indices are printed 1-based, matching report conventions.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        write!(f, "}}")
    }
}

/// Total order on supports: cardinality first, then lexicographic on the
/// sorted index lists. This is the ordering of every [`SupportPath`].
pub fn support_order(a: &Support, b: &Support) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0))
}

/// An ordered path of distinct candidate active sets.
///
/// Sets are sorted by [`support_order`] and pairwise distinct; `params`
/// records the tuning-parameter value that produced each set.
#[derive(Debug, Clone)]
pub struct SupportPath {
    sets: Vec<Support>,
    params: Vec<f64>,
}

impl SupportPath {
    pub(crate) fn from_sorted_parts(sets: Vec<Support>, params: Vec<f64>) -> Self {
        debug_assert_eq!(sets.len(), params.len());
        debug_assert!(sets
            .windows(2)
            .all(|w| support_order(&w[0], &w[1]) == std::cmp::Ordering::Less));
        SupportPath { sets, params }
    }

    pub fn sets(&self) -> &[Support] {
        &self.sets
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Path length `r`.
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Index of the minimal-cardinality path set containing `s_true`, ties
/// broken by earliest path index; `None` when no set contains it.
///
/// Because path sets are sorted by cardinality, this is simply the first
/// superset along the path.
pub fn oracle_index(path: &SupportPath, s_true: &Support) -> Option<usize> {
    path.sets().iter().position(|s| s.is_superset_of(s_true))
}

/// A least-squares refit restricted to a support.
///
/// `coefficients` has length `p` and is exactly zero off-support; `fitted`
/// equals `x * coefficients`; `rank` is the numerical rank of the design
/// restricted to the support.
#[derive(Debug, Clone)]
pub struct RefitEstimate {
    pub support: Support,
    pub coefficients: DVector<f64>,
    pub fitted: DVector<f64>,
    pub rank: usize,
    /// Orthonormal basis (n x rank) of the retained column space, from the
    /// rank-revealing factorization that produced the fit.
    pub(crate) basis: DMatrix<f64>,
}

impl RefitEstimate {
    /// Orthonormal basis of the fitted column space.
    pub fn column_basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projection of `v` onto the fitted column space.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.tr_mul(v))
    }

    /// Squared residual `||y - fitted||_2^2`.
    pub fn residual_norm_squared(&self, y: &DVector<f64>) -> f64 {
        (y - &self.fitted).norm_squared()
    }
}
