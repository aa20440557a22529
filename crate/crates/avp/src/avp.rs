//! Adaptive-validation selection among refitted estimators on a support
//! path.
//!
//! For an ordered path of candidate supports, the rule selects the smallest
//! index `i` whose refit is indistinguishable from every refit on its unions
//! with same-size-or-larger sets: each pairwise test compares the squared
//! fitted-value gap against the budget `a (|S^i| + |S^{i,j}|)`. When no index
//! qualifies, the last one is returned.

use std::collections::HashMap;

use crate::error::Result;
use crate::model::{Dataset, RefitEstimate, Support, SupportPath};
use crate::path::union_support;
use crate::solvers::refit_least_squares;

/// How the test constant `a` was obtained (for reporting).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ASource {
    KnownSigma,
    EstimatedSigma,
    Explicit,
}

impl std::fmt::Display for ASource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ASource::KnownSigma => write!(f, "known-sigma"),
            ASource::EstimatedSigma => write!(f, "estimated-sigma"),
            ASource::Explicit => write!(f, "explicit"),
        }
    }
}

/// Test constant for the selection rule. The usual choice is the noise
/// variance (known or estimated).
#[derive(Debug, Clone, Copy)]
pub struct AvpConfig {
    pub a: f64,
    pub a_source: ASource,
}

impl AvpConfig {
    pub fn new(a: f64, a_source: ASource) -> Self {
        assert!(a > 0.0, "test constant a must be positive");
        AvpConfig { a, a_source }
    }
}

/// One pairwise test record. Indices are 0-based path positions.
#[derive(Debug, Clone, Copy)]
pub struct AvpTest {
    pub i: usize,
    pub j: usize,
    /// `|| x refit_i - x refit_union ||_2^2`
    pub statistic: f64,
    /// `a (|S^i| + |S^i ∪ S^j|)`
    pub budget: f64,
    pub passed: bool,
}

/// Outcome of a selection run.
///
/// `selected_index` is the 0-based path position (printed 1-based in
/// reports). `refits_computed` counts distinct least-squares problems
/// actually solved; `union_refits_computed` counts the subset whose support
/// is not itself a path set.
#[derive(Debug, Clone)]
pub struct AvpResult {
    pub selected_index: usize,
    pub selected_support: Support,
    pub estimate: RefitEstimate,
    pub tests_run: Vec<AvpTest>,
    pub refits_computed: usize,
    pub union_refits_computed: usize,
}

struct RefitCache<'a> {
    data: &'a Dataset,
    path_sets: Vec<Support>,
    cache: HashMap<Support, RefitEstimate>,
    misses: usize,
    union_misses: usize,
}

impl<'a> RefitCache<'a> {
    fn new(data: &'a Dataset, path: &SupportPath) -> Self {
        RefitCache {
            data,
            path_sets: path.sets().to_vec(),
            cache: HashMap::new(),
            misses: 0,
            union_misses: 0,
        }
    }

    fn get(&mut self, support: &Support) -> &RefitEstimate {
        if !self.cache.contains_key(support) {
            let refit = refit_least_squares(self.data, support);
            self.misses += 1;
            if !self.path_sets.contains(support) {
                self.union_misses += 1;
            }
            self.cache.insert(support.clone(), refit);
        }
        &self.cache[support]
    }
}

/// First path index from which tests must run for position `i`: the start
/// of the run of sets whose cardinality equals `|S^i|`. Because the path is
/// ordered by size, the quantifier "all j with |S^j| >= |S^i|" is exactly
/// the suffix starting here.
fn first_same_cardinality(path: &SupportPath, i: usize) -> usize {
    let card = path.sets()[i].len();
    path.sets().partition_point(|s| s.len() < card)
}

fn run_test(
    cache: &mut RefitCache<'_>,
    path: &SupportPath,
    cfg: &AvpConfig,
    i: usize,
    j: usize,
) -> AvpTest {
    let fitted_i = cache.get(&path.sets()[i]).fitted.clone();
    let union = union_support(&path.sets()[i], &path.sets()[j]);
    let budget = cfg.a * (path.sets()[i].len() + union.len()) as f64;
    let refit_union = cache.get(&union);
    let statistic = (&fitted_i - &refit_union.fitted).norm_squared();
    AvpTest {
        i,
        j,
        statistic,
        budget,
        passed: statistic <= budget,
    }
}

fn finish(
    cache: RefitCache<'_>,
    path: &SupportPath,
    selected: usize,
    tests_run: Vec<AvpTest>,
    estimate: RefitEstimate,
) -> AvpResult {
    AvpResult {
        selected_index: selected,
        selected_support: path.sets()[selected].clone(),
        estimate,
        tests_run,
        refits_computed: cache.misses,
        union_refits_computed: cache.union_misses,
    }
}

/// Adaptive-validation selection with early stopping.
///
/// Scans `i = 0..r-1`; for each `i`, tests every `j` with `|S^j| >= |S^i|`
/// and stops at the first failure. The first `i` passing all its tests is
/// selected; if none does, the last path index is returned. Refits are
/// cached by support content across the whole run.
pub fn avp_select(data: &Dataset, path: &SupportPath, cfg: &AvpConfig) -> Result<AvpResult> {
    let r = path.len();
    assert!(r >= 1, "path must be nonempty");
    let mut cache = RefitCache::new(data, path);
    let mut tests_run = Vec::new();

    let mut selected = r - 1;
    'outer: for i in 0..r.saturating_sub(1) {
        // Computing the candidate refit up front mirrors how the scan is
        // used: its fitted values feed every test for this i.
        let _ = cache.get(&path.sets()[i]);
        let lo = first_same_cardinality(path, i);
        for j in lo..r {
            if j == i {
                // statistic is exactly 0 <= budget; skipping changes nothing.
                continue;
            }
            let test = run_test(&mut cache, path, cfg, i, j);
            let passed = test.passed;
            tests_run.push(test);
            if !passed {
                continue 'outer;
            }
        }
        selected = i;
        break;
    }
    let estimate = cache.get(&path.sets()[selected]).clone();
    Ok(finish(cache, path, selected, tests_run, estimate))
}

/// Reference variant of [`avp_select`] that evaluates every admissible
/// `(i, j)` pair before selecting, with no early stopping anywhere. Intended
/// for tests; results must agree with the early-stopping scan.
pub fn avp_select_exhaustive(
    data: &Dataset,
    path: &SupportPath,
    cfg: &AvpConfig,
) -> Result<AvpResult> {
    let r = path.len();
    assert!(r >= 1, "path must be nonempty");
    let mut cache = RefitCache::new(data, path);
    let mut tests_run = Vec::new();

    let mut selected = r - 1;
    let mut found = false;
    for i in 0..r.saturating_sub(1) {
        let _ = cache.get(&path.sets()[i]);
        let lo = first_same_cardinality(path, i);
        let mut all_passed = true;
        for j in lo..r {
            if j == i {
                continue;
            }
            let test = run_test(&mut cache, path, cfg, i, j);
            all_passed &= test.passed;
            tests_run.push(test);
        }
        if all_passed && !found {
            selected = i;
            found = true;
        }
    }
    let estimate = cache.get(&path.sets()[selected]).clone();
    Ok(finish(cache, path, selected, tests_run, estimate))
}
