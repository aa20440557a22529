//! Two-step prediction for high-dimensional sparse regression.
//!
//! The pipeline has two stages: a first-stage variable selector (lasso
//! coordinate descent or thresholded ridge regression) produces a path of
//! candidate supports over a tuning grid, and each candidate is refined by
//! least squares restricted to its support. The question is which candidate
//! to keep. This crate provides:
//!
//! - [`avp::avp_select`]: an adaptive-validation rule that picks the
//!   smallest support whose refit is statistically indistinguishable from
//!   the refits on all of its unions with same-size-or-larger path sets,
//!   using a single path and a handful of extra least-squares problems;
//! - [`baselines`]: k-fold cross-validation (scoring one-step or refitted
//!   estimates) and a residual-plus-penalty comparator;
//! - [`solvers::scaled_lasso_sigma`]: a rough noise-level estimate used to
//!   set the adaptive-validation test constant when the variance is unknown;
//! - [`mod@bench`]: equicorrelated Gaussian data generation, an experiment
//!   runner that records loss and wall time per method, diagnostics, and
//!   CSV/JSON results files.
//!
//! Start with the `examples/` directory: each example exercises one
//! capability end to end. The `avp-bench` binary wraps the benchmark runner
//! (`simulate`), the diagnostics (`diagnose`), and a results summarizer
//! (`summarize`).
//!
//! ```
//! use avp::avp::{avp_select, ASource, AvpConfig};
//! use avp::bench::{generate_dataset, SimConfig};
//! use avp::path::{lasso_support_path, GridSpec};
//! use avp::solvers::LassoConfig;
//!
//! let cfg = SimConfig { n: 60, p: 20, s: 4, ..SimConfig::default() };
//! let data = generate_dataset(&cfg, 0).unwrap();
//! let (_, path) = lasso_support_path(&data, &GridSpec::lasso(8), &LassoConfig::default()).unwrap();
//! let sigma = data.truth().unwrap().sigma;
//! let choice = avp_select(&data, &path, &AvpConfig::new(sigma * sigma, ASource::KnownSigma)).unwrap();
//! assert!(choice.selected_support.len() <= 20);
//! ```

pub mod avp;
pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod model;
pub mod path;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{
    oracle_index, prediction_loss, standardize_columns, Dataset, RefitEstimate, Support,
    SupportPath, Truth,
};
