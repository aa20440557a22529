//! The experiment runner: per repetition, generate data, build the tuning
//! grids, compute each family's support path once, and run every requested
//! method, recording loss, support size, and end-to-end wall time.
//!
//! Shared work (a path, the noise estimate) is computed once per repetition
//! and its cost is attributed to every method that consumes it, so each
//! record's `wall_ms` reflects what that method would cost on its own.

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;

use super::sim::{generate_dataset, rep_rng};
use super::{ExperimentRecord, Method, Selected, SimConfig};
use crate::avp::{avp_select, ASource, AvpConfig};
use crate::baselines::{aic_bic_select, kfold_cv_select, CvConfig, CvMethod};
use crate::error::{Error, Result};
use crate::model::{oracle_index, prediction_loss, Dataset, Support, SupportPath};
use crate::path::{lasso_support_path, thrr_support_path, GridSpec, ThrrGrid};
use crate::solvers::{refit_least_squares, scaled_lasso_sigma, LassoConfig, NoiseEstimate};

/// Where the test constant for adaptive validation comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AMode {
    /// The true noise variance (synthetic data only).
    Sigma,
    /// The scaled-lasso estimate, squared.
    SigmaHat,
    Value(f64),
}

impl std::str::FromStr for AMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(AMode::Sigma),
            "sigma-hat" => Ok(AMode::SigmaHat),
            other => match other.strip_prefix("value:") {
                Some(v) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| *x > 0.0)
                    .map(AMode::Value)
                    .ok_or_else(|| Error::Validation(format!("bad a-mode value in '{other}'"))),
                None => Err(Error::Validation(format!(
                    "a-mode must be sigma, sigma-hat, or value:<x>; got '{other}'"
                ))),
            },
        }
    }
}

/// Ridge parameter policy for the thresholded-ridge family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaMode {
    SqrtP,
    Value(f64),
}

impl GammaMode {
    pub fn resolve(&self, p: usize) -> f64 {
        match self {
            GammaMode::SqrtP => (p as f64).sqrt(),
            GammaMode::Value(v) => *v,
        }
    }
}

impl std::str::FromStr for GammaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt-p" => Ok(GammaMode::SqrtP),
            other => match other.strip_prefix("value:") {
                Some(v) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|x| *x > 0.0)
                    .map(GammaMode::Value)
                    .ok_or_else(|| Error::Validation(format!("bad gamma-mode value in '{other}'"))),
                None => Err(Error::Validation(format!(
                    "gamma-mode must be sqrt-p or value:<x>; got '{other}'"
                ))),
            },
        }
    }
}

/// Method-level options shared by a whole experiment run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub a_mode: AMode,
    pub gamma_mode: GammaMode,
    pub lasso: LassoConfig,
    /// Stopping tolerance for the noise-level estimator.
    pub sigma_delta: f64,
    pub cv_folds: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            a_mode: AMode::Sigma,
            gamma_mode: GammaMode::SqrtP,
            lasso: LassoConfig::default(),
            sigma_delta: 1e-2,
            cv_folds: 10,
        }
    }
}

/// Lazily computed per-repetition artifacts with their wall-clock costs (in
/// milliseconds), so shared work is done once but billed to every consumer.
struct RepContext {
    data: Dataset,
    true_support: Support,
    gamma: f64,
    fold_seed: u64,
    lasso_path: Option<(Vec<f64>, SupportPath, f64)>,
    thrr_path: Option<(ThrrGrid, SupportPath, f64)>,
    sigma_hat: Option<(NoiseEstimate, f64)>,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

impl RepContext {
    fn lasso_path(&mut self, r: usize, cfg: &LassoConfig) -> Result<&(Vec<f64>, SupportPath, f64)> {
        if self.lasso_path.is_none() {
            let t = Instant::now();
            let (grid, path) = lasso_support_path(&self.data, &GridSpec::lasso(r), cfg)?;
            self.lasso_path = Some((grid, path, ms(t)));
        }
        Ok(self.lasso_path.as_ref().unwrap())
    }

    fn thrr_path(&mut self, r: usize) -> Result<&(ThrrGrid, SupportPath, f64)> {
        if self.thrr_path.is_none() {
            let t = Instant::now();
            let (grid, path) = thrr_support_path(&self.data, self.gamma, &GridSpec::thrr(r))?;
            self.thrr_path = Some((grid, path, ms(t)));
        }
        Ok(self.thrr_path.as_ref().unwrap())
    }

    fn sigma_hat(&mut self, delta: f64, cfg: &LassoConfig) -> &(NoiseEstimate, f64) {
        if self.sigma_hat.is_none() {
            let t = Instant::now();
            let est = scaled_lasso_sigma(&self.data, delta, cfg);
            self.sigma_hat = Some((est, ms(t)));
        }
        self.sigma_hat.as_ref().unwrap()
    }

    /// Test constant, its attributed cost, and its provenance.
    fn a_constant(&mut self, hat: bool, opts: &RunOptions) -> Result<(f64, f64, ASource)> {
        if hat {
            let (est, cost) = self.sigma_hat(opts.sigma_delta, &opts.lasso);
            return Ok((
                est.sigma_hat * est.sigma_hat,
                *cost,
                ASource::EstimatedSigma,
            ));
        }
        match opts.a_mode {
            AMode::Sigma => {
                let sigma = self
                    .data
                    .truth()
                    .ok_or_else(|| Error::Validation("a-mode sigma needs ground truth".into()))?
                    .sigma;
                Ok((sigma * sigma, 0.0, ASource::KnownSigma))
            }
            AMode::SigmaHat => {
                let (est, cost) = self.sigma_hat(opts.sigma_delta, &opts.lasso);
                Ok((
                    est.sigma_hat * est.sigma_hat,
                    *cost,
                    ASource::EstimatedSigma,
                ))
            }
            AMode::Value(v) => Ok((v, 0.0, ASource::Explicit)),
        }
    }
}

struct MethodOutcome {
    loss: f64,
    support_size: usize,
    oracle_size: Option<usize>,
    wall_ms: f64,
    selected: Selected,
}

fn loss_of(data: &Dataset, coefficients: &DVector<f64>) -> Result<f64> {
    let truth = data
        .truth()
        .ok_or_else(|| Error::Validation("experiment data must carry ground truth".into()))?;
    prediction_loss(coefficients, &truth.beta, data.x())
}

fn run_method(
    ctx: &mut RepContext,
    method: Method,
    cfg: &SimConfig,
    opts: &RunOptions,
) -> Result<MethodOutcome> {
    match method {
        Method::LassoAvp { hat } | Method::ThrrAvp { hat } => {
            let (a, a_cost, a_source) = ctx.a_constant(hat, opts)?;
            let (path, path_cost) = match method {
                Method::LassoAvp { .. } => {
                    let (_, path, cost) = ctx.lasso_path(cfg.r, &opts.lasso)?;
                    (path.clone(), *cost)
                }
                _ => {
                    let (_, path, cost) = ctx.thrr_path(cfg.r)?;
                    (path.clone(), *cost)
                }
            };
            let t = Instant::now();
            let result = avp_select(&ctx.data, &path, &AvpConfig::new(a, a_source))?;
            let own = ms(t);
            Ok(MethodOutcome {
                loss: loss_of(&ctx.data, &result.estimate.coefficients)?,
                support_size: result.selected_support.len(),
                oracle_size: oracle_index(&path, &ctx.true_support).map(|i| path.sets()[i].len()),
                wall_ms: path_cost + a_cost + own,
                selected: Selected::Index(result.selected_index),
            })
        }
        Method::LassoIc | Method::ThrrIc => {
            let (a, a_cost, _) = ctx.a_constant(false, opts)?;
            let (path, path_cost) = match method {
                Method::LassoIc => {
                    let (_, path, cost) = ctx.lasso_path(cfg.r, &opts.lasso)?;
                    (path.clone(), *cost)
                }
                _ => {
                    let (_, path, cost) = ctx.thrr_path(cfg.r)?;
                    (path.clone(), *cost)
                }
            };
            let t = Instant::now();
            let (index, refit) = aic_bic_select(&ctx.data, &path, 2.0 * a);
            let own = ms(t);
            Ok(MethodOutcome {
                loss: loss_of(&ctx.data, &refit.coefficients)?,
                support_size: refit.support.len(),
                oracle_size: oracle_index(&path, &ctx.true_support).map(|i| path.sets()[i].len()),
                wall_ms: path_cost + a_cost + own,
                selected: Selected::Index(index),
            })
        }
        Method::LassoCv { refit } => {
            // CV consumes the full-data grid, then builds its own paths on
            // every training fold.
            let t_grid = Instant::now();
            let grid = crate::path::lasso_grid(&ctx.data, &GridSpec::lasso(cfg.r))?;
            let grid_cost = ms(t_grid);
            let t = Instant::now();
            let sel = kfold_cv_select(
                &ctx.data,
                &grid,
                &CvMethod::Lasso(opts.lasso.clone()),
                &CvConfig::new(opts.cv_folds, ctx.fold_seed, refit),
            )?;
            let own = ms(t);
            Ok(MethodOutcome {
                loss: loss_of(&ctx.data, &sel.estimate.coefficients)?,
                support_size: sel.estimate.support.len(),
                oracle_size: None,
                wall_ms: grid_cost + own,
                selected: Selected::Param(sel.chosen),
            })
        }
        Method::ThrrCv { refit } => {
            let t_grid = Instant::now();
            let grid = crate::path::thrr_grid(&ctx.data, ctx.gamma, &GridSpec::thrr(cfg.r))?;
            let grid_cost = ms(t_grid);
            let t = Instant::now();
            let sel = kfold_cv_select(
                &ctx.data,
                &grid.thresholds,
                &CvMethod::Thrr { gamma: ctx.gamma },
                &CvConfig::new(opts.cv_folds, ctx.fold_seed, refit),
            )?;
            let own = ms(t);
            Ok(MethodOutcome {
                loss: loss_of(&ctx.data, &sel.estimate.coefficients)?,
                support_size: sel.estimate.support.len(),
                oracle_size: None,
                wall_ms: grid_cost + own,
                selected: Selected::Param(sel.chosen),
            })
        }
        Method::LassoPath | Method::LslassoPath => {
            let (path, path_cost) = {
                let (_, path, cost) = ctx.lasso_path(cfg.r, &opts.lasso)?;
                (path.clone(), *cost)
            };
            let mut wall = path_cost;
            if method == Method::LslassoPath {
                let t = Instant::now();
                for s in path.sets() {
                    let _ = refit_least_squares(&ctx.data, s);
                }
                wall += ms(t);
            }
            Ok(MethodOutcome {
                loss: 0.0,
                support_size: 0,
                oracle_size: None,
                wall_ms: wall,
                selected: Selected::Index(0),
            })
        }
        Method::ThrrPath | Method::LsthrrPath => {
            let (path, path_cost) = {
                let (_, path, cost) = ctx.thrr_path(cfg.r)?;
                (path.clone(), *cost)
            };
            let mut wall = path_cost;
            if method == Method::LsthrrPath {
                let t = Instant::now();
                for s in path.sets() {
                    let _ = refit_least_squares(&ctx.data, s);
                }
                wall += ms(t);
            }
            Ok(MethodOutcome {
                loss: 0.0,
                support_size: 0,
                oracle_size: None,
                wall_ms: wall,
                selected: Selected::Index(0),
            })
        }
    }
}

/// Runs every method on every repetition and returns one record per
/// (method, repetition), sorted by method name then repetition.
pub fn run_experiment(
    cfg: &SimConfig,
    methods: &[Method],
    opts: &RunOptions,
) -> Result<Vec<ExperimentRecord>> {
    cfg.validate()?;
    if methods.is_empty() {
        return Err(Error::Validation("no methods requested".into()));
    }
    let mut records = Vec::with_capacity(methods.len() * cfg.reps);
    for rep in 0..cfg.reps {
        let data = generate_dataset(cfg, rep)?;
        let true_support = data.true_support().expect("synthetic data carries truth");
        let fold_seed = rep_rng(cfg.seed, rep, 1).random::<u64>();
        let mut ctx = RepContext {
            data,
            true_support,
            gamma: opts.gamma_mode.resolve(cfg.p),
            fold_seed,
            lasso_path: None,
            thrr_path: None,
            sigma_hat: None,
        };
        for &method in methods {
            let out = run_method(&mut ctx, method, cfg, opts)?;
            records.push(ExperimentRecord {
                method: method.name().to_string(),
                rep,
                seed: cfg.seed,
                n: cfg.n,
                p: cfg.p,
                s: cfg.s,
                sigma: cfg.sigma,
                rho: cfg.rho,
                r: cfg.r,
                loss: out.loss,
                support_size: out.support_size,
                oracle_size: out.oracle_size,
                wall_ms: out.wall_ms,
                selected: out.selected,
            });
        }
    }
    records.sort_by(|a, b| a.method.cmp(&b.method).then(a.rep.cmp(&b.rep)));
    Ok(records)
}
