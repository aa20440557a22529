//! Synthetic benchmark machinery: data generation, the experiment runner
//! comparing calibration schemes, diagnostics, and results I/O.

mod diagnostics;
mod experiment;
mod io;
mod sim;

pub use diagnostics::{
    check_scale_symmetry_lasso, check_scale_symmetry_thrr, check_sqrt_lasso_equivalence,
    probe_path_robustness, KktCheck, SqrtLassoReport,
};
pub use experiment::{run_experiment, AMode, GammaMode, RunOptions};
pub use io::{
    load_dataset_csv, read_records, read_records_csv, read_records_json, summarize_records,
    write_results, write_results_string, MethodSummary, OutputFormat,
};
pub use sim::generate_dataset;

use crate::error::{Error, Result};

/// Synthetic experiment configuration: equicorrelated Gaussian design with a
/// flat sparse signal.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub n: usize,
    pub p: usize,
    /// Number of active coefficients (the first `s` entries of beta).
    pub s: usize,
    pub beta_value: f64,
    pub sigma: f64,
    /// Common off-diagonal correlation of the design rows, in [0, 1).
    pub rho: f64,
    pub reps: usize,
    pub seed: u64,
    /// Grid size for both penalty grids.
    pub r: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 200,
            p: 100,
            s: 10,
            beta_value: 1.0,
            sigma: 1.0,
            rho: 0.5,
            reps: 50,
            seed: 0,
            r: 10,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::Validation("n and p must be positive".into()));
        }
        if self.s > self.p {
            return Err(Error::Validation(format!(
                "active-set size s = {} exceeds p = {}",
                self.s, self.p
            )));
        }
        if !(self.rho >= 0.0 && self.rho < 1.0) {
            return Err(Error::Validation("rho must lie in [0, 1)".into()));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::Validation("sigma must be positive".into()));
        }
        if self.r < 2 {
            return Err(Error::Validation("grid size r must be at least 2".into()));
        }
        if self.reps == 0 {
            return Err(Error::Validation("reps must be at least 1".into()));
        }
        Ok(())
    }
}

/// The methods the experiment runner knows how to time and score.
///
/// `*_path` entries are timing-only rows (loss and support size recorded as
/// zero): they measure the cost of computing one tuning-parameter path, so
/// readers can subtract path cost from the full methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Adaptive validation on the lasso path; `hat` uses the estimated
    /// noise level for the test constant.
    LassoAvp {
        hat: bool,
    },
    /// Cross-validated lasso; `refit` scores refitted estimates.
    LassoCv {
        refit: bool,
    },
    /// Residual-plus-penalty comparator on the lasso path.
    LassoIc,
    ThrrAvp {
        hat: bool,
    },
    ThrrCv {
        refit: bool,
    },
    ThrrIc,
    LassoPath,
    LslassoPath,
    ThrrPath,
    LsthrrPath,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::LassoAvp { hat: false } => "lassoAVp",
            Method::LassoAvp { hat: true } => "lassoAVp_hat",
            Method::LassoCv { refit: false } => "lassoCV",
            Method::LassoCv { refit: true } => "lslassoCV",
            Method::LassoIc => "lassoIC",
            Method::ThrrAvp { hat: false } => "thrrAVp",
            Method::ThrrAvp { hat: true } => "thrrAVp_hat",
            Method::ThrrCv { refit: false } => "thrrCV",
            Method::ThrrCv { refit: true } => "lsthrrCV",
            Method::ThrrIc => "thrrIC",
            Method::LassoPath => "lasso_path",
            Method::LslassoPath => "lslasso_path",
            Method::ThrrPath => "thrr_path",
            Method::LsthrrPath => "lsthrr_path",
        }
    }

    pub fn all_statistical() -> Vec<Method> {
        vec![
            Method::LassoAvp { hat: false },
            Method::LassoAvp { hat: true },
            Method::LassoCv { refit: false },
            Method::LassoCv { refit: true },
            Method::ThrrAvp { hat: false },
            Method::ThrrAvp { hat: true },
            Method::ThrrCv { refit: false },
            Method::ThrrCv { refit: true },
        ]
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lassoAVp" => Ok(Method::LassoAvp { hat: false }),
            "lassoAVp_hat" => Ok(Method::LassoAvp { hat: true }),
            "lassoCV" => Ok(Method::LassoCv { refit: false }),
            "lslassoCV" => Ok(Method::LassoCv { refit: true }),
            "lassoIC" => Ok(Method::LassoIc),
            "thrrAVp" => Ok(Method::ThrrAvp { hat: false }),
            "thrrAVp_hat" => Ok(Method::ThrrAvp { hat: true }),
            "thrrCV" => Ok(Method::ThrrCv { refit: false }),
            "lsthrrCV" => Ok(Method::ThrrCv { refit: true }),
            "thrrIC" => Ok(Method::ThrrIc),
            "lasso_path" => Ok(Method::LassoPath),
            "lslasso_path" => Ok(Method::LslassoPath),
            "thrr_path" => Ok(Method::ThrrPath),
            "lsthrr_path" => Ok(Method::LsthrrPath),
            other => Err(Error::Validation(format!("unknown method '{other}'"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What a method selected: a path index (reported 1-based) or a tuning
/// parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selected {
    Index(usize),
    Param(f64),
}

/// One method's outcome on one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub method: String,
    pub rep: usize,
    pub seed: u64,
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub sigma: f64,
    pub rho: f64,
    pub r: usize,
    /// Squared prediction loss against the true signal.
    pub loss: f64,
    pub support_size: usize,
    /// Size of the smallest path set containing the true support, when the
    /// method owns a path and such a set exists.
    pub oracle_size: Option<usize>,
    pub wall_ms: f64,
    pub selected: Selected,
}

impl ExperimentRecord {
    /// Equality on everything except the wall-clock field, which is not a
    /// deterministic function of the configuration.
    pub fn same_outcome(&self, other: &ExperimentRecord) -> bool {
        self.method == other.method
            && self.rep == other.rep
            && self.seed == other.seed
            && self.n == other.n
            && self.p == other.p
            && self.s == other.s
            && self.sigma == other.sigma
            && self.rho == other.rho
            && self.r == other.r
            && self.loss == other.loss
            && self.support_size == other.support_size
            && self.oracle_size == other.oracle_size
            && self.selected == other.selected
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_tokens_round_trip() {
        let all = [
            Method::LassoAvp { hat: false },
            Method::LassoAvp { hat: true },
            Method::LassoCv { refit: false },
            Method::LassoCv { refit: true },
            Method::LassoIc,
            Method::ThrrAvp { hat: false },
            Method::ThrrAvp { hat: true },
            Method::ThrrCv { refit: false },
            Method::ThrrCv { refit: true },
            Method::ThrrIc,
            Method::LassoPath,
            Method::LslassoPath,
            Method::ThrrPath,
            Method::LsthrrPath,
        ];
        for method in all {
            assert_eq!(method.name().parse::<Method>().unwrap(), method);
        }
        assert!("".parse::<Method>().is_err());
        assert!("lassoavp".parse::<Method>().is_err());
    }

    #[test]
    fn sim_config_validation() {
        assert!(SimConfig::default().validate().is_ok());
        assert!(SimConfig {
            s: 101,
            ..SimConfig::default()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            rho: 1.0,
            ..SimConfig::default()
        }
        .validate()
        .is_err());
        assert!(SimConfig {
            r: 1,
            ..SimConfig::default()
        }
        .validate()
        .is_err());
    }
}
