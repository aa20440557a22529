//! Command-line front end for the benchmark runner.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad flags or
//! configuration), 2 on I/O errors (unreadable/unwritable or malformed
//! files).

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::bench::{
    check_scale_symmetry_lasso, check_scale_symmetry_thrr, check_sqrt_lasso_equivalence,
    generate_dataset, probe_path_robustness, read_records, run_experiment, summarize_records,
    write_results, AMode, GammaMode, Method, OutputFormat, RunOptions, SimConfig,
};
use crate::error::{Error, Result};
use crate::path::{lasso_grid, GridSpec};
use crate::solvers::LassoConfig;

#[derive(Parser)]
#[command(
    name = "avp-bench",
    about = "Synthetic benchmarks for two-step sparse regression calibration",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Sample count
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Feature count
    #[arg(long, default_value_t = 100)]
    p: usize,
    /// Active-set size (first s coefficients are nonzero)
    #[arg(long, default_value_t = 10)]
    s: usize,
    /// Noise standard deviation
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Common design correlation, in [0, 1)
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
    /// Base seed; repetition k uses stream k
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid size for both tuning grids
    #[arg(long, default_value_t = 10)]
    r: usize,
}

impl DataArgs {
    fn sim_config(&self, reps: usize) -> SimConfig {
        SimConfig {
            n: self.n,
            p: self.p,
            s: self.s,
            beta_value: 1.0,
            sigma: self.sigma,
            rho: self.rho,
            reps,
            seed: self.seed,
            r: self.r,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated synthetic experiments and write per-method records
    Simulate {
        #[command(flatten)]
        data: DataArgs,
        /// Repetitions
        #[arg(long, default_value_t = 50)]
        reps: usize,
        /// Comma-separated method names (see README for the roster)
        #[arg(
            long,
            default_value = "lassoAVp,lassoAVp_hat,lassoCV,lslassoCV,thrrAVp,thrrAVp_hat,thrrCV,lsthrrCV"
        )]
        methods: String,
        /// Test constant source: sigma | sigma-hat | value:<x>
        #[arg(long, default_value = "sigma")]
        a_mode: String,
        /// Ridge parameter policy: sqrt-p | value:<x>
        #[arg(long, default_value = "sqrt-p")]
        gamma_mode: String,
        /// Output file
        #[arg(long)]
        out: PathBuf,
        /// Output format: csv | json
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run scale-symmetry, constrained-form, and path-robustness diagnostics
    Diagnose {
        #[command(flatten)]
        data: DataArgs,
        /// Number of perturbation probes
        #[arg(long, default_value_t = 20)]
        probes: usize,
        /// l-infinity radius of the perturbations
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        /// Ridge parameter policy: sqrt-p | value:<x>
        #[arg(long, default_value = "sqrt-p")]
        gamma_mode: String,
    },
    /// Print per-method loss quartiles and median wall time from a results file
    Summarize {
        /// Results file written by `simulate` (csv or json)
        file: PathBuf,
    },
}

fn parse_methods(spec: &str) -> Result<Vec<Method>> {
    let methods: Result<Vec<Method>> = spec
        .split(',')
        .map(|tok| tok.trim())
        .filter(|tok| !tok.is_empty())
        .map(|tok| tok.parse::<Method>())
        .collect();
    let methods = methods?;
    if methods.is_empty() {
        return Err(Error::Validation("no methods requested".into()));
    }
    Ok(methods)
}

fn cmd_simulate(
    data: DataArgs,
    reps: usize,
    methods: String,
    a_mode: String,
    gamma_mode: String,
    out: PathBuf,
    format: String,
) -> Result<()> {
    let cfg = data.sim_config(reps);
    cfg.validate()?;
    let methods = parse_methods(&methods)?;
    let opts = RunOptions {
        a_mode: a_mode.parse::<AMode>()?,
        gamma_mode: gamma_mode.parse::<GammaMode>()?,
        ..RunOptions::default()
    };
    let format = format.parse::<OutputFormat>()?;
    let records = run_experiment(&cfg, &methods, &opts)?;
    write_results(&records, &out, format)?;
    eprintln!(
        "wrote {} records ({} methods x {} reps) to {}",
        records.len(),
        methods.len(),
        cfg.reps,
        out.display()
    );
    Ok(())
}

fn cmd_diagnose(data: DataArgs, probes: usize, radius: f64, gamma_mode: String) -> Result<()> {
    let cfg = data.sim_config(1);
    cfg.validate()?;
    if probes == 0 {
        return Err(Error::Validation("need at least one probe".into()));
    }
    if radius < 0.0 {
        return Err(Error::Validation("radius must be nonnegative".into()));
    }
    let gamma = gamma_mode.parse::<GammaMode>()?.resolve(cfg.p);
    let dataset = generate_dataset(&cfg, 0)?;
    let grid = lasso_grid(&dataset, &GridSpec::lasso(cfg.r))?;
    let lasso_cfg = LassoConfig::default();
    // The constrained-form check compares first-order conditions, so solve
    // tighter than the default.
    let tight_cfg = LassoConfig {
        tol: 1e-12,
        ..LassoConfig::default()
    };

    println!(
        "dataset: n={} p={} s={} sigma={} rho={} seed={} r={}",
        cfg.n, cfg.p, cfg.s, cfg.sigma, cfg.rho, cfg.seed, cfg.r
    );
    let (_, path) = crate::path::lasso_support_path(&dataset, &GridSpec::lasso(cfg.r), &lasso_cfg)?;
    println!(
        "lasso path support sizes: {:?}",
        path.sets().iter().map(|s| s.len()).collect::<Vec<_>>()
    );

    let lasso_sym = check_scale_symmetry_lasso(&dataset, &grid, &lasso_cfg)?;
    let ok = lasso_sym.iter().filter(|(_, ok)| *ok).count();
    println!(
        "scale symmetry (lasso): {ok}/{} grid points pass",
        lasso_sym.len()
    );

    let thr_grid = crate::path::thrr_grid(&dataset, gamma, &GridSpec::thrr(cfg.r))?;
    let thrr_sym = check_scale_symmetry_thrr(&dataset, gamma, &thr_grid.thresholds)?;
    let ok = thrr_sym.iter().filter(|(_, ok)| *ok).count();
    println!(
        "scale symmetry (thrr, gamma={gamma:.4}): {ok}/{} thresholds pass",
        thrr_sym.len()
    );

    let report = check_sqrt_lasso_equivalence(&dataset, &grid, &tight_cfg)?;
    let ok = report.checks.iter().filter(|c| c.passed).count();
    println!(
        "constrained-form (sqrt-lasso) equivalence: {ok}/{} penalties pass",
        report.checks.len()
    );
    for check in &report.checks {
        println!(
            "  lambda={:12.6} radius_l1={:10.6} passed={} spread={:.3e}",
            check.lambda, check.radius_l1, check.passed, check.active_spread
        );
    }

    let fraction = probe_path_robustness(&dataset, &grid, probes, radius, cfg.seed, &lasso_cfg)?;
    println!("robustness probe: radius={radius} probes={probes} stable fraction={fraction:.3}");
    Ok(())
}

fn cmd_summarize(file: PathBuf) -> Result<()> {
    let records = read_records(&file)?;
    let summaries = summarize_records(&records);
    println!(
        "{:<14} {:>5} {:>14} {:>14} {:>14} {:>14}",
        "method", "count", "loss_q1", "loss_median", "loss_q3", "wall_ms_median"
    );
    for s in summaries {
        println!(
            "{:<14} {:>5} {:>14.6} {:>14.6} {:>14.6} {:>14.6}",
            s.method, s.count, s.loss_q1, s.loss_median, s.loss_q3, s.wall_ms_median
        );
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            data,
            reps,
            methods,
            a_mode,
            gamma_mode,
            out,
            format,
        } => cmd_simulate(data, reps, methods, a_mode, gamma_mode, out, format),
        Command::Diagnose {
            data,
            probes,
            radius,
            gamma_mode,
        } => cmd_diagnose(data, probes, radius, gamma_mode),
        Command::Summarize { file } => cmd_summarize(file),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e @ (Error::Io(_) | Error::Parse(_))) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
