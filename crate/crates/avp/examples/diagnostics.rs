//! Diagnostics behind the `avp-bench diagnose` subcommand:
//! - scale symmetry: supports are invariant under rescaling (y, lambda) to
//!   (y/lambda, 1), for both first-stage families;
//! - constrained-form optimality: each lasso solution solves the
//!   l1-constrained least-squares problem at its own l1 radius, which ties
//!   the penalized path to the square-root variant point by point;
//! - path robustness: how large an l-infinity perturbation of the noiseless
//!   target leaves the support family unchanged.
//!
//! Run with: cargo run --release --example diagnostics

use avp::bench::{
    check_scale_symmetry_lasso, check_scale_symmetry_thrr, check_sqrt_lasso_equivalence,
    generate_dataset, probe_path_robustness, SimConfig,
};
use avp::path::{lasso_grid, thrr_grid, GridSpec};
use avp::solvers::LassoConfig;

fn main() -> avp::Result<()> {
    let cfg = SimConfig {
        n: 100,
        p: 30,
        s: 5,
        sigma: 1.0,
        rho: 0.5,
        seed: 21,
        ..SimConfig::default()
    };
    let data = generate_dataset(&cfg, 0)?;
    let lasso_cfg = LassoConfig::default();
    let grid = lasso_grid(&data, &GridSpec::lasso(10))?;

    let sym = check_scale_symmetry_lasso(&data, &grid, &lasso_cfg)?;
    println!(
        "scale symmetry (lasso): {}/{} grid points pass",
        sym.iter().filter(|(_, ok)| *ok).count(),
        sym.len()
    );

    let gamma = (cfg.p as f64).sqrt();
    let tgrid = thrr_grid(&data, gamma, &GridSpec::thrr(10))?;
    let sym = check_scale_symmetry_thrr(&data, gamma, &tgrid.thresholds)?;
    println!(
        "scale symmetry (thrr):  {}/{} thresholds pass",
        sym.iter().filter(|(_, ok)| *ok).count(),
        sym.len()
    );

    // Constrained-form check needs a tightly converged solver.
    let tight = LassoConfig {
        tol: 1e-12,
        ..LassoConfig::default()
    };
    let report = check_sqrt_lasso_equivalence(&data, &grid, &tight)?;
    println!(
        "constrained-form equivalence: {}/{} penalties pass",
        report.checks.iter().filter(|c| c.passed).count(),
        report.checks.len()
    );

    for radius in [0.0, 1e-4, 0.05, 1.0] {
        let fraction = probe_path_robustness(&data, &grid, 40, radius, 1, &lasso_cfg)?;
        println!("robustness probe at radius {radius:>5}: stable fraction {fraction:.2}");
    }
    Ok(())
}
