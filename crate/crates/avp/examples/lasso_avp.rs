//! Two-step prediction with the lasso: build a support path over a geometric
//! penalty grid, refit by least squares, and pick the support with the
//! adaptive-validation rule using the known noise variance.
//!
//! Run with: cargo run --release --example lasso_avp

use avp::avp::{avp_select, ASource, AvpConfig};
use avp::bench::{generate_dataset, SimConfig};
use avp::model::oracle_index;
use avp::path::{lasso_support_path, GridSpec};
use avp::prediction_loss;
use avp::solvers::LassoConfig;

fn main() -> avp::Result<()> {
    let cfg = SimConfig {
        n: 200,
        p: 100,
        s: 10,
        sigma: 1.0,
        rho: 0.5,
        seed: 42,
        ..SimConfig::default()
    };
    let data = generate_dataset(&cfg, 0)?;
    println!(
        "synthetic data: n = {}, p = {}, true support size = {}",
        data.n(),
        data.p(),
        cfg.s
    );

    let lasso_cfg = LassoConfig::default();
    let (grid, path) = lasso_support_path(&data, &GridSpec::lasso(10), &lasso_cfg)?;
    println!(
        "penalty grid: {:.2} down to {:.4} ({} values)",
        grid[0],
        grid[grid.len() - 1],
        grid.len()
    );
    println!(
        "distinct supports along the path: {:?}",
        path.sets().iter().map(|s| s.len()).collect::<Vec<_>>()
    );

    let truth = data.truth().expect("synthetic data carries truth");
    let sigma2 = truth.sigma * truth.sigma;
    let result = avp_select(&data, &path, &AvpConfig::new(sigma2, ASource::KnownSigma))?;
    println!(
        "selected path index {} (1-based: {}), support size {}, after {} tests and {} refits",
        result.selected_index,
        result.selected_index + 1,
        result.selected_support.len(),
        result.tests_run.len(),
        result.refits_computed,
    );

    let loss = prediction_loss(&result.estimate.coefficients, &truth.beta, data.x())?;
    println!("prediction loss of the selected refit: {loss:.2}");

    if let Some(v) = oracle_index(&path, &data.true_support().unwrap()) {
        let oracle = &path.sets()[v];
        let refit = avp::solvers::refit_least_squares(&data, oracle);
        let oracle_loss = prediction_loss(&refit.coefficients, &truth.beta, data.x())?;
        println!(
            "oracle set (smallest path set containing the truth): size {}, loss {oracle_loss:.2}",
            oracle.len()
        );
    } else {
        println!("no path set contains the true support");
    }
    Ok(())
}
