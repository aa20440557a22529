//! Cross-validation baselines: 10-fold CV over the lasso grid scoring either
//! one-step or refitted estimates, plus the residual-plus-penalty
//! comparator; contrasted with adaptive validation on the same data.
//!
//! Run with: cargo run --release --example cross_validation

use avp::avp::{avp_select, ASource, AvpConfig};
use avp::baselines::{aic_bic_select, kfold_cv_select, CvConfig, CvMethod};
use avp::bench::{generate_dataset, SimConfig};
use avp::path::{lasso_grid, lasso_support_path, GridSpec};
use avp::prediction_loss;
use avp::solvers::LassoConfig;

fn main() -> avp::Result<()> {
    let cfg = SimConfig {
        n: 200,
        p: 100,
        s: 10,
        sigma: 1.0,
        rho: 0.5,
        seed: 11,
        ..SimConfig::default()
    };
    let data = generate_dataset(&cfg, 0)?;
    let truth = data.truth().unwrap();
    let lasso_cfg = LassoConfig::default();
    let grid = lasso_grid(&data, &GridSpec::lasso(10))?;

    // One-step scoring (lassoCV) vs refitted scoring (lslassoCV).
    for refit_inside in [false, true] {
        let sel = kfold_cv_select(
            &data,
            &grid,
            &CvMethod::Lasso(lasso_cfg.clone()),
            &CvConfig::new(10, 99, refit_inside),
        )?;
        let loss = prediction_loss(&sel.estimate.coefficients, &truth.beta, data.x())?;
        println!(
            "{}: chose lambda {:.3}, support size {}, loss {loss:.2}",
            if refit_inside {
                "lslassoCV"
            } else {
                "lassoCV "
            },
            sel.chosen,
            sel.estimate.support.len()
        );
    }

    // Residual + penalty-per-parameter comparator on the shared path.
    let (_, path) = lasso_support_path(&data, &GridSpec::lasso(10), &lasso_cfg)?;
    let sigma2 = truth.sigma * truth.sigma;
    let (idx, refit) = aic_bic_select(&data, &path, 2.0 * sigma2);
    let loss = prediction_loss(&refit.coefficients, &truth.beta, data.x())?;
    println!(
        "penalized comparator: index {} (support size {}), loss {loss:.2}",
        idx + 1,
        refit.support.len()
    );

    // Adaptive validation on the same path for contrast.
    let result = avp_select(&data, &path, &AvpConfig::new(sigma2, ASource::KnownSigma))?;
    let loss = prediction_loss(&result.estimate.coefficients, &truth.beta, data.x())?;
    println!(
        "adaptive validation: index {} (support size {}), loss {loss:.2}, {} refits",
        result.selected_index + 1,
        result.selected_support.len(),
        result.refits_computed
    );
    Ok(())
}
