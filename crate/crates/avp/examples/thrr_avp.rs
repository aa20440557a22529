//! Two-step prediction with thresholded ridge regression: thresholds are
//! placed so the supports hit sizes p/50, 2p/50, ..., and the
//! adaptive-validation rule picks among the refits, here with an estimated
//! noise level.
//!
//! Run with: cargo run --release --example thrr_avp

use avp::avp::{avp_select, ASource, AvpConfig};
use avp::bench::{generate_dataset, SimConfig};
use avp::path::{thrr_support_path, GridSpec};
use avp::prediction_loss;
use avp::solvers::{scaled_lasso_sigma, LassoConfig};

fn main() -> avp::Result<()> {
    let cfg = SimConfig {
        n: 200,
        p: 100,
        s: 10,
        sigma: 1.0,
        rho: 0.5,
        seed: 7,
        ..SimConfig::default()
    };
    let data = generate_dataset(&cfg, 0)?;

    let gamma = (cfg.p as f64).sqrt();
    let (grid, path) = thrr_support_path(&data, gamma, &GridSpec::thrr(10))?;
    println!("ridge parameter gamma = sqrt(p) = {gamma}");
    println!("target support sizes: {:?}", grid.target_sizes);
    println!("achieved support sizes: {:?}", grid.achieved_sizes);
    if !grid.all_exact() {
        println!("(some targets were unachievable due to magnitude ties)");
    }

    let noise = scaled_lasso_sigma(&data, 1e-2, &LassoConfig::default());
    println!(
        "estimated noise level: {:.3} ({} iterations, converged = {})",
        noise.sigma_hat, noise.iterations, noise.converged
    );

    let a = noise.sigma_hat * noise.sigma_hat;
    let result = avp_select(&data, &path, &AvpConfig::new(a, ASource::EstimatedSigma))?;
    let truth = data.truth().unwrap();
    let loss = prediction_loss(&result.estimate.coefficients, &truth.beta, data.x())?;
    println!(
        "selected support size {} with prediction loss {loss:.2}",
        result.selected_support.len()
    );
    println!("selected indices (1-based): {}", result.selected_support);
    Ok(())
}
