//! Rough noise-level estimation by alternating lasso fits and residual
//! updates with early stopping. The estimate seeds the adaptive-validation
//! test constant when the true variance is unknown.
//!
//! Run with: cargo run --release --example noise_estimate

use avp::bench::{generate_dataset, SimConfig};
use avp::solvers::{scaled_lasso_sigma, LassoConfig};

fn main() -> avp::Result<()> {
    let cfg_lasso = LassoConfig::default();
    for sigma in [0.5, 1.0, 2.0] {
        let cfg = SimConfig {
            n: 200,
            p: 100,
            s: 10,
            sigma,
            rho: 0.5,
            seed: 3,
            ..SimConfig::default()
        };
        let mut estimates = Vec::new();
        let mut iterations = Vec::new();
        for rep in 0..10 {
            let data = generate_dataset(&cfg, rep)?;
            let est = scaled_lasso_sigma(&data, 1e-2, &cfg_lasso);
            estimates.push(est.sigma_hat);
            iterations.push(est.iterations);
        }
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        println!(
            "true sigma {sigma:.1}: mean estimate {mean:.3} over 10 repetitions, iterations {:?}",
            iterations
        );
    }
    Ok(())
}
