//! Loading a real (y, X) dataset from CSV — first column the response, the
//! rest the design; a header line is detected and skipped — and running the
//! two-step pipeline on it with an estimated noise level.
//!
//! Run with: cargo run --release --example load_csv

use std::io::Write;

use avp::avp::{avp_select, ASource, AvpConfig};
use avp::bench::load_dataset_csv;
use avp::path::{lasso_support_path, GridSpec};
use avp::solvers::{scaled_lasso_sigma, LassoConfig};

fn main() -> avp::Result<()> {
    // Write a small file to load; in practice this is your own data.
    let path = std::env::temp_dir().join("avp_example_data.csv");
    let mut file = std::fs::File::create(&path)?;
    writeln!(file, "y,x1,x2,x3,x4")?;
    let rows = [
        (3.1, 1.0, 0.2, -0.5, 0.1),
        (-2.0, -0.8, 0.1, 0.3, -0.2),
        (2.6, 0.9, -0.3, -0.2, 0.5),
        (-3.4, -1.1, 0.4, 0.2, -0.4),
        (0.4, 0.1, 0.7, -0.8, 0.3),
        (1.8, 0.6, -0.5, 0.1, -0.6),
        (-1.2, -0.4, 0.3, 0.6, 0.2),
        (2.2, 0.8, 0.1, -0.4, -0.1),
    ];
    for (y, a, b, c, d) in rows {
        writeln!(file, "{y},{a},{b},{c},{d}")?;
    }

    let data = load_dataset_csv(&path)?;
    println!(
        "loaded {} samples with {} features (columns standardized to norm sqrt(n))",
        data.n(),
        data.p()
    );

    let cfg = LassoConfig::default();
    let (grid, support_path) = lasso_support_path(&data, &GridSpec::lasso(8), &cfg)?;
    println!(
        "lasso grid from {:.3} to {:.5}; distinct supports: {:?}",
        grid[0],
        grid[grid.len() - 1],
        support_path
            .sets()
            .iter()
            .map(|s| s.len())
            .collect::<Vec<_>>()
    );

    let noise = scaled_lasso_sigma(&data, 1e-2, &cfg);
    let a = noise.sigma_hat * noise.sigma_hat;
    println!("estimated noise level {:.3}", noise.sigma_hat);

    let result = avp_select(
        &data,
        &support_path,
        &AvpConfig::new(a, ASource::EstimatedSigma),
    )?;
    println!(
        "selected support (1-based indices): {} with {} refits computed",
        result.selected_support, result.refits_computed
    );
    Ok(())
}
