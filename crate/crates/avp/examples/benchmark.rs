//! A small end-to-end benchmark run: several calibration methods on repeated
//! synthetic datasets, results written to CSV and summarized per method.
//! The `avp-bench simulate` subcommand wraps exactly this flow.
//!
//! Run with: cargo run --release --example benchmark

use avp::bench::{
    run_experiment, summarize_records, write_results, Method, OutputFormat, RunOptions, SimConfig,
};

fn main() -> avp::Result<()> {
    let cfg = SimConfig {
        n: 100,
        p: 50,
        s: 5,
        sigma: 1.0,
        rho: 0.5,
        reps: 10,
        seed: 0,
        r: 10,
        ..SimConfig::default()
    };
    let methods = [
        Method::LassoAvp { hat: false },
        Method::LassoAvp { hat: true },
        Method::LassoCv { refit: true },
        Method::ThrrAvp { hat: true },
        Method::ThrrCv { refit: true },
    ];
    let records = run_experiment(&cfg, &methods, &RunOptions::default())?;

    let out = std::env::temp_dir().join("avp_benchmark_example.csv");
    write_results(&records, &out, OutputFormat::Csv)?;
    println!("wrote {} records to {}", records.len(), out.display());

    println!(
        "{:<14} {:>5} {:>12} {:>12} {:>12} {:>14}",
        "method", "count", "loss_q1", "loss_median", "loss_q3", "wall_ms_median"
    );
    for s in summarize_records(&records) {
        println!(
            "{:<14} {:>5} {:>12.3} {:>12.3} {:>12.3} {:>14.3}",
            s.method, s.count, s.loss_q1, s.loss_median, s.loss_q3, s.wall_ms_median
        );
    }
    Ok(())
}
