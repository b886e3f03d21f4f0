//! Median error of the filtered mode estimate as the sample grows.
//!
//! `cargo run --release --example mode_convergence -- [reps]`

use unifilter::mixtures::MixtureModel;
use unifilter::sim::{run_mode_convergence, ModeConvergenceConfig};

fn main() -> unifilter::Result<()> {
    let mut config = ModeConvergenceConfig::new(MixtureModel::cauchy(0.15, 10.0)?);
    if let Some(reps) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        config.reps = reps;
    }
    for p in run_mode_convergence(&config, 0)? {
        println!("m {:>5}  median |theta_hat - theta| {:.6}", p.m, p.median_abs_error);
    }
    Ok(())
}
