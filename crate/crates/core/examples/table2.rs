//! Replicated Cauchy pipeline at one shift, summarised and checked against
//! the published column.
//!
//! `cargo run --release --example table2 -- [mu] [reps] [seed]`

use unifilter::reference::table2_checks;
use unifilter::sim::{run_table2, ExperimentConfig};

fn main() -> unifilter::Result<()> {
    let mut args = std::env::args().skip(1);
    let mu = args.next().and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let mut config = ExperimentConfig::table2(mu);
    if let Some(reps) = args.next().and_then(|s| s.parse().ok()) {
        config.reps = reps;
    }
    if let Some(seed) = args.next().and_then(|s| s.parse().ok()) {
        config.master_seed = seed;
    }

    let outcome = run_table2(&config, 0)?;
    println!("mu {mu}, {} replications, closed-form mode {:.5}", config.reps, outcome.theta);
    for (name, s) in &outcome.summary.metrics {
        println!("{name:<12} {:>10.5} {:>10}", s.mean, s.se.map_or("-".into(), |e| format!("{e:.5}")));
    }
    for check in table2_checks(&outcome) {
        println!("{}", check.line());
    }
    Ok(())
}
