//! Surviving alternatives after the fixed-length filter, theory and
//! simulation, next to the published values.
//!
//! `cargo run --release --example table1 -- [reps] [seed]`

use unifilter::reference::{table1_checks, TABLE1};
use unifilter::sim::{run_table1, table1_rows};

fn main() -> unifilter::Result<()> {
    let mut args = std::env::args().skip(1);
    let reps = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let outcomes = run_table1(&table1_rows(), reps, seed, 0)?;
    println!("{:<9} {:>5} {:>5} {:>7} {:>16} {:>16}", "family", "xi", "mu", "theory", "simulated (se)", "published");
    for (o, r) in outcomes.iter().zip(TABLE1.iter()) {
        println!(
            "{:<9} {:>5} {:>5} {:>7} {:>8.1} ({:>5}) {:>8.1} ({:>4})",
            format!("{:?}", o.row.model.family),
            o.row.xi,
            o.row.model.mu,
            o.theoretical.map_or("-".into(), |t| format!("{t:.1}")),
            o.simulated.mean,
            o.simulated.se.map_or("-".into(), |s| format!("{s:.1}")),
            r.simulated,
            r.simulated_se,
        );
    }
    for check in table1_checks(&outcomes) {
        println!("{}", check.line());
    }
    Ok(())
}
