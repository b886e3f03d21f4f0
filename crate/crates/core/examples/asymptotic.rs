//! Share of alternatives the filter deletes along the sparse, growing-signal
//! path eps = m^-gamma, mu = m^r, on both sides of the detectability boundary.
//!
//! `cargo run --release --example asymptotic -- [reps]`

use unifilter::sim::{run_asymptotic, AsymptoticConfig};

fn main() -> unifilter::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    for r in [0.7, 0.4] {
        let mut config = AsymptoticConfig::new(0.8, r);
        config.reps = reps;
        println!("gamma 0.8, r {r} (boundary at r = 0.6)");
        for p in run_asymptotic(&config, 0)? {
            match p.fe_fraction {
                Some(s) => println!("  m {:>7}  eps {:.5}  mu {:>8.2}  deleted share {:.4}", p.m, p.epsilon, p.mu, s.mean),
                None => println!("  m {:>7}  vacuous (eps m < 1)", p.m),
            }
        }
    }
    Ok(())
}
