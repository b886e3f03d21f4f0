//! Choose the retained fraction by lowering it until the mode estimate
//! stops moving.
//!
//! `cargo run --example stabilized_xi -- [mu] [seed]`

use unifilter::density::{default_schedule, stabilized_xi, ModeOptions, DEFAULT_STABILITY};
use unifilter::mixtures::{sample_pvalues, MixtureModel};

fn main() -> unifilter::Result<()> {
    let mut args = std::env::args().skip(1);
    let mu: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(20.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let sample = sample_pvalues(&MixtureModel::cauchy(0.15, mu)?, 1000, seed)?;
    for (name, options) in [("p axis", ModeOptions::default()), ("-log p axis", ModeOptions::transformed())] {
        let st = stabilized_xi(&sample, DEFAULT_STABILITY, &default_schedule(), &options)?;
        println!("{name}: xi_hat {} theta_hat {:.5} stabilized {}", st.xi_hat, st.mode.theta_hat, st.stabilized);
        for (xi, theta) in &st.path {
            println!("  xi {xi:<4} theta_hat {theta:.5}");
        }
    }
    Ok(())
}
