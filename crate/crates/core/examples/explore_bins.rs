//! Histogram of small p-values: with a strong signal a few bins near zero
//! stand well above the flat null level.
//!
//! `cargo run --example explore_bins -- [seed]`

use unifilter::filters::bin_counts;
use unifilter::mixtures::{sample_pvalues, MixtureModel};

fn main() -> unifilter::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let model = MixtureModel::cauchy(0.05, 100.0)?;
    let sample = sample_pvalues(&model, 200, seed)?;
    let nbins = 200;
    let counts = bin_counts(&sample.p, nbins)?;
    for (i, &c) in counts.iter().enumerate() {
        let mid = (i as f64 + 0.5) / nbins as f64;
        if mid > 0.05 {
            break;
        }
        println!("{mid:.4} {:>3} {}", c, "#".repeat(c as usize));
    }
    Ok(())
}
