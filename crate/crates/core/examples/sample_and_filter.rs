//! Draw a Cauchy mixture and thin it with both uniform filters.
//!
//! `cargo run --example sample_and_filter -- [seed]`

use unifilter::filters::{apply_filter, deletion_count, FilterConfig};
use unifilter::mixtures::{sample_pvalues, MixtureModel};

fn main() -> unifilter::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let model = MixtureModel::cauchy(0.15, 10.0)?;
    let sample = sample_pvalues(&model, 1000, seed)?;
    let labels = sample.h.as_deref().expect("simulated samples carry labels");
    println!("m = {}, alternatives = {}", sample.len(), sample.alternatives().unwrap());

    let xi = 0.15;
    println!("deletion count for xi = {xi}: {}", deletion_count(xi, sample.len()));
    for (name, config) in [
        ("fixed", FilterConfig::fixed(xi)),
        ("random", FilterConfig::random(xi, seed)),
    ] {
        let out = apply_filter(&sample, &config)?;
        println!(
            "{name:>6}: deleted {:4} (alternatives {:3}), retained {:4} (alternatives {:3})",
            out.deleted.len(),
            out.deleted_alternatives(labels),
            out.retained.len(),
            out.retained_alternatives(labels),
        );
    }
    Ok(())
}
