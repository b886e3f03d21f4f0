//! Find two alternative clusters from weighted gaps, then give each its own
//! rejection region.
//!
//! `cargo run --example gap_centers -- [seed]`

use unifilter::gaps::default_window;
use unifilter::mixtures::{cauchy_mode, sample_pvalues_with_count, MixtureModel};
use unifilter::pipeline::analyze_centers;
use unifilter::rng::derive_seed;

fn main() -> unifilter::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(11);
    let nulls = sample_pvalues_with_count(&MixtureModel::cauchy(0.0, 0.0)?, 850, 0, seed)?;
    let near = sample_pvalues_with_count(&MixtureModel::cauchy(0.5, 20.0)?, 75, 75, derive_seed(seed, 1))?;
    let far = sample_pvalues_with_count(&MixtureModel::cauchy(0.5, 6.0)?, 75, 75, derive_seed(seed, 2))?;
    let p: Vec<f64> = nulls.p.into_iter().chain(near.p).chain(far.p).collect();

    println!("component modes: {:.4} (mu 20), {:.4} (mu 6)", cauchy_mode(20.0), cauchy_mode(6.0));
    let k = default_window(p.len());
    for c in analyze_centers(&p, k, 0.5, 0.15, 0.1)? {
        let region = c.report.region();
        println!(
            "center {:.4}  depth {:.2}  region [{:.4}, {:.4}]  rejections {}  fdr_hat {:.3}",
            c.center.p,
            c.center.depth,
            region.lo(),
            region.hi(),
            c.report.r,
            c.report.fdr_hat
        );
    }
    Ok(())
}
