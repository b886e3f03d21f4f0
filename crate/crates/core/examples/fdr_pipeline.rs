//! Full pipeline on one sample: filter, mode, interval region with an FDR
//! estimate, then a comparison with Benjamini-Hochberg and Storey.
//!
//! `cargo run --example fdr_pipeline -- [mu] [seed]`

use unifilter::fdr::{bh_procedure, evaluate, storey_epsilon};
use unifilter::mixtures::{sample_pvalues, MixtureModel};
use unifilter::pipeline::{analyze, AnalysisConfig};

fn main() -> unifilter::Result<()> {
    let mut args = std::env::args().skip(1);
    let mu: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let model = MixtureModel::cauchy(0.15, mu)?;
    let sample = sample_pvalues(&model, 1000, seed)?;
    let analysis = analyze(&sample, &AnalysisConfig::new(0.15, 0.1))?;
    let r = &analysis.report;
    let region = r.region();
    println!("theta_hat   {:.5}", r.theta_hat);
    println!("region      [{:.5}, {:.5}]  (delta_hat {:.5})", region.lo(), region.hi(), r.delta_hat);
    println!("eps_hat     {:.4}  (Storey, lambda 0.5: {:.4})", r.epsilon_hat, storey_epsilon(&sample.p, 0.5)?);
    println!("rejections  {}  fdr_hat {:.4}  pfdr_hat {:?}", r.r, r.fdr_hat, r.pfdr_hat);
    if let Some(c) = &analysis.confusion {
        println!("interval    fdp {:.4}  tpp {:.4}", c.fdp, c.tpp);
    }

    let bh = bh_procedure(&sample.p, 0.1)?;
    let c = evaluate(&bh, sample.h.as_deref(), None)?;
    println!("BH          rejections {}  fdp {:.4}  tpp {:.4}", c.r, c.fdp, c.tpp);
    Ok(())
}
