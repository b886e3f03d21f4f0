//! Closed-form quantities of the two-group model: p-value densities, the
//! Cauchy mode, local FDR and expected false deletions of the filter.

use unifilter::mixtures::{
    cauchy_mode, detectability_constant, local_fdr, pvalue_density_cauchy, theoretical_remaining, MixtureModel,
};

fn main() -> unifilter::Result<()> {
    println!("{:>4} {:>9} {:>10} {:>10}", "mu", "mode", "f_P(mode)", "min lfdr");
    for mu in [6.0, 8.0, 10.0, 20.0] {
        let t = cauchy_mode(mu);
        let model = MixtureModel::cauchy(0.15, mu)?;
        println!("{mu:>4} {t:>9.5} {:>10.3} {:>10.4}", pvalue_density_cauchy(t, mu)?, local_fdr(t, &model)?);
    }

    let model = MixtureModel::gaussian(0.01, 5.0)?;
    println!(
        "Gaussian eps 0.01 mu 5, xi 0.05, m 40000: {:.1} alternatives expected to survive",
        theoretical_remaining(&model, 0.05, 40_000, 2000)?
    );
    for gamma in [0.25, 0.5, 0.75] {
        println!("detectability constant at gamma {gamma}: {:.4}", detectability_constant(gamma)?);
    }
    Ok(())
}
