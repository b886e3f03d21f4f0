//! Replicated Monte Carlo experiments.
//!
//! Every replication draws its sample from `derive_seed(master_seed, rep)`,
//! so results do not depend on how many worker threads run them and any
//! single replication can be re-run in isolation.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{estimate_mode, ModeOptions};
use crate::error::{Error, Result};
use crate::fdr::{evaluate, select_delta};
use crate::filters::{apply_filter, deletion_count, fixed_length_filter, Direction, FilterConfig, FilterKind};
use crate::mixtures::{cauchy_mode, sample_pvalues, sample_pvalues_with_count, theoretical_remaining, Family, MixtureModel};
use crate::reference::{self, TABLE1};
use crate::rng::derive_seed;

/// Riemann cells used for the theoretical remaining-alternative counts.
pub const THEORY_GRID: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: f64,
    /// Standard error of the mean; `None` for a single replication.
    pub se: Option<f64>,
    pub n: usize,
}

impl MetricSummary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return MetricSummary { mean: f64::NAN, se: None, n };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let se = (n > 1).then(|| {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        });
        MetricSummary { mean, se, n }
    }
}

/// Per-metric aggregates of a replicated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub reps: usize,
    pub metrics: BTreeMap<String, MetricSummary>,
}

impl ExperimentSummary {
    pub fn get(&self, metric: &str) -> Option<&MetricSummary> {
        self.metrics.get(metric)
    }

    /// Mean of `metric`, NaN if it is absent.
    pub fn mean(&self, metric: &str) -> f64 {
        self.get(metric).map_or(f64::NAN, |s| s.mean)
    }
}

/// Runs `f(0..n)` on `jobs` threads (0 = all cores) and returns results in index order.
pub fn run_indexed<T, F>(n: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..n).into_par_iter().map(&f).collect())
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    Ok(())
}

/// Parameters of one remaining-alternatives row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub model: MixtureModel,
    pub xi: f64,
    pub m: usize,
}

/// The eight published rows.
pub fn table1_rows() -> Vec<Table1Row> {
    TABLE1
        .iter()
        .map(|r| Table1Row {
            model: MixtureModel {
                family: r.family,
                epsilon: r.epsilon,
                mu: r.mu,
            },
            xi: r.xi,
            m: r.m,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Outcome {
    pub row: Table1Row,
    pub deletions: usize,
    /// `ε m`.
    pub true_alternatives: f64,
    /// `None` when ξ ≤ ε, where the approximation does not apply.
    pub theoretical: Option<f64>,
    pub simulated: MetricSummary,
    pub retained_alternatives: Vec<usize>,
}

/// Retained alternatives after the fixed-length filter, theory versus simulation.
///
/// Each replication holds exactly `round(ε m)` alternatives, so the spread
/// reflects the filter alone and not the binomial count of alternatives.
pub fn run_table1(rows: &[Table1Row], reps: usize, master_seed: u64, jobs: usize) -> Result<Vec<Table1Outcome>> {
    check_reps(reps)?;
    for row in rows {
        row.model.validate()?;
        FilterConfig::fixed(row.xi).validate()?;
    }
    let counts = run_indexed(rows.len() * reps, jobs, |idx| {
        let (r, rep) = (idx / reps, idx % reps);
        let row = &rows[r];
        let seed = derive_seed(derive_seed(master_seed, r as u64), rep as u64);
        let alternatives = (row.model.epsilon * row.m as f64).round() as usize;
        let sample = sample_pvalues_with_count(&row.model, row.m, alternatives, seed)?;
        let filtered = fixed_length_filter(&sample, &FilterConfig::fixed(row.xi))?;
        Ok(filtered.retained_alternatives(sample.h.as_deref().expect("simulated samples are labelled")))
    })?;
    rows.iter()
        .enumerate()
        .map(|(r, row)| {
            let retained: Vec<usize> = counts[r * reps..(r + 1) * reps].to_vec();
            let values: Vec<f64> = retained.iter().map(|&c| c as f64).collect();
            let theoretical = if row.xi > row.model.epsilon {
                Some(theoretical_remaining(&row.model, row.xi, row.m, THEORY_GRID)?)
            } else {
                None
            };
            Ok(Table1Outcome {
                row: *row,
                deletions: deletion_count(row.xi, row.m),
                true_alternatives: row.model.epsilon * row.m as f64,
                theoretical,
                simulated: MetricSummary::of(&values),
                retained_alternatives: retained,
            })
        })
        .collect()
}

/// Configuration of a replicated pipeline experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: MixtureModel,
    pub m: usize,
    pub xi: f64,
    pub alpha: f64,
    pub reps: usize,
    pub master_seed: u64,
    /// Bandwidth rule, −log transform and grid of the mode estimate.
    pub mode: ModeOptions,
    pub filter_kind: FilterKind,
}

impl ExperimentConfig {
    /// The published Cauchy setting at shift `mu`, with ξ = 0.15.
    pub fn table2(mu: f64) -> Self {
        ExperimentConfig {
            model: MixtureModel {
                family: Family::Cauchy,
                epsilon: reference::TABLE2_EPSILON,
                mu,
            },
            m: reference::TABLE2_M,
            xi: 0.15,
            alpha: reference::TABLE2_ALPHA,
            reps: reference::TABLE2_REPS,
            master_seed: 1,
            mode: ModeOptions::default(),
            filter_kind: FilterKind::Fixed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        check_reps(self.reps)?;
        FilterConfig::fixed(self.xi).validate()?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain("alpha", self.alpha, "(0, 1)"));
        }
        if self.m < 2 {
            return Err(Error::Config("m must be at least 2".into()));
        }
        Ok(())
    }
}

/// Metrics of one pipeline replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table2Record {
    pub rep: usize,
    pub theta_hat: f64,
    pub delta_hat: f64,
    pub eps_hat: f64,
    pub fdr_hat: f64,
    pub fdp: f64,
    /// True rejections over `ε m`.
    pub tpp: f64,
    pub r: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Outcome {
    pub config: ExperimentConfig,
    /// Closed-form mode of the alternative p-values.
    pub theta: f64,
    pub records: Vec<Table2Record>,
    pub summary: ExperimentSummary,
}

/// One replication of sample, filter, mode, region and scoring.
pub fn table2_replication(config: &ExperimentConfig, rep: usize) -> Result<Table2Record> {
    let seed = derive_seed(config.master_seed, rep as u64);
    let sample = sample_pvalues(&config.model, config.m, seed)?;
    let filter = FilterConfig {
        xi: config.xi,
        kind: config.filter_kind,
        direction: Direction::Ascending,
        seed: derive_seed(seed, 1),
    };
    let filtered = apply_filter(&sample, &filter)?;
    let mode = estimate_mode(&filtered.retained_values(), &config.mode)?;
    let report = select_delta(&sample.p, mode.theta_hat, config.xi, config.alpha)?;
    let counts = evaluate(
        &report.rejected,
        sample.h.as_deref(),
        Some(config.model.epsilon * config.m as f64),
    )?;
    Ok(Table2Record {
        rep,
        theta_hat: mode.theta_hat,
        delta_hat: report.delta_hat,
        eps_hat: report.epsilon_hat,
        fdr_hat: report.fdr_hat,
        fdp: counts.fdp,
        tpp: counts.tpp,
        r: report.r,
    })
}

fn summarize_records(records: &[Table2Record]) -> ExperimentSummary {
    let column = |f: fn(&Table2Record) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let metrics: [(&str, fn(&Table2Record) -> f64); 7] = [
        ("theta_hat", |r| r.theta_hat),
        ("delta_hat", |r| r.delta_hat),
        ("eps_hat", |r| r.eps_hat),
        ("fdr_hat", |r| r.fdr_hat),
        ("fdp", |r| r.fdp),
        ("tpp", |r| r.tpp),
        ("rejections", |r| r.r as f64),
    ];
    ExperimentSummary {
        reps: records.len(),
        metrics: metrics
            .iter()
            .map(|&(name, f)| (name.to_string(), MetricSummary::of(&column(f))))
            .collect(),
    }
}

/// Replicated pipeline on the Cauchy model.
pub fn run_table2(config: &ExperimentConfig, jobs: usize) -> Result<Table2Outcome> {
    config.validate()?;
    if config.model.family != Family::Cauchy {
        return Err(Error::Config("the pipeline experiment needs the Cauchy family".into()));
    }
    let records = run_indexed(config.reps, jobs, |rep| table2_replication(config, rep))?;
    Ok(Table2Outcome {
        config: config.clone(),
        theta: cauchy_mode(config.model.mu),
        summary: summarize_records(&records),
        records,
    })
}

/// Grid of `ε_m = m^{−γ}`, `μ_m = m^r` Cauchy models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConfig {
    pub gamma: f64,
    pub r: f64,
    pub m_grid: Vec<usize>,
    pub reps: usize,
    pub xi: f64,
    pub filter_kind: FilterKind,
    pub master_seed: u64,
}

impl AsymptoticConfig {
    pub fn new(gamma: f64, r: f64) -> Self {
        AsymptoticConfig {
            gamma,
            r,
            m_grid: vec![2_000, 20_000, 200_000],
            reps: 50,
            xi: 0.05,
            filter_kind: FilterKind::Fixed,
            master_seed: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain("gamma", self.gamma, "(0, inf)"));
        }
        if !self.r.is_finite() {
            return Err(Error::domain("r", self.r, "finite"));
        }
        if self.m_grid.is_empty() || self.m_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("m grid must be non-empty and strictly increasing".into()));
        }
        check_reps(self.reps)?;
        FilterConfig::fixed(self.xi).validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPoint {
    pub m: usize,
    pub epsilon: f64,
    pub mu: f64,
    /// `ε_m m < 1`: fewer than one alternative expected.
    pub vacuous: bool,
    /// Deleted alternatives over `ε_m m`; `None` when vacuous.
    pub fe_fraction: Option<MetricSummary>,
}

/// Fraction of alternatives the filter deletes, along the `m` grid.
pub fn run_asymptotic(config: &AsymptoticConfig, jobs: usize) -> Result<Vec<AsymptoticPoint>> {
    config.validate()?;
    let mut points = Vec::with_capacity(config.m_grid.len());
    for (g, &m) in config.m_grid.iter().enumerate() {
        let mf = m as f64;
        let epsilon = mf.powf(-config.gamma);
        let mu = mf.powf(config.r);
        let expected = epsilon * mf;
        if expected < 1.0 {
            points.push(AsymptoticPoint { m, epsilon, mu, vacuous: true, fe_fraction: None });
            continue;
        }
        let model = MixtureModel::cauchy(epsilon, mu)?;
        let grid_seed = derive_seed(config.master_seed, g as u64);
        let fractions = run_indexed(config.reps, jobs, |rep| {
            let seed = derive_seed(grid_seed, rep as u64);
            let sample = sample_pvalues(&model, m, seed)?;
            let filter = FilterConfig {
                xi: config.xi,
                kind: config.filter_kind,
                direction: Direction::Ascending,
                seed: derive_seed(seed, 1),
            };
            let filtered = apply_filter(&sample, &filter)?;
            let labels = sample.h.as_deref().expect("simulated samples are labelled");
            Ok(filtered.deleted_alternatives(labels) as f64 / expected)
        })?;
        points.push(AsymptoticPoint {
            m,
            epsilon,
            mu,
            vacuous: false,
            fe_fraction: Some(MetricSummary::of(&fractions)),
        });
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeConvergenceConfig {
    pub model: MixtureModel,
    pub xi: f64,
    pub m_grid: Vec<usize>,
    pub reps: usize,
    pub master_seed: u64,
    pub mode: ModeOptions,
}

impl ModeConvergenceConfig {
    pub fn new(model: MixtureModel) -> Self {
        ModeConvergenceConfig {
            model,
            xi: 0.15,
            m_grid: vec![500, 2_000, 8_000],
            reps: 50,
            master_seed: 1,
            mode: ModeOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeConvergencePoint {
    pub m: usize,
    pub median_abs_error: f64,
    pub reps: usize,
    /// No alternatives in the model, so there is no mode to converge to.
    pub no_signal: bool,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median `|θ̂ − θ|` of the filtered mode estimate along the `m` grid.
pub fn run_mode_convergence(config: &ModeConvergenceConfig, jobs: usize) -> Result<Vec<ModeConvergencePoint>> {
    config.model.validate()?;
    check_reps(config.reps)?;
    FilterConfig::fixed(config.xi).validate()?;
    if config.model.family != Family::Cauchy {
        return Err(Error::Config("mode convergence needs the Cauchy family".into()));
    }
    let theta = cauchy_mode(config.model.mu);
    config
        .m_grid
        .iter()
        .enumerate()
        .map(|(g, &m)| {
            let grid_seed = derive_seed(config.master_seed, g as u64);
            let mut errors = run_indexed(config.reps, jobs, |rep| {
                let sample = sample_pvalues(&config.model, m, derive_seed(grid_seed, rep as u64))?;
                let filtered = fixed_length_filter(&sample, &FilterConfig::fixed(config.xi))?;
                let mode = estimate_mode(&filtered.retained_values(), &config.mode)?;
                Ok((mode.theta_hat - theta).abs())
            })?;
            Ok(ModeConvergencePoint {
                m,
                median_abs_error: median(&mut errors),
                reps: config.reps,
                no_signal: config.model.epsilon == 0.0,
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn write_summary_block<W: Write>(summary: &ExperimentSummary, out: &mut W) -> Result<()> {
    writeln!(out)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "mean", "se", "n"])?;
    for (name, s) in &summary.metrics {
        w.write_record([name.clone(), s.mean.to_string(), opt(s.se), s.n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `rep,theta_hat,delta_hat,eps_hat,fdr_hat,fdp,tpp` rows, then a blank
/// line and a `metric,mean,se,n` block.
pub fn write_table2_csv<W: Write>(outcome: &Table2Outcome, mut out: W) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["rep", "theta_hat", "delta_hat", "eps_hat", "fdr_hat", "fdp", "tpp"])?;
        for r in &outcome.records {
            w.write_record([
                r.rep.to_string(),
                r.theta_hat.to_string(),
                r.delta_hat.to_string(),
                r.eps_hat.to_string(),
                r.fdr_hat.to_string(),
                r.fdp.to_string(),
                r.tpp.to_string(),
            ])?;
        }
        w.flush()?;
    }
    write_summary_block(&outcome.summary, &mut out)
}

/// One row per configuration with theory and simulated mean and SE.
pub fn write_table1_csv<W: Write>(outcomes: &[Table1Outcome], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family", "epsilon", "xi", "mu", "m", "deletions", "true", "theoretical", "simulated_mean", "simulated_se", "reps",
    ])?;
    for o in outcomes {
        let family = match o.row.model.family {
            Family::Gaussian => "gaussian".to_string(),
            Family::Cauchy => "cauchy".to_string(),
            Family::StudentT { df } => format!("student_t({df})"),
        };
        w.write_record([
            family,
            o.row.model.epsilon.to_string(),
            o.row.xi.to_string(),
            o.row.model.mu.to_string(),
            o.row.m.to_string(),
            o.deletions.to_string(),
            o.true_alternatives.to_string(),
            opt(o.theoretical),
            o.simulated.mean.to_string(),
            opt(o.simulated.se),
            o.simulated.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_asymptotic_csv<W: Write>(points: &[AsymptoticPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "epsilon", "mu", "vacuous", "fe_fraction_mean", "fe_fraction_se", "reps"])?;
    for p in points {
        w.write_record([
            p.m.to_string(),
            p.epsilon.to_string(),
            p.mu.to_string(),
            p.vacuous.to_string(),
            opt(p.fe_fraction.map(|s| s.mean)),
            opt(p.fe_fraction.and_then(|s| s.se)),
            p.fe_fraction.map_or(0, |s| s.n).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mode_convergence_csv<W: Write>(points: &[ModeConvergencePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "median_abs_error", "reps", "no_signal"])?;
    for p in points {
        w.write_record([
            p.m.to_string(),
            p.median_abs_error.to_string(),
            p.reps.to_string(),
            p.no_signal.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
