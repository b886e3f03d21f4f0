//! Filter, locate the alternative mode, and pick a rejection region.

use serde::{Deserialize, Serialize};

use crate::density::{default_schedule, estimate_mode, stabilized_xi, ModeEstimate, ModeOptions, StabilizedXi, DEFAULT_STABILITY};
use crate::error::Result;
use crate::fdr::{evaluate, select_delta, ConfusionCounts, FdrReport};
use crate::filters::{apply_filter, Direction, FilterConfig, FilterKind};
use crate::gaps::{detect_centers, GapCenter};
use crate::mixtures::LabeledPValues;

/// How the retained fraction is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum XiChoice {
    Fixed { xi: f64 },
    /// Lower ξ along `schedule` until the mode moves by less than `c`.
    Stabilized { c: f64, schedule: Vec<f64> },
}

impl XiChoice {
    pub fn stabilized() -> Self {
        XiChoice::Stabilized {
            c: DEFAULT_STABILITY,
            schedule: default_schedule(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub xi: XiChoice,
    pub alpha: f64,
    pub mode: ModeOptions,
    pub filter: FilterKind,
    pub direction: Direction,
    /// Seeds the random filter.
    pub seed: u64,
}

impl AnalysisConfig {
    pub fn new(xi: f64, alpha: f64) -> Self {
        AnalysisConfig {
            xi: XiChoice::Fixed { xi },
            alpha,
            mode: ModeOptions::default(),
            filter: FilterKind::Fixed,
            direction: Direction::Ascending,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub xi: f64,
    pub retained: usize,
    pub mode: ModeEstimate,
    pub stabilization: Option<StabilizedXi>,
    pub report: FdrReport,
    /// Present when the sample carries labels.
    pub confusion: Option<ConfusionCounts>,
}

/// Runs filter, mode estimate and region selection on one sample.
///
/// The region is chosen on the full sample; the filter only feeds the mode
/// estimate. A stabilized ξ always uses the fixed-length filter.
pub fn analyze(sample: &LabeledPValues, config: &AnalysisConfig) -> Result<Analysis> {
    let (xi, mode, retained, stabilization) = match &config.xi {
        XiChoice::Fixed { xi } => {
            let filter = FilterConfig {
                xi: *xi,
                kind: config.filter,
                direction: config.direction,
                seed: config.seed,
            };
            let filtered = apply_filter(sample, &filter)?;
            let mode = estimate_mode(&filtered.retained_values(), &config.mode)?;
            (*xi, mode, filtered.retained.len(), None)
        }
        XiChoice::Stabilized { c, schedule } => {
            let st = stabilized_xi(sample, *c, schedule, &config.mode)?;
            let retained = sample.len() - crate::filters::deletion_count(st.xi_hat, sample.len());
            (st.xi_hat, st.mode, retained, Some(st))
        }
    };
    let report = select_delta(&sample.p, mode.theta_hat, xi, config.alpha)?;
    let confusion = match &sample.h {
        Some(h) => Some(evaluate(&report.rejected, Some(h), None)?),
        None => None,
    };
    Ok(Analysis {
        xi,
        retained,
        mode,
        stabilization,
        report,
        confusion,
    })
}

/// One region per candidate centre found in the weighted gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterReport {
    pub center: GapCenter,
    pub report: FdrReport,
}

/// Feeds every gap-detected centre into [`select_delta`] independently.
///
/// No correction is made for the number of centres.
pub fn analyze_centers(
    pvals: &[f64],
    k: usize,
    threshold: f64,
    xi: f64,
    alpha: f64,
) -> Result<Vec<CenterReport>> {
    detect_centers(pvals, k, threshold)?
        .into_iter()
        .map(|center| {
            Ok(CenterReport {
                center,
                report: select_delta(pvals, center.p, xi, alpha)?,
            })
        })
        .collect()
}
