//! Interval rejection regions around an estimated mode, their estimated
//! FDR/pFDR, the proportion estimators, and the Benjamini–Hochberg baseline.
//!
//! A region is described by its centre and its total width `δ`, so it
//! covers `[centre − δ/2, centre + δ/2]` clipped to `[0, 1]`. The width is
//! also the null mass of an unclipped region, which is what the FDR
//! estimator and the `1 − (1 − δ)^m` pFDR correction use.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectionRegion {
    pub center: f64,
    /// Total width δ.
    pub width: f64,
}

impl RejectionRegion {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        if !(width >= 0.0) {
            return Err(Error::domain("width", width, "[0, inf)"));
        }
        if !(0.0..=1.0).contains(&center) {
            return Err(Error::domain("center", center, "[0, 1]"));
        }
        Ok(RejectionRegion { center, width })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }

    pub fn lo(&self) -> f64 {
        (self.center - self.half_width()).max(0.0)
    }

    pub fn hi(&self) -> f64 {
        (self.center + self.half_width()).min(1.0)
    }

    pub fn contains(&self, p: f64) -> bool {
        (p - self.center).abs() <= self.half_width()
    }
}

/// Number of p-values inside the closed region.
pub fn count_rejections(pvals: &[f64], region: &RejectionRegion) -> usize {
    pvals.iter().filter(|&&p| region.contains(p)).count()
}

/// Window estimator of the alternative proportion.
///
/// `W` counts p-values farther than `ξ/2` from `theta`; under uniform nulls
/// `W/(1 − ξ)` estimates the number of nulls, so `ε̂ = 1 − W/((1 − ξ)m)`,
/// clamped to `[0, 1]`. Returns `(ε̂, W)`.
pub fn estimate_epsilon_window(pvals: &[f64], theta: f64, xi: f64) -> Result<(f64, usize)> {
    check_open_unit("xi", xi)?;
    if pvals.is_empty() {
        return Err(Error::Estimation("no p-values".into()));
    }
    let w = pvals.iter().filter(|&&p| (p - theta).abs() > xi / 2.0).count();
    let eps = 1.0 - w as f64 / ((1.0 - xi) * pvals.len() as f64);
    Ok((eps.clamp(0.0, 1.0), w))
}

/// Storey's estimator `ε̂ = 1 − #{p > λ}/((1 − λ)m)`, clamped to `[0, 1]`.
pub fn storey_epsilon(pvals: &[f64], lambda: f64) -> Result<f64> {
    check_open_unit("lambda", lambda)?;
    if pvals.is_empty() {
        return Err(Error::Estimation("no p-values".into()));
    }
    let w = pvals.iter().filter(|&&p| p > lambda).count();
    let eps = 1.0 - w as f64 / ((1.0 - lambda) * pvals.len() as f64);
    Ok(eps.clamp(0.0, 1.0))
}

fn fdr_from_counts(w: usize, width: f64, xi: f64, r: usize) -> f64 {
    w as f64 * width / ((1.0 - xi) * r.max(1) as f64)
}

/// `1 − (1 − δ)^m`, the estimated probability of at least one rejection.
pub fn pfdr_correction(width: f64, m: usize) -> f64 {
    if width >= 1.0 {
        1.0
    } else {
        // ln_1p keeps precision when δ is small and m large.
        -((m as f64) * (-width).ln_1p()).exp_m1()
    }
}

/// Estimated FDR of the region `(theta, width)`: `W δ / ((1 − ξ) (R ∨ 1))`.
pub fn fdr_hat(pvals: &[f64], theta: f64, width: f64, xi: f64) -> Result<f64> {
    let region = RejectionRegion::new(theta, width)?;
    let (_, w) = estimate_epsilon_window(pvals, theta, xi)?;
    Ok(fdr_from_counts(w, width, xi, count_rejections(pvals, &region)))
}

/// Estimated pFDR: [`fdr_hat`] divided by `1 − (1 − δ)^m`.
///
/// `None` for a zero-width region, where the estimate is unbounded.
pub fn pfdr_hat(pvals: &[f64], theta: f64, width: f64, xi: f64) -> Result<Option<f64>> {
    let fdr = fdr_hat(pvals, theta, width, xi)?;
    Ok(pfdr_from_fdr(fdr, width, pvals.len()))
}

fn pfdr_from_fdr(fdr: f64, width: f64, m: usize) -> Option<f64> {
    (width > 0.0).then(|| fdr / pfdr_correction(width, m))
}

/// Result of the data-dependent region selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrReport {
    pub theta_hat: f64,
    pub xi: f64,
    pub alpha: f64,
    pub epsilon_hat: f64,
    /// Count of p-values outside the `ξ`-window around `theta_hat`.
    pub w: usize,
    /// Number of rejections.
    pub r: usize,
    pub fdr_hat: f64,
    /// `None` when nothing is rejected (zero width).
    pub pfdr_hat: Option<f64>,
    /// Selected total width δ̂.
    pub delta_hat: f64,
    /// Rejected sample indices, ascending.
    pub rejected: Vec<usize>,
}

impl FdrReport {
    pub fn region(&self) -> RejectionRegion {
        RejectionRegion {
            center: self.theta_hat,
            width: self.delta_hat,
        }
    }
}

/// Widest region around `theta_hat` whose estimated FDR stays at or below `alpha`.
///
/// Candidate widths are twice the observed distances to `theta_hat`. The
/// largest qualifying candidate wins; if none qualifies nothing is rejected.
pub fn select_delta(pvals: &[f64], theta_hat: f64, xi: f64, alpha: f64) -> Result<FdrReport> {
    check_open_unit("alpha", alpha)?;
    let (epsilon_hat, w) = estimate_epsilon_window(pvals, theta_hat, xi)?;
    let m = pvals.len();

    let dist: Vec<f64> = pvals.iter().map(|&p| (p - theta_hat).abs()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));

    // Walk groups of equal distance; R is the count up to the end of a group.
    let mut best: Option<(usize, f64)> = None;
    let mut k = 0;
    while k < m {
        let d = dist[order[k]];
        let mut end = k + 1;
        while end < m && dist[order[end]] == d {
            end += 1;
        }
        let fdr = fdr_from_counts(w, 2.0 * d, xi, end);
        if fdr <= alpha {
            best = Some((end, fdr));
        }
        k = end;
    }

    let (r, fdr_hat, delta_hat) = match best {
        Some((r, fdr)) => (r, fdr, 2.0 * dist[order[r - 1]]),
        None => (0, 0.0, 0.0),
    };
    let mut rejected: Vec<usize> = order[..r].to_vec();
    rejected.sort_unstable();
    Ok(FdrReport {
        theta_hat,
        xi,
        alpha,
        epsilon_hat,
        w,
        r,
        fdr_hat,
        pfdr_hat: pfdr_from_fdr(fdr_hat, delta_hat, m),
        delta_hat,
        rejected,
    })
}

/// Benjamini–Hochberg step-up: rejects the `k` smallest p-values, `k` the
/// largest rank with `p_(k) ≤ kα/m`. Returns ascending indices.
pub fn bh_procedure(pvals: &[f64], alpha: f64) -> Result<Vec<usize>> {
    check_open_unit("alpha", alpha)?;
    let m = pvals.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| pvals[a].partial_cmp(&pvals[b]).unwrap_or(Ordering::Equal));
    let k = (1..=m)
        .rev()
        .find(|&k| pvals[order[k - 1]] <= k as f64 * alpha / m as f64)
        .unwrap_or(0);
    let mut rejected = order[..k].to_vec();
    rejected.sort_unstable();
    Ok(rejected)
}

/// Realised false and true rejections of a rejection set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub v: usize,
    pub s: usize,
    pub r: usize,
    pub fdp: f64,
    pub tpp: f64,
}

/// Scores `rejected` against the true labels.
///
/// TPP divides by `expected_alternatives` (`ε m` in simulations) when
/// given, otherwise by the realised number of alternatives.
pub fn evaluate(
    rejected: &[usize],
    labels: Option<&[bool]>,
    expected_alternatives: Option<f64>,
) -> Result<ConfusionCounts> {
    let labels =
        labels.ok_or_else(|| Error::Evaluation("ground-truth labels are required".into()))?;
    let mut s = 0;
    for &i in rejected {
        match labels.get(i) {
            Some(true) => s += 1,
            Some(false) => {}
            None => {
                return Err(Error::Evaluation(format!(
                    "rejected index {i} has no label ({} labels)",
                    labels.len()
                )))
            }
        }
    }
    let r = rejected.len();
    let v = r - s;
    let denom = expected_alternatives
        .unwrap_or_else(|| labels.iter().filter(|&&h| h).count() as f64);
    Ok(ConfusionCounts {
        v,
        s,
        r,
        fdp: v as f64 / r.max(1) as f64,
        tpp: if denom > 0.0 { s as f64 / denom } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        let p = [0.1, 0.2, 0.3];
        assert_eq!(count_rejections(&p, &RejectionRegion::new(0.25, 0.0).unwrap()), 0);
        assert_eq!(count_rejections(&p, &RejectionRegion::new(0.2, 0.1).unwrap()), 1);
        // Width 2·max(c, 1 − c) covers the whole unit interval.
        assert_eq!(count_rejections(&p, &RejectionRegion::new(0.9, 1.8).unwrap()), 3);
        let r = RejectionRegion::new(0.05, 0.2).unwrap();
        assert_eq!((r.lo(), r.hi()), (0.0, 0.15000000000000002));
        assert!(RejectionRegion::new(0.5, -0.1).is_err());
    }

    #[test]
    fn window_epsilon_examples() {
        let p = [0.48, 0.5, 0.52];
        assert_eq!(estimate_epsilon_window(&p, 0.5, 0.2).unwrap(), (1.0, 0));
        assert!(estimate_epsilon_window(&p, 0.5, 1.0).is_err());
        // Every value outside the window drives ε̂ below zero, then clamps.
        let far = [0.01, 0.99, 0.98];
        assert_eq!(estimate_epsilon_window(&far, 0.5, 0.5).unwrap(), (0.0, 3));
    }

    #[test]
    fn storey_examples() {
        assert_eq!(storey_epsilon(&[0.1, 0.2, 0.4], 0.5).unwrap(), 1.0);
        assert_eq!(storey_epsilon(&[0.1, 0.6, 0.7, 0.8, 0.9], 0.5).unwrap(), 0.0);
        assert!(storey_epsilon(&[0.1], 1.0).is_err());
    }

    #[test]
    fn fdr_hat_examples() {
        // 100 p-values, W/(1 − ξ) = 100, R = 5 inside a width-0.01 region.
        let xi = 0.5;
        let mut p: Vec<f64> = vec![0.301, 0.302, 0.3, 0.298, 0.299];
        p.extend((0..50).map(|i| 0.8 + i as f64 * 0.003));
        p.extend((0..45).map(|i| 0.5 + i as f64 * 0.001));
        assert_eq!(p.len(), 100);
        let (_, w) = estimate_epsilon_window(&p, 0.3, xi).unwrap();
        assert_eq!(w, 50);
        let v = fdr_hat(&p, 0.3, 0.01, xi).unwrap();
        assert!((v - 0.2).abs() < 1e-12, "{v}");

        let pf = pfdr_hat(&p, 0.3, 0.01, xi).unwrap().unwrap();
        assert!((pf - 0.2 / (1.0 - 0.99f64.powi(100))).abs() < 1e-12);
        assert!((pf - 0.3155).abs() < 1e-4);

        // R = 0: the denominator is 1.
        let v0 = fdr_hat(&p, 0.05, 0.01, xi).unwrap();
        let (_, w0) = estimate_epsilon_window(&p, 0.05, xi).unwrap();
        assert!((v0 - w0 as f64 * 0.01 / 0.5).abs() < 1e-12);
        assert_eq!(pfdr_hat(&p, 0.3, 0.0, xi).unwrap(), None);
    }

    #[test]
    fn pfdr_correction_limits() {
        assert!((pfdr_correction(0.01, 100) - (1.0 - 0.99f64.powi(100))).abs() < 1e-14);
        assert!((pfdr_correction(0.01, 100_000) - 1.0).abs() < 1e-12);
        assert_eq!(pfdr_correction(1.0, 10), 1.0);
        assert!((pfdr_correction(0.999_999, 3) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn select_all_and_none() {
        let p = [0.1, 0.35, 0.4, 0.45, 0.9];
        let all = select_delta(&p, 0.4, 0.5, 0.999).unwrap();
        assert_eq!(all.r, 5);
        assert_eq!(all.rejected, vec![0, 1, 2, 3, 4]);
        assert!((all.delta_hat - 2.0 * 0.5).abs() < 1e-15);

        let far: Vec<f64> = (0..100).map(|i| 0.005 + i as f64 * 0.0099).collect();
        let none = select_delta(&far, 0.5004, 0.2, 0.001).unwrap();
        assert_eq!(none.r, 0);
        assert!(none.rejected.is_empty());
        assert_eq!(none.delta_hat, 0.0);
        assert_eq!(none.pfdr_hat, None);
    }

    #[test]
    fn report_invariants() {
        let p: Vec<f64> = (1..200)
            .map(|i| {
                let x = i as f64 / 200.0;
                if i % 3 == 0 {
                    0.3 + (x - 0.5) * 0.02
                } else {
                    x
                }
            })
            .collect();
        let rep = select_delta(&p, 0.3, 0.3, 0.2).unwrap();
        assert_eq!(rep.r, rep.rejected.len());
        assert!(rep.r > 0);
        assert!(rep.fdr_hat <= 0.2);
        assert!(rep.fdr_hat <= rep.pfdr_hat.unwrap());
        assert_eq!(count_rejections(&p, &rep.region()), rep.r);
        for (i, &v) in p.iter().enumerate() {
            assert_eq!(rep.region().contains(v), rep.rejected.binary_search(&i).is_ok());
        }
    }

    #[test]
    fn bh_examples() {
        assert_eq!(bh_procedure(&[0.01, 0.02, 0.04, 0.5], 0.05).unwrap(), vec![0, 1]);
        assert!(bh_procedure(&[0.99; 10], 0.05).unwrap().is_empty());
        assert!(bh_procedure(&[0.03, 0.5], 0.05).unwrap().is_empty());
        assert_eq!(bh_procedure(&[0.02, 0.5], 0.05).unwrap(), vec![0]);
        assert_eq!(bh_procedure(&[0.5, 0.001], 0.05).unwrap(), vec![1]);
        assert!(bh_procedure(&[0.1], 0.0).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let labels = [false, true, true, false];
        let c = evaluate(&[], Some(&labels), None).unwrap();
        assert_eq!((c.v, c.s, c.r, c.fdp), (0, 0, 0, 0.0));
        let c = evaluate(&[0, 1, 2], Some(&labels), Some(4.0)).unwrap();
        assert_eq!((c.v, c.s, c.r), (1, 2, 3));
        assert!((c.fdp - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.tpp, 0.5);
        let nulls = [false; 5];
        let c = evaluate(&[0, 1, 2, 3, 4], Some(&nulls), None).unwrap();
        assert_eq!(c.fdp, 1.0);
        assert_eq!(c.tpp, 0.0);
        assert!(evaluate(&[0], None, None).is_err());
        assert!(evaluate(&[9], Some(&labels), None).is_err());
    }
}
