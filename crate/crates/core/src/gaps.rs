//! Gap statistics of the ordered p-values.
//!
//! Under the null the raw gaps `G_j = p_(j) − p_(j−1)` follow Beta(1, m)
//! with mean `1/(m+1)`, and the weighted gaps `G†_j = p†_j − p†_{j−1}` of
//! the running means `p†_j` have mean `1/(2(m+1))` for `j ≥ 2`. A cluster of
//! alternatives shows up as a stretch of weighted gaps well below that
//! level.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn sorted(pvals: &[f64]) -> Vec<f64> {
    let mut s = pvals.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Null expectation `1/(2(m+1))` of a weighted gap.
pub fn weighted_gap_expectation(m: usize) -> f64 {
    1.0 / (2.0 * (m as f64 + 1.0))
}

/// `G_j = p_(j) − p_(j−1)` for `j = 1..m`, with `p_(0) = 0`.
pub fn raw_gaps(pvals: &[f64]) -> Vec<f64> {
    let s = sorted(pvals);
    let mut prev = 0.0;
    s.iter()
        .map(|&v| {
            let g = v - prev;
            prev = v;
            g
        })
        .collect()
}

/// Running means `p†_j = (1/j) Σ_{i≤j} p_(i)`.
pub fn smoothed_pvalues(pvals: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    sorted(pvals)
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            sum += v;
            sum / (i + 1) as f64
        })
        .collect()
}

/// `G†_j = p†_j − p†_{j−1}` with `p†_0 = 0`.
pub fn weighted_gaps(pvals: &[f64]) -> Result<Vec<f64>> {
    if pvals.len() < 2 {
        return Err(Error::Config("weighted gaps need at least 2 p-values".into()));
    }
    let smooth = smoothed_pvalues(pvals);
    let mut prev = 0.0;
    Ok(smooth
        .iter()
        .map(|&v| {
            let g = v - prev;
            prev = v;
            g
        })
        .collect())
}

fn check_window(m: usize, k: usize) -> Result<()> {
    if k < 1 || 2 * k >= m {
        return Err(Error::Config(format!(
            "window k = {k} must satisfy 1 <= k < m/2 (m = {m})"
        )));
    }
    Ok(())
}

/// Default window `⌈√m⌉`.
pub fn default_window(m: usize) -> usize {
    (m as f64).sqrt().ceil() as usize
}

/// Signed upper discrepancies: mean of `G†_j..G†_{j+k−1}` minus its null level.
///
/// Index `s` holds the window starting at `j = s + 1`; windows that run
/// past `m` are absent.
fn signed_upper(g_dagger: &[f64], k: usize) -> Vec<f64> {
    let m = g_dagger.len();
    let e0 = weighted_gap_expectation(m);
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0.0);
    for &g in g_dagger {
        prefix.push(prefix.last().unwrap() + g);
    }
    (0..=m - k)
        .map(|s| (prefix[s + k] - prefix[s]) / k as f64 - e0)
        .collect()
}

/// Lower and upper local discrepancies `L_j`, `U_j` for `j = 1..m`.
///
/// `L_j` averages `G†` over `j−k..j−1`, `U_j` over `j..j+k−1`; both are
/// absolute deviations from `1/(2(m+1))`. Positions whose window leaves
/// `1..m` are `None`.
pub fn local_discrepancies(
    g_dagger: &[f64],
    k: usize,
) -> Result<(Vec<Option<f64>>, Vec<Option<f64>>)> {
    let m = g_dagger.len();
    check_window(m, k)?;
    let up = signed_upper(g_dagger, k);
    let mut lower = vec![None; m];
    let mut upper = vec![None; m];
    for (s, &d) in up.iter().enumerate() {
        // Window starting at j = s + 1 is the upper window of j and the lower window of j + k.
        upper[s] = Some(d.abs());
        if s + k < m {
            lower[s + k] = Some(d.abs());
        }
    }
    Ok((lower, upper))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub g: Vec<f64>,
    pub g_dagger: Vec<f64>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    pub k: usize,
}

pub fn gap_profile(pvals: &[f64], k: usize) -> Result<GapProfile> {
    let g_dagger = weighted_gaps(pvals)?;
    let (lower, upper) = local_discrepancies(&g_dagger, k)?;
    Ok(GapProfile {
        g: raw_gaps(pvals),
        g_dagger,
        lower,
        upper,
        k,
    })
}

/// A candidate centre of an alternative cluster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCenter {
    pub p: f64,
    /// 1-based start of the upper window that produced the candidate.
    pub j: usize,
    /// How far the window mean falls below the null level, in units of it.
    pub depth: f64,
}

/// Clusters located as local minima of the upper window mean of `G†`.
///
/// A start position qualifies when its window mean sits more than
/// `threshold · 1/(2(m+1))` below the null level and no deeper window
/// starts within `k` positions of it. Each candidate maps to the order
/// statistic in the middle of its window. Deepest first.
pub fn detect_centers(pvals: &[f64], k: usize, threshold: f64) -> Result<Vec<GapCenter>> {
    let s = sorted(pvals);
    let m = s.len();
    check_window(m, k)?;
    if !(threshold >= 0.0) {
        return Err(Error::domain("threshold", threshold, "[0, inf)"));
    }
    let g_dagger = weighted_gaps(&s)?;
    let up = signed_upper(&g_dagger, k);
    let e0 = weighted_gap_expectation(m);

    let mut order: Vec<usize> = (0..up.len()).collect();
    order.sort_by(|&a, &b| up[a].total_cmp(&up[b]).then(a.cmp(&b)));
    let mut visited = vec![false; up.len()];
    let mut centers = Vec::new();
    for start in order {
        if up[start] >= -threshold * e0 {
            break;
        }
        let lo = start.saturating_sub(k);
        let hi = (start + k + 1).min(up.len());
        if !visited[lo..hi].iter().any(|&v| v) {
            centers.push(GapCenter {
                p: s[start + k / 2],
                j: start + 1,
                depth: -up[start] / e0,
            });
        }
        visited[start] = true;
    }
    Ok(centers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothed_examples() {
        assert_eq!(smoothed_pvalues(&[0.4, 0.2]), vec![0.2, 0.30000000000000004]);
        assert_eq!(smoothed_pvalues(&[0.7])[0], 0.7);
    }

    #[test]
    fn weighted_gap_examples() {
        let p = [0.9, 0.2, 0.4, 0.65];
        let g = weighted_gaps(&p).unwrap();
        assert_eq!(g[0], 0.2);
        assert!(weighted_gaps(&[0.3]).is_err());
    }

    #[test]
    fn weighted_sum_expansion() {
        // G†_j = Σ_{l=2..j} (l − 1) G_l / (j (j − 1)) for j ≥ 2.
        let p: Vec<f64> = (0..300).map(|i| ((i * 7919) % 1000) as f64 / 1000.0 + 5e-4).collect();
        let g = raw_gaps(&p);
        let gd = weighted_gaps(&p).unwrap();
        let mut acc = 0.0;
        for j in 2..=p.len() {
            acc += (j - 1) as f64 * g[j - 1];
            let expansion = acc / (j * (j - 1)) as f64;
            assert!((expansion - gd[j - 1]).abs() < 1e-12, "j={j}");
        }
    }

    #[test]
    fn telescoping_sums() {
        let p = [0.31, 0.05, 0.77, 0.52, 0.18];
        let g = raw_gaps(&p);
        let s = sorted(&p);
        let mut acc = 0.0;
        for (j, &gj) in g.iter().enumerate() {
            acc += gj;
            assert!((acc - s[j]).abs() < 1e-15);
        }
        let gd = weighted_gaps(&p).unwrap();
        let smooth = smoothed_pvalues(&p);
        let mut acc = 0.0;
        for (j, &gj) in gd.iter().enumerate() {
            acc += gj;
            assert!((acc - smooth[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn discrepancy_window_rules() {
        let m = 20;
        let flat = vec![weighted_gap_expectation(m); m];
        let (l, u) = local_discrepancies(&flat, 3).unwrap();
        assert!(l[..3].iter().all(Option::is_none));
        assert!(u[m - 2..].iter().all(Option::is_none));
        assert!(l[3..].iter().all(|v| v.unwrap().abs() < 1e-15));
        assert!(u[..m - 2].iter().all(|v| v.unwrap().abs() < 1e-15));
        assert!(local_discrepancies(&flat, 0).is_err());
        assert!(local_discrepancies(&flat, 10).is_err());
    }

    #[test]
    fn window_of_one() {
        let gd = [0.01, 0.07, 0.02, 0.05, 0.03, 0.04];
        let e0 = weighted_gap_expectation(gd.len());
        let (l, u) = local_discrepancies(&gd, 1).unwrap();
        for j in 1..gd.len() {
            assert!((l[j].unwrap() - (gd[j - 1] - e0).abs()).abs() < 1e-15);
        }
        for j in 0..gd.len() {
            assert!((u[j].unwrap() - (gd[j] - e0).abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn detect_is_permutation_invariant() {
        let mut p: Vec<f64> = (0..400).map(|i| (i as f64 + 0.5) / 400.0).collect();
        p.extend((0..150).map(|i| 0.3 + i as f64 * 1e-5));
        let a = detect_centers(&p, 20, 0.5).unwrap();
        p.reverse();
        let b = detect_centers(&p, 20, 0.5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 1);
        assert!((a[0].p - 0.3).abs() < 0.01);
    }
}
