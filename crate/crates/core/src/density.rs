//! Kernel density estimation on filtered p-values and sample-mode extraction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{fixed_length_filter, FilterConfig};
use crate::mixtures::LabeledPValues;

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 256;
pub const MIN_MODE_POINTS: usize = 10;
/// Default stability threshold for [`stabilized_xi`].
pub const DEFAULT_STABILITY: f64 = 0.005;

/// Kernel contributions beyond this many bandwidths are dropped on the fast path.
const KERNEL_REACH: f64 = 10.0;

fn gauss(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (2.0 * PI).sqrt()
}

/// Spread of a sample as used by the bandwidth rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    pub sd: f64,
    pub iqr: f64,
}

impl Dispersion {
    /// Sample standard deviation (n − 1) and the interpolated interquartile range.
    pub fn of(points: &[f64]) -> Self {
        let n = points.len();
        if n < 2 {
            return Dispersion { sd: 0.0, iqr: 0.0 };
        }
        let mean = points.iter().sum::<f64>() / n as f64;
        let var = points.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let mut sorted = points.to_vec();
        sorted.sort_by(f64::total_cmp);
        Dispersion {
            sd: var.sqrt(),
            iqr: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
        }
    }
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `h = 0.9 · min(sd, IQR/1.34) · n^{−1/5}`, or `n^{−1/5}` for a sample without spread.
///
/// The `n^{−1/5}` rate sends `h → 0` while `n h² ∝ n^{3/5}` diverges.
pub fn bandwidth_rule(n: usize, dispersion: &Dispersion) -> Result<f64> {
    if n < 2 {
        return Err(Error::Estimation(format!("bandwidth needs n >= 2, got {n}")));
    }
    let rate = (n as f64).powf(-0.2);
    let scale = dispersion.sd.min(dispersion.iqr / 1.34);
    if scale > 0.0 && scale.is_finite() {
        Ok(0.9 * scale * rate)
    } else {
        Ok(rate)
    }
}

/// How the estimator treats the edges of the support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    None,
    /// Mirror every point at 0 and at 1.
    Reflect,
}

/// Gaussian kernel density estimate at `t`.
pub fn kde_eval(points: &[f64], h: f64, t: f64, boundary: Boundary) -> f64 {
    let n = points.len() as f64;
    let sum: f64 = match boundary {
        Boundary::None => points.iter().map(|&p| gauss((t - p) / h)).sum(),
        Boundary::Reflect => points
            .iter()
            .map(|&p| gauss((t - p) / h) + gauss((t + p) / h) + gauss((t - 2.0 + p) / h))
            .sum(),
    };
    sum / (n * h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// [`bandwidth_rule`] applied to the points being smoothed.
    Rule,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeOptions {
    /// Smooth `−log p` instead of `p`.
    pub transform: bool,
    pub grid_resolution: usize,
    pub bandwidth: Bandwidth,
}

impl Default for ModeOptions {
    fn default() -> Self {
        ModeOptions {
            transform: false,
            grid_resolution: DEFAULT_GRID,
            bandwidth: Bandwidth::Rule,
        }
    }
}

impl ModeOptions {
    pub fn transformed() -> Self {
        ModeOptions {
            transform: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeEstimate {
    pub theta_hat: f64,
    /// Bandwidth on the axis the smoothing ran on.
    pub bandwidth: f64,
    pub transformed: bool,
    pub grid_resolution: usize,
}

/// Midpoint grid on (0, 1).
pub fn mode_grid(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|i| (i as f64 + 0.5) / resolution as f64)
        .collect()
}

fn pick_bandwidth(choice: Bandwidth, points: &[f64], floor: f64) -> Result<f64> {
    let h = match choice {
        Bandwidth::Rule => bandwidth_rule(points.len(), &Dispersion::of(points))?,
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed(h) => return Err(Error::domain("bandwidth", h, "(0, inf)")),
    };
    // A kernel narrower than the grid cannot be resolved by a grid argmax.
    Ok(h.max(floor))
}

/// Sum of kernel terms near `x` from an ascending list of centres.
fn windowed_sum(sorted: &[f64], h: f64, x: f64) -> f64 {
    let lo = sorted.partition_point(|&v| v < x - KERNEL_REACH * h);
    let hi = sorted.partition_point(|&v| v <= x + KERNEL_REACH * h);
    sorted[lo..hi].iter().map(|&v| gauss((x - v) / h)).sum()
}

fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.filter(|&(_, v)| v > 0.0 && v.is_finite()).map(|(i, _)| i)
}

/// Sample mode of the retained p-values: grid argmax of a Gaussian KDE.
///
/// On the p axis the estimate is reflected at 0 and 1. With `transform`
/// the points are mapped to `y = −log p`, smoothed there, and the p-axis
/// density `g(−log t)/t` is maximised instead.
pub fn estimate_mode(retained: &[f64], options: &ModeOptions) -> Result<ModeEstimate> {
    if retained.len() < MIN_MODE_POINTS {
        return Err(Error::Estimation(format!(
            "mode estimation needs at least {MIN_MODE_POINTS} p-values, got {}",
            retained.len()
        )));
    }
    if options.grid_resolution < MIN_GRID {
        return Err(Error::Config(format!(
            "grid resolution {} is below {MIN_GRID}",
            options.grid_resolution
        )));
    }
    if let Some(bad) = retained.iter().find(|&&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::domain("p", *bad, "(0, 1)"));
    }

    let grid = mode_grid(options.grid_resolution);
    let step = 1.0 / options.grid_resolution as f64;

    let (density, h): (Vec<f64>, f64) = if options.transform {
        let mut ys: Vec<f64> = retained.iter().map(|p| -p.ln()).collect();
        ys.sort_by(f64::total_cmp);
        let median_p = (-ys[ys.len() / 2]).exp();
        let h = pick_bandwidth(options.bandwidth, &ys, step / median_p)?;
        let d = grid
            .iter()
            .map(|&t| windowed_sum(&ys, h, -t.ln()) / t)
            .collect();
        (d, h)
    } else {
        let h = pick_bandwidth(options.bandwidth, retained, step)?;
        let mut images: Vec<f64> = retained
            .iter()
            .flat_map(|&p| [-p, p, 2.0 - p])
            .collect();
        images.sort_by(f64::total_cmp);
        let d = grid.iter().map(|&t| windowed_sum(&images, h, t)).collect();
        (d, h)
    };

    let i = argmax(&density).ok_or_else(|| {
        Error::Estimation("density vanished on the whole grid".into())
    })?;
    Ok(ModeEstimate {
        theta_hat: grid[i],
        bandwidth: h,
        transformed: options.transform,
        grid_resolution: options.grid_resolution,
    })
}

/// Outcome of the decreasing-ξ search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizedXi {
    pub xi_hat: f64,
    pub mode: ModeEstimate,
    /// False when the mode never settled along the schedule.
    pub stabilized: bool,
    /// `(ξ, θ̂)` for every schedule entry visited.
    pub path: Vec<(f64, f64)>,
}

/// The default ξ schedule: 0.5, 0.4, 0.3, 0.2, 0.1, 0.05.
pub fn default_schedule() -> Vec<f64> {
    vec![0.5, 0.4, 0.3, 0.2, 0.1, 0.05]
}

/// Lowers ξ along `schedule` until the filtered mode moves by less than `c`.
///
/// Returns the second-to-last ξ visited and its mode. If the mode never
/// settles, the last entry is returned with `stabilized = false`.
pub fn stabilized_xi(
    sample: &LabeledPValues,
    c: f64,
    schedule: &[f64],
    options: &ModeOptions,
) -> Result<StabilizedXi> {
    if schedule.first() != Some(&0.5) {
        return Err(Error::Config("xi schedule must start at 0.5".into()));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) || schedule.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::Config(
            "xi schedule must be strictly decreasing inside (0, 1)".into(),
        ));
    }
    if !(c > 0.0) {
        return Err(Error::domain("stability threshold", c, "(0, inf)"));
    }

    let mut path = Vec::with_capacity(schedule.len());
    let mut modes: Vec<ModeEstimate> = Vec::with_capacity(schedule.len());
    for &xi in schedule {
        let filtered = fixed_length_filter(sample, &FilterConfig::fixed(xi))?;
        let mode = estimate_mode(&filtered.retained_values(), options)?;
        path.push((xi, mode.theta_hat));
        if let Some(prev) = modes.last() {
            if (mode.theta_hat - prev.theta_hat).abs() < c {
                let k = modes.len() - 1;
                return Ok(StabilizedXi {
                    xi_hat: schedule[k],
                    mode: modes[k],
                    stabilized: true,
                    path,
                });
            }
        }
        modes.push(mode);
    }
    Ok(StabilizedXi {
        xi_hat: *schedule.last().expect("schedule starts at 0.5"),
        mode: *modes.last().expect("at least one entry"),
        stabilized: false,
        path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    #[test]
    fn bandwidth_examples() {
        let d = Dispersion {
            sd: 0.1,
            iqr: 0.08 * 1.34,
        };
        let h = bandwidth_rule(1000, &d).unwrap();
        assert!((h - 0.9 * 0.08 * 1000f64.powf(-0.2)).abs() < 1e-15);
        assert!((h - 0.0180856).abs() < 1e-6);

        let flat = Dispersion::of(&[0.4; 32]);
        assert_eq!(bandwidth_rule(32, &flat).unwrap(), 0.5);
        assert!(bandwidth_rule(1, &d).is_err());
    }

    #[test]
    fn bandwidth_rate() {
        let d = Dispersion { sd: 1.0, iqr: 1.34 };
        let mut prev_h = f64::MAX;
        let mut prev_nh2 = 0.0;
        for k in 1..8 {
            let n = 10usize.pow(k);
            let h = bandwidth_rule(n, &d).unwrap();
            assert!(h < prev_h);
            assert!(n as f64 * h * h > prev_nh2);
            prev_h = h;
            prev_nh2 = n as f64 * h * h;
        }
    }

    #[test]
    fn dispersion_matches_hand_values() {
        let d = Dispersion::of(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!((d.sd - 2.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.iqr, 2.0);
    }

    #[test]
    fn kde_single_point() {
        let v = kde_eval(&[0.5], 0.1, 0.5, Boundary::None);
        assert!((v - 1.0 / (0.1 * (2.0 * PI).sqrt())).abs() < 1e-12);
        assert!((v - 3.9894).abs() < 1e-4);
    }

    #[test]
    fn kde_peaks_at_common_point() {
        let pts = [0.37; 20];
        let grid = mode_grid(1000);
        let best = grid
            .iter()
            .copied()
            .max_by(|&a, &b| {
                kde_eval(&pts, 0.05, a, Boundary::None).total_cmp(&kde_eval(&pts, 0.05, b, Boundary::None))
            })
            .unwrap();
        assert!((best - 0.37).abs() <= 0.5e-3 + 1e-12);
    }

    #[test]
    fn reflected_kde_integrates_to_one() {
        let mut rng = seeded(4);
        let pts: Vec<f64> = (0..300).map(|_| rng.random::<f64>().powi(3)).collect();
        for &h in &[0.01, 0.05, 0.1] {
            let n = 20_000;
            let s: f64 = (0..n)
                .map(|i| kde_eval(&pts, h, (i as f64 + 0.5) / n as f64, Boundary::Reflect))
                .sum::<f64>()
                / n as f64;
            assert!((s - 1.0).abs() < 1e-3, "h={h}: {s}");
        }
    }

    #[test]
    fn point_mass_mode() {
        let mut rng = seeded(1);
        let pts: Vec<f64> = (0..50).map(|_| 0.3 + (rng.random::<f64>() - 0.5) * 2e-6).collect();
        for opts in [ModeOptions::default(), ModeOptions::transformed()] {
            let est = estimate_mode(&pts, &opts).unwrap();
            assert!((est.theta_hat - 0.3).abs() <= 0.01, "{est:?}");
            assert!(est.bandwidth > 0.0);
        }
    }

    #[test]
    fn mode_needs_enough_points() {
        assert!(estimate_mode(&[0.2; 9], &ModeOptions::default()).is_err());
        let opts = ModeOptions {
            grid_resolution: 100,
            ..Default::default()
        };
        assert!(estimate_mode(&[0.2; 20], &opts).is_err());
    }

    #[test]
    fn schedule_validation() {
        let s = LabeledPValues::unlabeled((1..200).map(|i| i as f64 / 200.0).collect()).unwrap();
        let o = ModeOptions::default();
        assert!(stabilized_xi(&s, 0.005, &[0.4, 0.3], &o).is_err());
        assert!(stabilized_xi(&s, 0.005, &[0.5, 0.5], &o).is_err());
        assert!(stabilized_xi(&s, 0.005, &[0.5, 0.3, 1.2], &o).is_err());
        assert!(stabilized_xi(&s, 0.0, &[0.5, 0.3], &o).is_err());
    }

    #[test]
    fn immediate_stabilization_returns_first_entry() {
        // A tight cluster dominates the filtered sample at every ξ.
        let mut p: Vec<f64> = (0..600).map(|i| 0.2 + i as f64 * 1e-6).collect();
        p.extend((0..400).map(|i| (i as f64 + 0.5) / 400.0));
        let s = LabeledPValues::unlabeled(p).unwrap();
        let r = stabilized_xi(&s, 0.005, &default_schedule(), &ModeOptions::default()).unwrap();
        assert!(r.stabilized);
        assert_eq!(r.xi_hat, 0.5);
        assert_eq!(r.path.len(), 2);
    }
}
