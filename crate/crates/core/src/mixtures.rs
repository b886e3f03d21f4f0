//! Two-group mixture models for test statistics and their p-value laws.
//!
//! A test is null with probability `1 − ε` and draws its statistic from
//! `F₀`; otherwise it draws from the shifted law `F₀(x − μ)`. The p-value is
//! the upper tail `1 − F₀(X)`. Alongside the sampler this module carries the
//! closed-form quantities used as oracles elsewhere: alternative p-value
//! densities, the Cauchy mode, local FDR, expected false deletions of the
//! fixed filter and the detectability constant.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, StudentsT};

use crate::error::{check_open_unit, Error, Result};
use crate::filters::deletion_count;
use crate::rng::{seeded, SeededRng};
use crate::special::{cauchy_quantile, cauchy_sf, normal_quantile, normal_sf};

/// Null distribution `F₀` of the test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Gaussian,
    Cauchy,
    StudentT { df: u32 },
}

impl Family {
    fn student(df: u32) -> StudentsT {
        StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1 is validated on construction")
    }

    /// Upper tail `1 − F₀(x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Family::Gaussian => normal_sf(x),
            Family::Cauchy => cauchy_sf(x),
            Family::StudentT { df } => Self::student(df).cdf(-x),
        }
    }

    /// `F₀⁻¹(1 − t)`, the statistic whose p-value is `t`.
    pub fn upper_quantile(&self, t: f64) -> f64 {
        match *self {
            Family::Gaussian => -normal_quantile(t),
            Family::Cauchy => cauchy_quantile(1.0 - t),
            Family::StudentT { df } => -Self::student(df).inverse_cdf(t),
        }
    }

    fn pdf(&self, x: f64) -> f64 {
        match *self {
            Family::Gaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Family::Cauchy => 1.0 / (PI * (1.0 + x * x)),
            Family::StudentT { df } => Self::student(df).pdf(x),
        }
    }
}

/// Two-group model `(1 − ε) F₀(x) + ε F₀(x − μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    #[serde(flatten)]
    pub family: Family,
    pub epsilon: f64,
    pub mu: f64,
}

impl MixtureModel {
    pub fn new(family: Family, epsilon: f64, mu: f64) -> Result<Self> {
        let model = MixtureModel {
            family,
            epsilon,
            mu,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn gaussian(epsilon: f64, mu: f64) -> Result<Self> {
        Self::new(Family::Gaussian, epsilon, mu)
    }

    pub fn cauchy(epsilon: f64, mu: f64) -> Result<Self> {
        Self::new(Family::Cauchy, epsilon, mu)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return Err(Error::domain("epsilon", self.epsilon, "[0, 1)"));
        }
        if !self.mu.is_finite() {
            return Err(Error::domain("mu", self.mu, "finite reals"));
        }
        if let Family::StudentT { df } = self.family {
            if df < 1 {
                return Err(Error::domain("df", df as f64, "integers >= 1"));
            }
        }
        Ok(())
    }

    /// Density `f_P` of an alternative p-value.
    pub fn alternative_density(&self, t: f64) -> Result<f64> {
        match self.family {
            Family::Gaussian => pvalue_density_gaussian(t, self.mu),
            Family::Cauchy => pvalue_density_cauchy(t, self.mu),
            Family::StudentT { .. } => {
                check_open_unit("t", t)?;
                let x = self.family.upper_quantile(t);
                Ok(self.family.pdf(x - self.mu) / self.family.pdf(x))
            }
        }
    }

    /// Distribution function `F_P(t) = 1 − F₁(F₀⁻¹(1 − t))` of an alternative p-value.
    pub fn alternative_cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        match self.family {
            // cot(πt) avoids the cancellation in tan(π(1/2 − t)) near t = 0.
            Family::Cauchy => cauchy_sf(1.0 / (PI * t).tan() - self.mu),
            _ => self.family.sf(self.family.upper_quantile(t) - self.mu),
        }
    }
}

/// A sample of p-values, optionally with the null/alternative indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPValues {
    pub p: Vec<f64>,
    /// `true` marks a true alternative (`H_i = 1`).
    pub h: Option<Vec<bool>>,
    pub seed: Option<u64>,
}

impl LabeledPValues {
    pub fn new(p: Vec<f64>, h: Option<Vec<bool>>) -> Result<Self> {
        for (i, &v) in p.iter().enumerate() {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Ingest {
                    row: i + 1,
                    reason: format!("p-value {v} is not inside (0, 1)"),
                });
            }
        }
        if let Some(h) = &h {
            if h.len() != p.len() {
                return Err(Error::Config(format!(
                    "{} labels for {} p-values",
                    h.len(),
                    p.len()
                )));
            }
        }
        Ok(LabeledPValues { p, h, seed: None })
    }

    pub fn unlabeled(p: Vec<f64>) -> Result<Self> {
        Self::new(p, None)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn alternatives(&self) -> Option<usize> {
        self.h.as_ref().map(|h| h.iter().filter(|&&x| x).count())
    }
}

const P_MIN: f64 = f64::from_bits(1);
const P_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

/// Moves 0 and 1 to the nearest representable interior values.
pub fn clamp_pvalue(p: f64) -> f64 {
    p.clamp(P_MIN, P_MAX)
}

/// Draws `m` labeled p-values from `model`, reproducibly from `seed`.
pub fn sample_pvalues(model: &MixtureModel, m: usize, seed: u64) -> Result<LabeledPValues> {
    model.validate()?;
    if m == 0 {
        return Err(Error::Config("m must be at least 1".into()));
    }
    let mut rng = seeded(seed);
    let mut labels = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    let mut draw = StatisticSampler::new(model)?;
    for _ in 0..m {
        let alt = rng.random::<f64>() < model.epsilon;
        p.push(draw.pvalue(&mut rng, alt));
        labels.push(alt);
    }
    Ok(LabeledPValues {
        p,
        h: Some(labels),
        seed: Some(seed),
    })
}

/// Like [`sample_pvalues`] but with exactly `alternatives` true
/// alternatives at uniformly random positions; `ε` is ignored.
pub fn sample_pvalues_with_count(
    model: &MixtureModel,
    m: usize,
    alternatives: usize,
    seed: u64,
) -> Result<LabeledPValues> {
    model.validate()?;
    if m == 0 {
        return Err(Error::Config("m must be at least 1".into()));
    }
    if alternatives > m {
        return Err(Error::Config(format!("{alternatives} alternatives exceed m = {m}")));
    }
    let mut rng = seeded(seed);
    let mut labels = vec![false; m];
    for i in rand::seq::index::sample(&mut rng, m, alternatives) {
        labels[i] = true;
    }
    let mut draw = StatisticSampler::new(model)?;
    let p = labels.iter().map(|&alt| draw.pvalue(&mut rng, alt)).collect();
    Ok(LabeledPValues {
        p,
        h: Some(labels),
        seed: Some(seed),
    })
}

struct StatisticSampler {
    family: Family,
    mu: f64,
    chi: Option<ChiSquared<f64>>,
}

impl StatisticSampler {
    fn new(model: &MixtureModel) -> Result<Self> {
        let chi = match model.family {
            Family::StudentT { df } => Some(ChiSquared::new(df as f64).map_err(|e| {
                Error::Config(format!("chi-squared with {df} degrees of freedom: {e}"))
            })?),
            _ => None,
        };
        Ok(StatisticSampler {
            family: model.family,
            mu: model.mu,
            chi,
        })
    }

    fn pvalue(&mut self, rng: &mut SeededRng, alt: bool) -> f64 {
        let null_stat = match self.family {
            Family::Gaussian => rng.sample::<f64, _>(StandardNormal),
            Family::Cauchy => cauchy_quantile(rng.random::<f64>()),
            Family::StudentT { df } => {
                let z: f64 = rng.sample(StandardNormal);
                let v = self.chi.as_ref().expect("set for StudentT").sample(rng);
                z / (v / df as f64).sqrt()
            }
        };
        let x = if alt { null_stat + self.mu } else { null_stat };
        clamp_pvalue(self.family.sf(x))
    }
}

/// Alternative p-value density of the Gaussian shift model, `exp(μ z₁₋ₜ − μ²/2)`.
pub fn pvalue_density_gaussian(t: f64, mu: f64) -> Result<f64> {
    check_open_unit("t", t)?;
    let z = -normal_quantile(t);
    Ok((mu * z - 0.5 * mu * mu).exp())
}

/// Alternative p-value density of the Cauchy shift model.
///
/// `(1 + cot²(πt)) / (1 + (cot(πt) − μ)²)`; bounded, with its maximum at
/// [`cauchy_mode`].
pub fn pvalue_density_cauchy(t: f64, mu: f64) -> Result<f64> {
    check_open_unit("t", t)?;
    let (s, c) = (PI * t).sin_cos();
    let cot = c / s;
    Ok((1.0 + cot * cot) / (1.0 + (cot - mu) * (cot - mu)))
}

/// Location of the maximum of [`pvalue_density_cauchy`].
pub fn cauchy_mode(mu: f64) -> f64 {
    (-(1.0 + mu * mu / 4.0).sqrt() - mu / 2.0).atan() / PI + 0.5
}

/// Marginal p-value density `(1 − ε) + ε f_P(t)`.
pub fn marginal_density(t: f64, model: &MixtureModel) -> Result<f64> {
    let f = model.alternative_density(t)?;
    Ok((1.0 - model.epsilon) + model.epsilon * f)
}

/// Posterior null probability `(1 − ε) / ((1 − ε) + ε f_P(t))`.
pub fn local_fdr(t: f64, model: &MixtureModel) -> Result<f64> {
    let f = model.alternative_density(t)?;
    let null = 1.0 - model.epsilon;
    Ok(null / (null + model.epsilon * f))
}

/// Midpoint-rule value of `∫₀¹ ε f_P / ((1 − ε) + ε f_P) dt` on `grid` cells.
pub fn alternative_share_integral(model: &MixtureModel, grid: usize) -> Result<f64> {
    if grid < 2 {
        return Err(Error::domain("grid", grid as f64, "integers >= 2"));
    }
    let eps = model.epsilon;
    if eps == 0.0 {
        return Ok(0.0);
    }
    let step = 1.0 / grid as f64;
    let mut sum = 0.0;
    for i in 0..grid {
        let t = (i as f64 + 0.5) * step;
        let f = model.alternative_density(t)?;
        let share = eps * f / ((1.0 - eps) + eps * f);
        // f_P can overflow to +inf near 0 for large Gaussian shifts.
        sum += if share.is_nan() { 1.0 } else { share };
    }
    Ok(sum * step)
}

/// Expected number of alternatives removed by the fixed-length filter.
///
/// `m_ξ · J`, where `m_ξ = ⌈(1 − ξ)m⌉` is the deletion count for the
/// retained fraction `xi` and `J` is [`alternative_share_integral`].
pub fn expected_false_deletions(
    model: &MixtureModel,
    xi: f64,
    m: usize,
    grid: usize,
) -> Result<f64> {
    check_open_unit("xi", xi)?;
    let deletions = deletion_count(xi, m) as f64;
    Ok(deletions * alternative_share_integral(model, grid)?)
}

/// `ε m` minus [`expected_false_deletions`]: the alternatives expected to survive.
pub fn theoretical_remaining(model: &MixtureModel, xi: f64, m: usize, grid: usize) -> Result<f64> {
    Ok(model.epsilon * m as f64 - expected_false_deletions(model, xi, m, grid)?)
}

/// Smallest constant `C` such that shifts `μ_m = C √(log m)` with
/// `ε_m = m^{−γ}` produce a cluster the filter can reveal.
pub fn detectability_constant(gamma: f64) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    Ok((2.0 * (1.0 - (1.0 - gamma).sqrt())).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gaussian_density_examples() {
        for &t in &[0.01, 0.3, 0.5, 0.93] {
            assert_eq!(pvalue_density_gaussian(t, 0.0).unwrap(), 1.0);
        }
        let v = pvalue_density_gaussian(0.5, 2.0).unwrap();
        assert!(close(v, (-2.0f64).exp(), 1e-14));
        let t = normal_sf(2.0);
        let v = pvalue_density_gaussian(t, 2.0).unwrap();
        assert!(close(v, 2.0f64.exp(), 1e-9), "{v}");
        assert!(pvalue_density_gaussian(0.0, 1.0).is_err());
        assert!(pvalue_density_gaussian(1.0, 1.0).is_err());
    }

    #[test]
    fn cauchy_density_examples() {
        assert!(close(pvalue_density_cauchy(0.3, 0.0).unwrap(), 1.0, 1e-12));
        assert!(close(pvalue_density_cauchy(0.5, 10.0).unwrap(), 1.0 / 101.0, 1e-12));
        assert!(pvalue_density_cauchy(-0.1, 1.0).is_err());
    }

    #[test]
    fn cauchy_mode_values() {
        assert!(close(cauchy_mode(0.0), 0.25, 1e-15));
        assert_eq!((cauchy_mode(10.0) * 1e4).round() / 1e4, 0.0314);
        assert_eq!((cauchy_mode(6.0) * 1e4).round() / 1e4, 0.0512);
    }

    #[test]
    fn cauchy_mode_is_grid_argmax() {
        let n = 100_000;
        for &mu in &[0.5, 1.0, 2.0, 6.0, 10.0, 20.0] {
            let (mut best_t, mut best) = (0.0, f64::MIN);
            for i in 1..n {
                let t = i as f64 / n as f64;
                let v = pvalue_density_cauchy(t, mu).unwrap();
                if v > best {
                    best = v;
                    best_t = t;
                }
            }
            let mode = cauchy_mode(mu);
            assert!((best_t - mode).abs() <= 1.0 / n as f64, "mu={mu}");
            let at_mode = pvalue_density_cauchy(mode, mu).unwrap();
            assert!(at_mode >= best * (1.0 - 1e-12), "mu={mu}");
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        let models = [
            MixtureModel::gaussian(0.5, 1.0).unwrap(),
            MixtureModel::gaussian(0.5, 2.0).unwrap(),
            MixtureModel::cauchy(0.5, 1.0).unwrap(),
            MixtureModel::cauchy(0.5, 10.0).unwrap(),
            MixtureModel::new(Family::StudentT { df: 3 }, 0.5, 2.0).unwrap(),
        ];
        let a = 0.01;
        for model in &models {
            let n = 20_000;
            let step = (1.0 - a) / n as f64;
            let s: f64 = (0..n)
                .map(|i| model.alternative_density(a + (i as f64 + 0.5) * step).unwrap())
                .sum::<f64>()
                * step;
            let mass = 1.0 - model.alternative_cdf(a);
            assert!(close(s, mass, 1e-6), "{model:?}: {s} vs {mass}");
        }
    }

    #[test]
    fn marginal_density_examples() {
        let null = MixtureModel::cauchy(0.0, 10.0).unwrap();
        assert_eq!(marginal_density(0.2, &null).unwrap(), 1.0);
        let g = MixtureModel::gaussian(0.5, 2.0).unwrap();
        let v = marginal_density(0.5, &g).unwrap();
        assert!(close(v, 0.5 + 0.5 * (-2.0f64).exp(), 1e-12));
        assert!(close(v, 0.56767, 1e-5));
        let c = MixtureModel::cauchy(0.15, 10.0).unwrap();
        let n = 2000;
        let s: f64 = (0..n)
            .map(|i| marginal_density((i as f64 + 0.5) / n as f64, &c).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!(close(s, 1.0, 1e-3));
    }

    #[test]
    fn local_fdr_examples() {
        let null = MixtureModel::gaussian(0.0, 3.0).unwrap();
        for &t in &[0.001, 0.4, 0.99] {
            assert_eq!(local_fdr(t, &null).unwrap(), 1.0);
        }
        let g = MixtureModel::gaussian(0.5, 2.0).unwrap();
        let v = local_fdr(0.5, &g).unwrap();
        assert!(close(v, 0.5 / (0.5 + 0.5 * (-2.0f64).exp()), 1e-12));
        assert!(close(v, 0.88080, 1e-5));
    }

    #[test]
    fn local_fdr_grid_argmin_is_cauchy_mode() {
        let model = MixtureModel::cauchy(0.15, 10.0).unwrap();
        let n = 100_000;
        let step = 1.0 / n as f64;
        let (mut arg, mut low) = (0.0, f64::MAX);
        for i in 1..n {
            let t = i as f64 * step;
            let v = local_fdr(t, &model).unwrap();
            if v < low {
                low = v;
                arg = t;
            }
        }
        assert!((arg - cauchy_mode(10.0)).abs() <= step);
    }

    #[test]
    fn local_fdr_monotone_in_epsilon() {
        for &t in &[0.01, 0.03142, 0.2, 0.6] {
            let f = pvalue_density_cauchy(t, 10.0).unwrap();
            let mut prev = None;
            for k in 0..10 {
                let eps = k as f64 * 0.09;
                let v = local_fdr(t, &MixtureModel::cauchy(eps, 10.0).unwrap()).unwrap();
                if let Some(p) = prev {
                    assert!(f > 0.0 && v < p, "t={t} eps={eps}");
                }
                prev = Some(v);
            }
        }
    }

    #[test]
    fn table1_theoretical_remaining() {
        let m = 40_000;
        let g2 = MixtureModel::gaussian(0.01, 2.0).unwrap();
        let g5 = MixtureModel::gaussian(0.01, 5.0).unwrap();
        assert!(close(theoretical_remaining(&g2, 0.05, m, 2000).unwrap(), 79.7, 0.5));
        assert!(close(theoretical_remaining(&g5, 0.05, m, 2000).unwrap(), 374.6, 0.5));
        let null = MixtureModel::gaussian(0.0, 5.0).unwrap();
        assert_eq!(expected_false_deletions(&null, 0.05, m, 2000).unwrap(), 0.0);
        assert!(expected_false_deletions(&g2, 0.0, m, 2000).is_err());
        assert!(expected_false_deletions(&g2, 0.5, m, 1).is_err());
    }

    #[test]
    fn detectability_constant_values() {
        assert!(close(detectability_constant(0.75).unwrap(), 1.0, 1e-15));
        assert!(close(detectability_constant(1.0 - 1e-12).unwrap(), 2f64.sqrt(), 1e-5));
        assert!(detectability_constant(1e-12).unwrap() < 1e-5);
        assert!(detectability_constant(1.0).is_err());
        assert!(detectability_constant(0.0).is_err());
    }

    #[test]
    fn model_validation() {
        assert!(MixtureModel::gaussian(1.0, 1.0).is_err());
        assert!(MixtureModel::gaussian(-0.1, 1.0).is_err());
        assert!(MixtureModel::cauchy(0.1, f64::NAN).is_err());
        assert!(MixtureModel::new(Family::StudentT { df: 0 }, 0.1, 1.0).is_err());
    }

    #[test]
    fn fixed_count_sampling() {
        let model = MixtureModel::gaussian(0.01, 3.0).unwrap();
        let a = sample_pvalues_with_count(&model, 5000, 50, 8).unwrap();
        assert_eq!(a.alternatives(), Some(50));
        assert_eq!(a, sample_pvalues_with_count(&model, 5000, 50, 8).unwrap());
        assert!(sample_pvalues_with_count(&model, 10, 11, 8).is_err());
        let none = sample_pvalues_with_count(&model, 100, 0, 1).unwrap();
        assert_eq!(none.alternatives(), Some(0));
    }

    #[test]
    fn sampling_is_reproducible() {
        for model in [
            MixtureModel::gaussian(0.2, 3.0).unwrap(),
            MixtureModel::cauchy(0.2, 3.0).unwrap(),
            MixtureModel::new(Family::StudentT { df: 3 }, 0.2, 3.0).unwrap(),
        ] {
            let a = sample_pvalues(&model, 500, 11).unwrap();
            let b = sample_pvalues(&model, 500, 11).unwrap();
            let bits = |s: &LabeledPValues| s.p.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
            assert_eq!(bits(&a), bits(&b));
            assert_eq!(a.h, b.h);
            assert_ne!(bits(&a), bits(&sample_pvalues(&model, 500, 12).unwrap()));
            assert!(a.p.iter().all(|&p| p > 0.0 && p < 1.0));
        }
        assert!(sample_pvalues(&MixtureModel::cauchy(0.2, 3.0).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn extreme_statistics_are_clamped() {
        let model = MixtureModel::gaussian(0.9, 1e6).unwrap();
        let s = sample_pvalues(&model, 200, 3).unwrap();
        assert!(s.p.iter().all(|&p| p > 0.0 && p < 1.0 && (-p.ln()).is_finite()));
    }
}
