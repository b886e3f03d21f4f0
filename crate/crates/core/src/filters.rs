//! Uniform filters that thin the null background of a p-value sample.
//!
//! Both filters lay a regular grid of `m_ξ = ⌈(1 − ξ)m⌉` intervals of
//! length `1/m_ξ` over `(0, 1]`. The fixed-length filter visits the interval
//! centres `c_j = (2j − 1)/(2m_ξ)` in turn and removes the surviving p-value
//! nearest to each; the random filter removes one uniformly chosen member
//! of every non-empty interval.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::mixtures::LabeledPValues;
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    #[default]
    Fixed,
    Random,
}

/// Order in which the fixed filter visits the interval centres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Retained fraction ξ.
    pub xi: f64,
    pub kind: FilterKind,
    pub direction: Direction,
    /// Only used by the random filter.
    pub seed: u64,
}

impl FilterConfig {
    pub fn fixed(xi: f64) -> Self {
        FilterConfig {
            xi,
            kind: FilterKind::Fixed,
            direction: Direction::Ascending,
            seed: 0,
        }
    }

    pub fn random(xi: f64, seed: u64) -> Self {
        FilterConfig {
            xi,
            kind: FilterKind::Random,
            direction: Direction::Ascending,
            seed,
        }
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = direction;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_open_unit("xi", self.xi)
    }
}

/// One grid interval and the sample index it removed, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterInterval {
    pub center: f64,
    pub deleted: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterResult {
    /// Surviving `(index, p)` pairs in input order.
    pub retained: Vec<(usize, f64)>,
    /// Removed `(index, p)` pairs in deletion order.
    pub deleted: Vec<(usize, f64)>,
    pub intervals: Vec<FilterInterval>,
}

impl FilterResult {
    pub fn retained_values(&self) -> Vec<f64> {
        self.retained.iter().map(|&(_, p)| p).collect()
    }

    /// Number of retained p-values labelled as alternatives.
    pub fn retained_alternatives(&self, labels: &[bool]) -> usize {
        self.retained.iter().filter(|&&(i, _)| labels[i]).count()
    }

    /// Number of deleted p-values labelled as alternatives.
    pub fn deleted_alternatives(&self, labels: &[bool]) -> usize {
        self.deleted.iter().filter(|&&(i, _)| labels[i]).count()
    }

    fn from_mask(p: &[f64], alive: &[bool], deleted: Vec<(usize, f64)>, intervals: Vec<FilterInterval>) -> Self {
        let retained = p
            .iter()
            .enumerate()
            .filter(|&(i, _)| alive[i])
            .map(|(i, &v)| (i, v))
            .collect();
        FilterResult {
            retained,
            deleted,
            intervals,
        }
    }
}

/// `m_ξ = ⌈(1 − ξ)m⌉`.
///
/// Products that land within rounding error of an integer are not pushed up
/// to the next one, so `ξ = 0.05, m = 40000` gives 38000.
pub fn deletion_count(xi: f64, m: usize) -> usize {
    let x = (1.0 - xi) * m as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Index of the right-closed bin `((k − 1)/n, k/n]` holding `p`.
pub(crate) fn bin_index(p: f64, nbins: usize) -> usize {
    let n = nbins as f64;
    let mut k = (p * n).ceil().max(1.0);
    if k > 1.0 && p <= (k - 1.0) / n {
        k -= 1.0;
    }
    (k as usize).min(nbins) - 1
}

fn check_counts(m: usize, xi: f64) -> Result<usize> {
    check_open_unit("xi", xi)?;
    let md = deletion_count(xi, m);
    if md == 0 || md > m {
        return Err(Error::Config(format!(
            "cannot delete {md} of {m} p-values (xi = {xi})"
        )));
    }
    Ok(md)
}

/// Disjoint-set style skip lists over sorted positions.
struct Survivors {
    next: Vec<usize>,
    prev: Vec<usize>,
}

impl Survivors {
    fn new(n: usize) -> Self {
        // next[i] = i while alive, sentinel n; prev is shifted by one with sentinel 0.
        Survivors {
            next: (0..=n).collect(),
            prev: (0..=n).collect(),
        }
    }

    fn first_at_or_after(&mut self, mut i: usize) -> usize {
        while self.next[i] != i {
            let up = self.next[self.next[i]];
            self.next[i] = up;
            i = up;
        }
        i
    }

    /// Shifted position (position + 1) of the last survivor at or before `i`; 0 if none.
    fn last_at_or_before(&mut self, i: usize) -> usize {
        let mut s = i + 1;
        while self.prev[s] != s {
            let down = self.prev[self.prev[s]];
            self.prev[s] = down;
            s = down;
        }
        s
    }

    fn remove(&mut self, i: usize) {
        self.next[i] = i + 1;
        self.prev[i + 1] = i;
    }
}

/// Deletes, for each centre in turn, the surviving p-value nearest to it.
///
/// Equidistant candidates resolve to the smaller p-value. Runs in
/// `O(m log m)`.
pub fn fixed_length_filter(sample: &LabeledPValues, config: &FilterConfig) -> Result<FilterResult> {
    let p = &sample.p;
    let m = p.len();
    let md = check_counts(m, config.xi)?;

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| p[i]).collect();

    let mut survivors = Survivors::new(m);
    let mut alive = vec![true; m];
    let mut deleted = Vec::with_capacity(md);
    let mut intervals = Vec::with_capacity(md);
    let width = 2.0 * md as f64;

    for step in 0..md {
        let j = match config.direction {
            Direction::Ascending => step,
            Direction::Descending => md - 1 - step,
        };
        let c = (2 * j + 1) as f64 / width;
        let split = sorted.partition_point(|&v| v <= c);
        let left = match split {
            0 => None,
            s => match survivors.last_at_or_before(s - 1) {
                0 => None,
                shifted => Some(shifted - 1),
            },
        };
        let right = match survivors.first_at_or_after(split) {
            r if r == m => None,
            r => Some(r),
        };
        let pos = match (left, right) {
            (Some(l), Some(r)) => {
                if c - sorted[l] <= sorted[r] - c {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!("md <= m guarantees a survivor"),
        };
        survivors.remove(pos);
        let idx = order[pos];
        alive[idx] = false;
        deleted.push((idx, p[idx]));
        intervals.push(FilterInterval {
            center: c,
            deleted: Some(idx),
        });
    }

    Ok(FilterResult::from_mask(p, &alive, deleted, intervals))
}

/// Deletes one uniformly chosen p-value from every non-empty grid interval.
pub fn random_filter(sample: &LabeledPValues, config: &FilterConfig) -> Result<FilterResult> {
    let p = &sample.p;
    let m = p.len();
    let md = check_counts(m, config.xi)?;

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); md];
    for (i, &v) in p.iter().enumerate() {
        members[bin_index(v, md)].push(i);
    }

    let mut rng = seeded(config.seed);
    let mut alive = vec![true; m];
    let mut deleted = Vec::new();
    let mut intervals = Vec::with_capacity(md);
    for (j, bin) in members.iter().enumerate() {
        let center = (2 * j + 1) as f64 / (2.0 * md as f64);
        let choice = if bin.is_empty() {
            None
        } else {
            let idx = bin[rng.random_range(0..bin.len())];
            alive[idx] = false;
            deleted.push((idx, p[idx]));
            Some(idx)
        };
        intervals.push(FilterInterval {
            center,
            deleted: choice,
        });
    }

    Ok(FilterResult::from_mask(p, &alive, deleted, intervals))
}

/// Runs whichever filter `config.kind` names.
pub fn apply_filter(sample: &LabeledPValues, config: &FilterConfig) -> Result<FilterResult> {
    match config.kind {
        FilterKind::Fixed => fixed_length_filter(sample, config),
        FilterKind::Random => random_filter(sample, config),
    }
}

/// Counts over `nbins` equal right-closed bins of `(0, 1]`.
pub fn bin_counts(pvals: &[f64], nbins: usize) -> Result<Vec<u64>> {
    if nbins == 0 {
        return Err(Error::Config("nbins must be at least 1".into()));
    }
    let mut counts = vec![0u64; nbins];
    for &p in pvals {
        counts[bin_index(p, nbins)] += 1;
    }
    Ok(counts)
}
