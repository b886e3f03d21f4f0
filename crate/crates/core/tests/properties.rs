use proptest::prelude::*;

use unifilter::fdr::{bh_procedure, fdr_hat, pfdr_hat, select_delta};
use unifilter::filters::{apply_filter, deletion_count, FilterConfig};
use unifilter::gaps::detect_centers;
use unifilter::mixtures::{sample_pvalues, LabeledPValues, MixtureModel};
use unifilter::sim::{run_indexed, run_table2, ExperimentConfig};

fn pvalues(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-9..1.0 - 1e-9, 1..max_len)
}

fn xi_values() -> impl Strategy<Value = f64> {
    0.01f64..0.99
}

fn bh_oracle(p: &[f64], alpha: f64) -> Vec<usize> {
    let m = p.len();
    let mut best = 0;
    for k in 1..=m {
        let below = p.iter().filter(|&&v| v <= k as f64 * alpha / m as f64).count();
        if below >= k {
            best = k;
        }
    }
    let cut = (best > 0).then(|| best as f64 * alpha / m as f64);
    (0..m).filter(|&i| cut.is_some_and(|c| p[i] <= c)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn filter_partitions_the_sample(p in pvalues(300), xi in xi_values(), seed: u64, random: bool) {
        let sample = LabeledPValues::unlabeled(p.clone()).unwrap();
        let config = if random { FilterConfig::random(xi, seed) } else { FilterConfig::fixed(xi) };
        let out = apply_filter(&sample, &config).unwrap();
        let mut idx: Vec<usize> = out.retained.iter().chain(&out.deleted).map(|&(i, _)| i).collect();
        idx.sort_unstable();
        prop_assert_eq!(idx, (0..p.len()).collect::<Vec<_>>());
        for &(i, v) in out.retained.iter().chain(&out.deleted) {
            prop_assert_eq!(p[i], v);
        }
    }

    #[test]
    fn fixed_filter_deletes_exactly_m_xi(p in pvalues(300), xi in xi_values()) {
        let m = p.len();
        let sample = LabeledPValues::unlabeled(p).unwrap();
        let out = apply_filter(&sample, &FilterConfig::fixed(xi)).unwrap();
        let m_xi = deletion_count(xi, m);
        prop_assert!(m_xi <= m);
        prop_assert_eq!(out.deleted.len(), m_xi);
        prop_assert_eq!(out.retained.len(), m - m_xi);
    }

    #[test]
    fn random_filter_deletes_at_most_m_xi(p in pvalues(300), xi in xi_values(), seed: u64) {
        let m = p.len();
        let sample = LabeledPValues::unlabeled(p).unwrap();
        let out = apply_filter(&sample, &FilterConfig::random(xi, seed)).unwrap();
        prop_assert!(out.deleted.len() <= deletion_count(xi, m));
    }

    #[test]
    fn deletion_count_is_ceiling(xi in xi_values(), m in 1usize..100_000) {
        let c = deletion_count(xi, m);
        let x = (1.0 - xi) * m as f64;
        prop_assert!(c as f64 >= x - 1e-6 && (c as f64) < x + 1.0);
    }

    #[test]
    fn regions_are_nested_in_width(
        p in pvalues(300),
        theta in 0.01f64..0.99,
        a in 0.0f64..0.5,
        b in 0.0f64..0.5,
    ) {
        let (small, large) = if a <= b { (a, b) } else { (b, a) };
        let count = |w: f64| p.iter().filter(|&&v| (v - theta).abs() <= w / 2.0).count();
        prop_assert!(count(small) <= count(large));
    }

    #[test]
    fn select_delta_ignores_order(p in pvalues(200), theta in 0.01f64..0.99, seed: u64) {
        let mut shuffled: Vec<(usize, f64)> = p.iter().copied().enumerate().collect();
        let mut s = seed | 1;
        for i in (1..shuffled.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            shuffled.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let q: Vec<f64> = shuffled.iter().map(|&(_, v)| v).collect();
        let a = select_delta(&p, theta, 0.2, 0.1).unwrap();
        let b = select_delta(&q, theta, 0.2, 0.1).unwrap();
        prop_assert_eq!(a.r, b.r);
        prop_assert_eq!(a.delta_hat, b.delta_hat);
        prop_assert_eq!(a.fdr_hat, b.fdr_hat);
        let mut back: Vec<usize> = b.rejected.iter().map(|&j| shuffled[j].0).collect();
        back.sort_unstable();
        prop_assert_eq!(a.rejected, back);
    }

    #[test]
    fn detect_centers_ignores_order(mut p in prop::collection::vec(1e-6f64..1.0 - 1e-6, 40..200)) {
        let k = 5;
        let a = detect_centers(&p, k, 0.3).unwrap();
        p.reverse();
        let b = detect_centers(&p, k, 0.3).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pfdr_dominates_fdr(p in pvalues(300), theta in 0.01f64..0.99, width in 1e-4f64..1.0, xi in 0.05f64..0.5) {
        let f = fdr_hat(&p, theta, width, xi).unwrap();
        let pf = pfdr_hat(&p, theta, width, xi).unwrap().unwrap();
        prop_assert!(pf >= f);
    }

    #[test]
    fn bh_matches_quadratic_oracle(p in pvalues(200), alpha in 0.001f64..0.5) {
        prop_assert_eq!(bh_procedure(&p, alpha).unwrap(), bh_oracle(&p, alpha));
    }

    #[test]
    fn indexed_runs_do_not_depend_on_jobs(n in 0usize..64, jobs in 1usize..9) {
        let f = |i: usize| Ok::<u64, unifilter::Error>(unifilter::rng::derive_seed(7, i as u64));
        prop_assert_eq!(run_indexed(n, 1, f).unwrap(), run_indexed(n, jobs, f).unwrap());
    }
}

#[test]
fn table2_outcome_does_not_depend_on_jobs() {
    let mut config = ExperimentConfig::table2(10.0);
    config.reps = 24;
    config.master_seed = 99;
    let one = run_table2(&config, 1).unwrap();
    for jobs in [2, 5] {
        assert_eq!(run_table2(&config, jobs).unwrap(), one);
    }
}

#[test]
fn same_seeds_reproduce_sample_and_filter() {
    let model = MixtureModel::cauchy(0.15, 10.0).unwrap();
    let a = sample_pvalues(&model, 500, 3).unwrap();
    let b = sample_pvalues(&model, 500, 3).unwrap();
    assert_eq!(a, b);
    let fa = apply_filter(&a, &FilterConfig::random(0.2, 11)).unwrap();
    let fb = apply_filter(&b, &FilterConfig::random(0.2, 11)).unwrap();
    assert_eq!(fa, fb);
}
