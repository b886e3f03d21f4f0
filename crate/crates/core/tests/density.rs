use unifilter::density::{estimate_mode, kde_eval, mode_grid, Boundary, ModeOptions};
use unifilter::filters::{fixed_length_filter, FilterConfig};
use unifilter::mixtures::{cauchy_mode, sample_pvalues, MixtureModel};
use unifilter::reference::TABLE2;
use unifilter::rng::derive_seed;

fn retained(model: &MixtureModel, m: usize, xi: f64, seed: u64) -> Vec<f64> {
    let s = sample_pvalues(model, m, seed).unwrap();
    fixed_length_filter(&s, &FilterConfig::fixed(xi)).unwrap().retained_values()
}

#[test]
fn kde_ignores_point_order() {
    let model = MixtureModel::cauchy(0.15, 10.0).unwrap();
    let points = retained(&model, 500, 0.15, 3);
    let mut reversed = points.clone();
    reversed.reverse();
    for t in [0.01, 0.0314, 0.2, 0.77] {
        for boundary in [Boundary::None, Boundary::Reflect] {
            let a = kde_eval(&points, 0.02, t, boundary);
            let b = kde_eval(&reversed, 0.02, t, boundary);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} {b}");
        }
    }
}

#[test]
fn transform_agrees_on_table2_configs() {
    for row in TABLE2 {
        let model = MixtureModel::cauchy(0.15, row.mu).unwrap();
        let mut diffs = Vec::new();
        for rep in 0..20 {
            let r = retained(&model, 1000, 0.15, derive_seed(5, rep));
            let plain = estimate_mode(&r, &ModeOptions::default()).unwrap().theta_hat;
            let logged = estimate_mode(&r, &ModeOptions::transformed()).unwrap().theta_hat;
            diffs.push((plain - logged).abs());
        }
        diffs.sort_by(f64::total_cmp);
        assert!(diffs[10] < 0.01, "mu={}: median difference {}", row.mu, diffs[10]);
    }
}

#[test]
fn sharpness_falls_with_bandwidth() {
    let model = MixtureModel::cauchy(0.15, 10.0).unwrap();
    let points = retained(&model, 1000, 0.15, 8);
    let grid = mode_grid(512);
    let sharpness = |h: f64| {
        let d: Vec<f64> = grid.iter().map(|&t| kde_eval(&points, h, t, Boundary::Reflect)).collect();
        d.iter().cloned().fold(0.0, f64::max) / (d.iter().sum::<f64>() / d.len() as f64)
    };
    let mut h = 0.002;
    let mut last = f64::INFINITY;
    while h < 1.0 {
        let s = sharpness(h);
        assert!(s <= last * (1.0 + 1e-9), "h={h}: {s} > {last}");
        last = s;
        h *= 2.0;
    }
}

#[test]
fn mode_error_shrinks_with_sparse_signal() {
    let target = cauchy_mode(10.0);
    let medians: Vec<f64> = [1_000usize, 10_000, 100_000]
        .iter()
        .enumerate()
        .map(|(g, &m)| {
            let epsilon = (m as f64).powf(-0.3);
            let model = MixtureModel::cauchy(epsilon, 10.0).unwrap();
            let mut errors: Vec<f64> = (0..50)
                .map(|rep| {
                    let r = retained(&model, m, epsilon, derive_seed(derive_seed(17, g as u64), rep));
                    (estimate_mode(&r, &ModeOptions::default()).unwrap().theta_hat - target).abs()
                })
                .collect();
            errors.sort_by(f64::total_cmp);
            0.5 * (errors[24] + errors[25])
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[1] <= w[0]), "{medians:?}");
}
