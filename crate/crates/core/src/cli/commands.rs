use std::path::{Path, PathBuf};

use serde::Serialize;

use super::args::{
    bandwidth_arg, AnalyzeArgs, AsymptoticArgs, ExploreArgs, FamilyArg, FilterArg, GenerateArgs, ModeConvergenceArgs,
    RunArgs, Table2Args,
};
use super::config::FileConfig;
use super::io::{self, manifest_path, RunManifest};
use crate::density::{Bandwidth, ModeOptions};
use crate::error::{Error, Result};
use crate::filters::{bin_counts, FilterKind};
use crate::gaps::default_window;
use crate::mixtures::{sample_pvalues, Family, MixtureModel};
use crate::pipeline::{analyze, analyze_centers, Analysis, AnalysisConfig, CenterReport, XiChoice};
use crate::reference::{self, Check};
use crate::sim::{self, AsymptoticConfig, ExperimentConfig, ModeConvergenceConfig};

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Uses the flag or config seed, otherwise draws one and prints it.
fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> u64 {
    flag.or(file).unwrap_or_else(|| {
        let seed = rand::random::<u64>();
        say!("seed: {seed} (generated; pass --seed {seed} to repeat)");
        seed
    })
}

fn filter_kind(arg: FilterArg) -> FilterKind {
    match arg {
        FilterArg::Fixed => FilterKind::Fixed,
        FilterArg::Random => FilterKind::Random,
    }
}

fn filter_name(kind: FilterKind) -> &'static str {
    match kind {
        FilterKind::Fixed => "fixed",
        FilterKind::Random => "random",
    }
}

fn path_arg(p: &Path) -> String {
    p.display().to_string()
}

fn grid_arg(grid: &[usize]) -> String {
    grid.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn write_manifest(primary: &Path, manifest: &RunManifest) -> Result<()> {
    io::write_json(&manifest_path(primary), manifest)
}

#[derive(Debug, Serialize)]
struct GenerateParams {
    model: MixtureModel,
    m: usize,
    seed: u64,
    out: PathBuf,
}

pub fn generate(args: GenerateArgs, file: &FileConfig, out_dir: &Path) -> Result<()> {
    let family = match pick(args.family, file.family()?, FamilyArg::Cauchy) {
        FamilyArg::Gaussian => Family::Gaussian,
        FamilyArg::Cauchy => Family::Cauchy,
        FamilyArg::StudentT => Family::StudentT {
            df: args
                .df
                .or(file.df)
                .ok_or_else(|| Error::Config("the student-t family needs --df".into()))?,
        },
    };
    let epsilon = pick(args.epsilon, file.epsilon()?, 0.15);
    let mu = pick(args.mu, file.mu, 10.0);
    let m = pick(args.m, file.count("m", file.m)?, 1000);
    let model = MixtureModel::new(family, epsilon, mu)?;
    let seed = resolve_seed(args.seed, file.seed);
    let out = args.out.unwrap_or_else(|| out_dir.join("pvalues.csv"));

    let sample = sample_pvalues(&model, m, seed)?;
    let mut w = io::create(&out)?;
    io::write_sample(&sample, &mut w)?;
    std::io::Write::flush(&mut w)?;

    let mut argv = vec!["generate".to_string(), "--family".into()];
    match family {
        Family::Gaussian => argv.push("gaussian".into()),
        Family::Cauchy => argv.push("cauchy".into()),
        Family::StudentT { df } => argv.extend(["student-t".into(), "--df".into(), df.to_string()]),
    }
    argv.extend([
        "--epsilon".into(),
        epsilon.to_string(),
        "--mu".into(),
        mu.to_string(),
        "--m".into(),
        m.to_string(),
        "--seed".into(),
        seed.to_string(),
        "--out".into(),
        path_arg(&out),
    ]);
    let params = GenerateParams { model, m, seed, out: out.clone() };
    write_manifest(&out, &RunManifest::new("generate", argv, &params, Some(seed), &[&out])?)?;
    say!("wrote {} p-values to {}", m, out.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct GapOptions {
    window: usize,
    threshold: f64,
}

#[derive(Debug, Serialize)]
struct AnalyzeParams {
    input: PathBuf,
    config: AnalysisConfig,
    centers: Option<GapOptions>,
    out: PathBuf,
}

#[derive(Debug, Serialize)]
struct Region {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Serialize)]
struct AnalyzeOutput<'a> {
    input: String,
    m: usize,
    analysis: &'a Analysis,
    region: Region,
    centers: Option<Vec<CenterReport>>,
}

/// Retained fraction used by `analyze` when neither `--xi` nor `--stabilize` is given.
pub const DEFAULT_XI: f64 = 0.15;

pub fn analyze_cmd(args: AnalyzeArgs, file: &FileConfig, out_dir: &Path) -> Result<()> {
    let sample = io::read_sample(&args.input)?;
    let m = sample.len();
    let xi = if args.stabilize {
        XiChoice::stabilized()
    } else {
        match args.xi.or(file.open_unit("xi", file.xi)?) {
            Some(xi) => XiChoice::Fixed { xi },
            None => XiChoice::Fixed { xi: DEFAULT_XI },
        }
    };
    let alpha = pick(args.alpha, file.open_unit("alpha", file.alpha)?, 0.1);
    let mode = ModeOptions {
        transform: pick(args.transform, file.transform, false),
        bandwidth: pick(args.bandwidth, file.bandwidth()?, Bandwidth::Rule),
        ..ModeOptions::default()
    };
    let filter = filter_kind(pick(args.filter, file.filter()?, FilterArg::Fixed));
    let seed = match filter {
        FilterKind::Random => Some(resolve_seed(args.seed, file.seed)),
        FilterKind::Fixed => None,
    };
    let config = AnalysisConfig {
        xi: xi.clone(),
        alpha,
        mode,
        filter,
        direction: Default::default(),
        seed: seed.unwrap_or(0),
    };
    let gap = args.centers.then(|| GapOptions {
        window: args.window.or(file.window).unwrap_or_else(|| default_window(m)),
        threshold: pick(args.threshold, file.threshold, 0.5),
    });
    let out = args.out.unwrap_or_else(|| out_dir.join("analysis.json"));

    let analysis = analyze(&sample, &config)?;
    let centers = match &gap {
        Some(g) => Some(analyze_centers(&sample.p, g.window, g.threshold, analysis.xi, alpha)?),
        None => None,
    };
    let region = analysis.report.region();
    io::write_json(
        &out,
        &AnalyzeOutput {
            input: path_arg(&args.input),
            m,
            analysis: &analysis,
            region: Region { lo: region.lo(), hi: region.hi() },
            centers,
        },
    )?;

    let mut argv = vec!["analyze".to_string(), "--input".into(), path_arg(&args.input)];
    match &xi {
        XiChoice::Fixed { xi } => argv.extend(["--xi".into(), xi.to_string()]),
        XiChoice::Stabilized { .. } => argv.push("--stabilize".into()),
    }
    argv.extend([
        "--alpha".into(),
        alpha.to_string(),
        "--transform".into(),
        mode.transform.to_string(),
        "--bandwidth".into(),
        bandwidth_arg(mode.bandwidth),
        "--filter".into(),
        filter_name(filter).into(),
    ]);
    if let Some(seed) = seed {
        argv.extend(["--seed".into(), seed.to_string()]);
    }
    if let Some(g) = &gap {
        argv.extend([
            "--centers".into(),
            "--window".into(),
            g.window.to_string(),
            "--threshold".into(),
            g.threshold.to_string(),
        ]);
    }
    argv.extend(["--out".into(), path_arg(&out)]);
    let params = AnalyzeParams { input: args.input.clone(), config, centers: gap, out: out.clone() };
    write_manifest(&out, &RunManifest::new("analyze", argv, &params, seed, &[&out])?)?;

    let r = &analysis.report;
    say!(
        "theta_hat {:.6}  delta_hat {:.6}  rejections {}  fdr_hat {:.6}  eps_hat {:.6}",
        r.theta_hat, r.delta_hat, r.r, r.fdr_hat, r.epsilon_hat
    );
    if let Some(c) = &analysis.confusion {
        say!("false {}  true {}  fdp {:.6}  tpp {:.6}", c.v, c.s, c.fdp, c.tpp);
    }
    say!("wrote {}", out.display());
    Ok(())
}

#[derive(Debug, Serialize)]
struct ExploreParams {
    input: PathBuf,
    nbins: usize,
    upto: f64,
    out: PathBuf,
}

pub fn explore(args: ExploreArgs, file: &FileConfig, out_dir: &Path) -> Result<()> {
    let sample = io::read_sample(&args.input)?;
    let nbins = args.nbins.or(file.count("nbins", file.nbins)?).unwrap_or(sample.len());
    let upto = pick(args.upto, file.upto, 0.2);
    if !(upto > 0.0 && upto <= 1.0) {
        return Err(Error::domain("upto", upto, "(0, 1]"));
    }
    let out = args.out.unwrap_or_else(|| out_dir.join("bins.csv"));
    let counts = bin_counts(&sample.p, nbins)?;

    let mut w = csv::Writer::from_writer(io::create(&out)?);
    w.write_record(["bin_mid", "count"])?;
    let mut best: Option<(f64, u64)> = None;
    for (i, &c) in counts.iter().enumerate() {
        let mid = (i as f64 + 0.5) / nbins as f64;
        if mid > upto {
            break;
        }
        w.write_record([mid.to_string(), c.to_string()])?;
        if best.is_none_or(|(_, b)| c > b) {
            best = Some((mid, c));
        }
    }
    w.flush()?;

    let argv = vec![
        "explore".into(),
        "--input".into(),
        path_arg(&args.input),
        "--nbins".into(),
        nbins.to_string(),
        "--upto".into(),
        upto.to_string(),
        "--out".into(),
        path_arg(&out),
    ];
    let params = ExploreParams { input: args.input.clone(), nbins, upto, out: out.clone() };
    write_manifest(&out, &RunManifest::new("explore", argv, &params, None, &[&out])?)?;
    if let Some((mid, c)) = best {
        say!("largest bin at {mid:.6} with {c} p-values");
    }
    say!("wrote {}", out.display());
    Ok(())
}

struct Resolved {
    reps: usize,
    seed: u64,
    jobs: usize,
}

fn resolve_run(run: &RunArgs, file: &FileConfig, default_reps: usize) -> Result<Resolved> {
    Ok(Resolved {
        reps: pick(run.reps, file.count("reps", file.reps)?, default_reps),
        seed: resolve_seed(run.seed, file.seed),
        jobs: pick(run.jobs, file.jobs, 0),
    })
}

fn run_argv(out_dir: &Path, target: &str, r: &Resolved) -> Vec<String> {
    vec![
        "--out-dir".into(),
        path_arg(out_dir),
        "reproduce".into(),
        target.into(),
        "--reps".into(),
        r.reps.to_string(),
        "--seed".into(),
        r.seed.to_string(),
        "--jobs".into(),
        r.jobs.to_string(),
    ]
}

/// Writes the CSV, JSON and check report of one experiment plus its manifest.
#[allow(clippy::too_many_arguments)]
fn emit<P: Serialize, J: Serialize>(
    out_dir: &Path,
    stem: &str,
    write_csv: impl FnOnce(&mut dyn std::io::Write) -> Result<()>,
    json: &J,
    checks: &[Check],
    command: &str,
    argv: Vec<String>,
    params: &P,
    seed: u64,
) -> Result<()> {
    let csv_path = out_dir.join(format!("{stem}.csv"));
    let json_path = out_dir.join(format!("{stem}.json"));
    let checks_path = out_dir.join(format!("{stem}_checks.txt"));
    {
        let mut w = io::create(&csv_path)?;
        write_csv(&mut w)?;
        std::io::Write::flush(&mut w)?;
    }
    io::write_json(&json_path, json)?;
    let mut text = String::new();
    for c in checks {
        say!("{}", c.line());
        text.push_str(&c.line());
        text.push('\n');
    }
    io::write_text(&checks_path, &text)?;
    let manifest = RunManifest::new(command, argv, params, Some(seed), &[&csv_path, &json_path, &checks_path])?;
    write_manifest(&csv_path, &manifest)?;
    say!("wrote {}", csv_path.display());
    Ok(())
}

pub fn table1(run: RunArgs, file: &FileConfig, out_dir: &Path) -> Result<()> {
    let r = resolve_run(&run, file, reference::TABLE1_REPS)?;
    let rows = sim::table1_rows();
    let outcomes = sim::run_table1(&rows, r.reps, r.seed, r.jobs)?;
    let checks = reference::table1_checks(&outcomes);
    #[derive(Serialize)]
    struct Params<'a> {
        rows: &'a [sim::Table1Row],
        reps: usize,
        master_seed: u64,
    }
    emit(
        out_dir,
        "table1",
        |w| sim::write_table1_csv(&outcomes, w),
        &outcomes,
        &checks,
        "reproduce table1",
        run_argv(out_dir, "table1", &r),
        &Params { rows: &rows, reps: r.reps, master_seed: r.seed },
        r.seed,
    )
}

pub fn table2(args: Table2Args, file: &FileConfig, out_dir: &Path) -> Result<()> {
    let r = resolve_run(&args.run, file, reference::TABLE2_REPS)?;
    let mu = pick(args.mu, file.mu, 10.0);
    let mut config = ExperimentConfig::table2(mu);
    config.xi = pick(args.xi, file.open_unit("xi", file.xi)?, config.xi);
    config.alpha = pick(args.alpha, file.open_unit("alpha", file.alpha)?, config.alpha);
    config.mode.transform = pick(args.transform, file.transform, config.mode.transform);
    config.mode.bandwidth = pick(args.bandwidth, file.bandwidth()?, config.mode.bandwidth);
    config.filter_kind = filter_kind(pick(args.filter, file.filter()?, FilterArg::Fixed));
    config.reps = r.reps;
    config.master_seed = r.seed;

    let outcome = sim::run_table2(&config, r.jobs)?;
    let checks = reference::table2_checks(&outcome);
    let mut argv = run_argv(out_dir, "table2", &r);
    argv.extend([
        "--mu".into(),
        mu.to_string(),
        "--xi".into(),
        config.xi.to_string(),
        "--alpha".into(),
        config.alpha.to_string(),
        "--transform".into(),
        config.mode.transform.to_string(),
        "--bandwidth".into(),
        bandwidth_arg(config.mode.bandwidth),
        "--filter".into(),
        filter_name(config.filter_kind).into(),
    ]);
    emit(
        out_dir,
        &format!("table2_mu{mu}"),
        |w| sim::write_table2_csv(&outcome, w),
        &outcome,
        &checks,
        "reproduce table2",
        argv,
        &config,
        r.seed,
    )
}

pub fn asymptotic(args: AsymptoticArgs, file: &FileConfig, out_dir: &Path) -> Result<()> {
    let r = resolve_run(&args.run, file, 50)?;
    let mut config = AsymptoticConfig::new(pick(args.gamma, file.gamma, 0.8), pick(args.r, file.r, 0.7));
    if let Some(grid) = args.m_grid.or_else(|| file.m_grid.clone()) {
        config.m_grid = grid;
    }
    config.xi = pick(args.xi, file.open_unit("xi", file.xi)?, config.xi);
    config.filter_kind = filter_kind(pick(args.filter, file.filter()?, FilterArg::Fixed));
    config.reps = r.reps;
    config.master_seed = r.seed;

    let points = sim::run_asymptotic(&config, r.jobs)?;
    let checks = reference::asymptotic_checks(&config, &points);
    let mut argv = run_argv(out_dir, "asymptotic", &r);
    argv.extend([
        "--gamma".into(),
        config.gamma.to_string(),
        "--r".into(),
        config.r.to_string(),
        "--m-grid".into(),
        grid_arg(&config.m_grid),
        "--xi".into(),
        config.xi.to_string(),
        "--filter".into(),
        filter_name(config.filter_kind).into(),
    ]);
    emit(
        out_dir,
        &format!("asymptotic_gamma{}_r{}", config.gamma, config.r),
        |w| sim::write_asymptotic_csv(&points, w),
        &points,
        &checks,
        "reproduce asymptotic",
        argv,
        &config,
        r.seed,
    )
}

pub fn mode_convergence(args: ModeConvergenceArgs, file: &FileConfig, out_dir: &Path) -> Result<()> {
    let r = resolve_run(&args.run, file, 50)?;
    let model = MixtureModel::cauchy(pick(args.epsilon, file.epsilon()?, 0.15), pick(args.mu, file.mu, 10.0))?;
    let mut config = ModeConvergenceConfig::new(model);
    if let Some(grid) = args.m_grid.or_else(|| file.m_grid.clone()) {
        config.m_grid = grid;
    }
    config.xi = pick(args.xi, file.open_unit("xi", file.xi)?, config.xi);
    config.reps = r.reps;
    config.master_seed = r.seed;

    let points = sim::run_mode_convergence(&config, r.jobs)?;
    let checks = reference::mode_convergence_checks(&points);
    let mut argv = run_argv(out_dir, "mode-convergence", &r);
    argv.extend([
        "--mu".into(),
        model.mu.to_string(),
        "--epsilon".into(),
        model.epsilon.to_string(),
        "--m-grid".into(),
        grid_arg(&config.m_grid),
        "--xi".into(),
        config.xi.to_string(),
    ]);
    emit(
        out_dir,
        &format!("mode_convergence_mu{}", model.mu),
        |w| sim::write_mode_convergence_csv(&points, w),
        &points,
        &checks,
        "reproduce mode-convergence",
        argv,
        &config,
        r.seed,
    )
}
