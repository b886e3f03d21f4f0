//! The `unifilter` command-line tool.
//!
//! Subcommands `generate`, `analyze`, `explore`, `reproduce` and `rerun`.
//! Settings resolve as flag, then `--config` file, then built-in default.
//! Outputs without an explicit path go to `--out-dir`, the config file's
//! `out_dir`, `$UNIFILTER_OUT_DIR`, or the working directory, in that
//! order. Each run leaves a `<name>.manifest.json` whose `argv` repeats it.

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

pub mod args;
mod commands;
pub mod config;
pub mod io;

use std::ffi::OsString;

use clap::Parser;

pub use args::Cli;
use args::{Command, ReproduceTarget};
use config::{resolve_out_dir, FileConfig};

use crate::error::Result;

/// Parses `args` (program name first) and runs the command.
///
/// Returns the process exit code: 0 on success, 2 for usage errors and 1
/// for any other failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let out_dir = resolve_out_dir(cli.out_dir.as_deref(), &file);
    match cli.command {
        Command::Generate(a) => commands::generate(a, &file, &out_dir),
        Command::Analyze(a) => commands::analyze_cmd(a, &file, &out_dir),
        Command::Explore(a) => commands::explore(a, &file, &out_dir),
        Command::Reproduce(r) => match r.target {
            ReproduceTarget::Table1(a) => commands::table1(a, &file, &out_dir),
            ReproduceTarget::Table2(a) => commands::table2(a, &file, &out_dir),
            ReproduceTarget::Asymptotic(a) => commands::asymptotic(a, &file, &out_dir),
            ReproduceTarget::ModeConvergence(a) => commands::mode_convergence(a, &file, &out_dir),
        },
        Command::Rerun(a) => {
            let manifest = io::RunManifest::load(&a.manifest)?;
            let argv = std::iter::once("unifilter".to_string()).chain(manifest.argv);
            let cli = Cli::try_parse_from(argv)
                .map_err(|e| crate::Error::Config(format!("manifest arguments do not parse: {e}")))?;
            execute(cli)
        }
    }
}
