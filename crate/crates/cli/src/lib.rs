//! Command-line driver: γ tables, counting experiments, learning curves, rate
//! calculators and kernel checks. Every command writes its tables and a
//! `manifest.json` into `--out`; `rerun` replays a manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod svg;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use crate::commands::{
    cmd_counts, cmd_dof, cmd_gamma, cmd_krr_curve, cmd_mercer_check, cmd_rates, CountsArgs, DofArgs, GammaArgs,
    KrrCurveArgs, MercerArgs, OutputArgs, RatesArgs, Report,
};
pub use crate::error::CliError;
use crate::output::{Manifest, OutputDir, MANIFEST_FILE};

pub const SUBCOMMANDS: [&str; 7] = ["gamma", "counts", "krr-curve", "rates", "mercer-check", "dof", "rerun"];

#[derive(Debug, Parser)]
#[command(name = "sphinv", version, about = "Invariant and stable kernels on the sphere")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Flat `key = value` file supplying flags for the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// γ_d(k) table of a transformation set, exact and/or Monte Carlo.
    Gamma(GammaArgs),
    /// Permutation statistics, deformation-set sizes and tiling counts.
    Counts(CountsArgs),
    /// Kernel ridge regression learning curves.
    KrrCurve(KrrCurveArgs),
    /// Frequency cutoff and gain factors over a range of sample sizes.
    Rates(RatesArgs),
    /// Truncated Mercer expansion against the closed-form kernel.
    MercerCheck(MercerArgs),
    /// Degrees of freedom of plain and averaged kernels.
    Dof(DofArgs),
    /// Re-run the command recorded in a manifest.
    #[command(args_override_self = true)]
    Rerun {
        manifest: PathBuf,
        /// Output directory for the replay.
        #[arg(long)]
        out: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gamma(_) => "gamma",
            Command::Counts(_) => "counts",
            Command::KrrCurve(_) => "krr-curve",
            Command::Rates(_) => "rates",
            Command::MercerCheck(_) => "mercer-check",
            Command::Dof(_) => "dof",
            Command::Rerun { .. } => "rerun",
        }
    }

    fn output(&self) -> Option<&OutputArgs> {
        match self {
            Command::Gamma(a) => Some(&a.output),
            Command::Counts(a) => Some(&a.output),
            Command::KrrCurve(a) => Some(&a.output),
            Command::Rates(a) => Some(&a.output),
            Command::MercerCheck(a) => Some(&a.output),
            Command::Dof(a) => Some(&a.output),
            Command::Rerun { .. } => None,
        }
    }

    fn config_json(&self) -> Result<serde_json::Value, CliError> {
        Ok(match self {
            Command::Gamma(a) => serde_json::to_value(a)?,
            Command::Counts(a) => serde_json::to_value(a)?,
            Command::KrrCurve(a) => serde_json::to_value(a)?,
            Command::Rates(a) => serde_json::to_value(a)?,
            Command::MercerCheck(a) => serde_json::to_value(a)?,
            Command::Dof(a) => serde_json::to_value(a)?,
            Command::Rerun { .. } => serde_json::Value::Null,
        })
    }
}

/// Outcome of a successful command.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub manifest: Manifest,
}

/// Drops the global `--threads` option so a replay can pick its own.
fn strip_threads(args: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(args.len());
    let mut i = 0;
    while i < args.len() {
        if args[i] == "--threads" {
            i += 2;
            continue;
        }
        if !args[i].starts_with("--threads=") {
            out.push(args[i].clone());
        }
        i += 1;
    }
    out
}

/// Parses `argv` (program name first), runs the command and writes its manifest.
pub fn run(argv: &[String]) -> Result<Outcome, CliError> {
    let argv = config::expand_config(argv, &SUBCOMMANDS)?;
    let cli = Cli::try_parse_from(&argv)?;
    let work = || execute(&cli, &argv);
    match cli.threads {
        Some(0) => Err(CliError::Config("--threads must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    }
}

fn execute(cli: &Cli, argv: &[String]) -> Result<Outcome, CliError> {
    if let Command::Rerun { manifest, out } = &cli.command {
        return rerun(manifest, out, cli.threads);
    }
    let opts = cli.command.output().expect("file-writing command");
    let mut out = OutputDir::new(&opts.out)?;
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let clock = Instant::now();
    let report: Report = match &cli.command {
        Command::Gamma(a) => cmd_gamma(a, &mut out)?,
        Command::Counts(a) => cmd_counts(a, &mut out)?,
        Command::KrrCurve(a) => cmd_krr_curve(a, &mut out)?,
        Command::Rates(a) => cmd_rates(a, &mut out)?,
        Command::MercerCheck(a) => cmd_mercer_check(a, &mut out)?,
        Command::Dof(a) => cmd_dof(a, &mut out)?,
        Command::Rerun { .. } => unreachable!("handled above"),
    };
    let manifest = Manifest {
        tool: "sphinv".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: cli.command.name().into(),
        argv: strip_threads(&argv[1..]),
        config: cli.command.config_json()?,
        seeds: report.seeds,
        threads: rayon::current_num_threads(),
        started_unix,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        outputs: out.files.clone(),
        summary: report.summary,
    };
    out.write_json(MANIFEST_FILE, &manifest)?;
    Ok(Outcome { out_dir: out.root, manifest })
}

/// Replays the argument list of a manifest into `out`.
pub fn rerun(manifest: &Path, out: &Path, threads: Option<usize>) -> Result<Outcome, CliError> {
    let m = Manifest::read(manifest)?;
    if m.command == "rerun" || !SUBCOMMANDS.contains(&m.command.as_str()) {
        return Err(CliError::Config(format!("manifest has unknown command '{}'", m.command)));
    }
    let mut argv = vec!["sphinv".to_string()];
    if let Some(n) = threads {
        argv.push("--threads".into());
        argv.push(n.to_string());
    }
    argv.extend(m.argv.iter().cloned());
    argv.push("--out".into());
    argv.push(out.to_string_lossy().into_owned());
    run(&argv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threads_are_stripped() {
        let v: Vec<String> = ["--threads", "3", "gamma", "--threads=2", "--set", "x"].iter().map(|s| s.to_string()).collect();
        assert_eq!(strip_threads(&v), vec!["gamma", "--set", "x"]);
    }

    #[test]
    fn subcommand_names_match_parser() {
        use clap::CommandFactory;
        let cmd = Cli::command();
        let names: Vec<&str> = cmd.get_subcommands().map(|c| c.get_name()).collect();
        assert_eq!(names, SUBCOMMANDS);
    }
}
