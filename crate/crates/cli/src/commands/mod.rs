//! Subcommand implementations. Each takes its parsed arguments and an output
//! directory and returns the seeds it used plus a JSON summary for the manifest.

mod checks;
mod counts;
mod gamma;
mod krr_curve;
mod rates;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sphinv::harmonics::KernelFunction;
use sphinv::perms::{SetDescriptor, TransformationSet};

use crate::error::CliError;
use crate::output::Format;

pub use checks::{cmd_dof, cmd_mercer_check, BoundRow, DofArgs, DofRow, MercerArgs, MercerRow};
pub use counts::{cmd_counts, CountsArgs, DeformationRow, PermStatRow, TilingRow};
pub use gamma::{cmd_gamma, GammaArgs};
pub use krr_curve::{cmd_krr_curve, evaluation_count, CurveRow, KrrCurveArgs, RunRow};
pub use rates::{cmd_rates, RateRow, RatesArgs};

/// Flags shared by every command that writes files.
#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write an SVG chart.
    #[arg(long)]
    pub svg: bool,
}

/// What a command reports back for its manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seeds: Vec<u64>,
    pub summary: serde_json::Value,
}

/// A set descriptor such as `cyclic:d=8`, or the path of a set file.
pub fn load_set(spec: &str) -> Result<TransformationSet, CliError> {
    match spec.parse::<SetDescriptor>() {
        Ok(desc) => Ok(desc.build()?.with_label(desc.to_string())),
        Err(parse_err) => {
            let path = Path::new(spec);
            if path.is_file() {
                let f = std::fs::File::open(path)?;
                let set = TransformationSet::read_text(std::io::BufReader::new(f))?;
                let label = if set.label().is_empty() { spec.to_string() } else { set.label().to_string() };
                Ok(set.with_label(label))
            } else {
                Err(CliError::Config(format!("unknown set '{spec}': {parse_err}")))
            }
        }
    }
}

pub fn load_shared_set(spec: &str) -> Result<Arc<TransformationSet>, CliError> {
    load_set(spec).map(Arc::new)
}

pub fn parse_kernel(spec: &str, d: usize) -> Result<KernelFunction, CliError> {
    let k: KernelFunction = spec.parse()?;
    k.validate_for_dimension(d)?;
    Ok(k)
}

fn check_positive(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Config(format!("--{name} must be positive")));
    }
    Ok(())
}
