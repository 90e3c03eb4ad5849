use serde::{Deserialize, Serialize};
use serde_json::json;
use sphinv::spectra::{gamma_exact, gamma_mc_all, GammaTable};

use super::{load_set, OutputArgs, Report};
use crate::error::CliError;
use crate::output::{Format, OutputDir};
use crate::svg::{LinePlot, Series};

/// `γ_d(k)` table of a transformation set.
#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
#[command(args_override_self = true)]
pub struct GammaArgs {
    /// Set descriptor (`cyclic:d=8`, `blockcyclic:s=6,r=2`, `symmetric:d=6`,
    /// `phi:d=12,eps=2`, ...) or a set file.
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 20)]
    pub kmax: usize,
    /// Exact values from the character series (default when `--mc` is absent).
    #[arg(long)]
    pub exact: bool,
    /// Monte Carlo estimates with standard errors.
    #[arg(long)]
    pub mc: bool,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn cmd_gamma(args: &GammaArgs, out: &mut OutputDir) -> Result<Report, CliError> {
    let set = load_set(&args.set)?;
    let exact = args.exact || !args.mc;
    let mut table = if exact { gamma_exact(&set, args.kmax)? } else { GammaTable::new(&set, args.kmax) };
    let mut seeds = Vec::new();
    if args.mc {
        table.attach_mc(gamma_mc_all(&set, args.kmax, args.n, args.seed)?);
        seeds.push(args.seed);
    }
    match args.output.format {
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            out.write("gamma.csv", &buf)?;
        }
        Format::Json => {
            out.write_json("gamma.json", &table)?;
        }
    }
    let values = table.values()?;
    if args.output.svg {
        let mut series = Vec::new();
        if let Some(e) = &table.exact {
            series.push(Series { name: "exact".into(), points: e.iter().enumerate().map(|(k, &v)| (k as f64, v)).collect() });
        }
        if let Some(mc) = &table.mc {
            series.push(Series { name: "monte carlo".into(), points: mc.iter().map(|m| (m.k as f64, m.estimate)).collect() });
        }
        let plot = LinePlot {
            title: format!("gamma_d(k) for {}", table.set_descriptor),
            x_label: "k".into(),
            y_label: "gamma".into(),
            series,
            reference: vec![(table.floor, "identity weight".into())],
            ..Default::default()
        };
        out.write("gamma.svg", plot.render().as_bytes())?;
    }
    Ok(Report {
        seeds,
        summary: json!({
            "set": table.set_descriptor,
            "d": table.d,
            "size": table.set_size,
            "is_group": table.is_group,
            "floor": table.floor,
            "kmax": table.kmax,
            "gamma_kmax": values[args.kmax],
        }),
    })
}
