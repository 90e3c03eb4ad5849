use serde::{Deserialize, Serialize};
use serde_json::json;
use sphinv::harmonics::SpectralProfile;
use sphinv::spectra::{cum_invariant_mass, dof_pair, gamma_exact, nu};

use super::{check_positive, load_set, parse_kernel, OutputArgs, Report};
use crate::config::{parse_f64_list, parse_usize_list};
use crate::error::CliError;
use crate::output::{Format, OutputDir};
use crate::svg::{LinePlot, Series};

/// Truncated Mercer expansion of a kernel against its closed form.
#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
#[command(args_override_self = true)]
pub struct MercerArgs {
    #[arg(long, default_value = "relu-composite")]
    pub kernel: String,
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    /// Truncation degree `L`.
    #[arg(long, default_value_t = 60)]
    pub kmax: usize,
    /// Evaluation points, evenly spaced on `[−t_max, t_max]`.
    #[arg(long, default_value_t = 199)]
    pub points: usize,
    #[arg(long, default_value_t = 0.99)]
    pub t_max: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MercerRow {
    pub t: f64,
    pub kernel: f64,
    pub truncated: f64,
    pub error: f64,
}

pub fn cmd_mercer_check(args: &MercerArgs, out: &mut OutputDir) -> Result<Report, CliError> {
    check_positive("points", args.points)?;
    if !(args.t_max > 0.0 && args.t_max <= 1.0) {
        return Err(CliError::Config(format!("--t-max must lie in (0, 1], got {}", args.t_max)));
    }
    let kernel = parse_kernel(&args.kernel, args.d)?;
    let prof = SpectralProfile::compute(kernel.clone(), args.d, args.kmax)?;
    let step = if args.points > 1 { 2.0 * args.t_max / (args.points - 1) as f64 } else { 0.0 };
    let mut rows = Vec::with_capacity(args.points);
    for i in 0..args.points {
        let t = if args.points > 1 { -args.t_max + step * i as f64 } else { 0.0 };
        let exact = kernel.eval(t);
        let truncated = prof.mercer_reconstruct(args.kmax, t)?;
        rows.push(MercerRow { t, kernel: exact, truncated, error: (truncated - exact).abs() });
    }
    let max_error = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    out.write_table("mercer", &rows, args.output.format)?;
    match args.output.format {
        Format::Csv => {
            let mut buf = Vec::new();
            prof.write_csv(&mut buf)?;
            out.write("spectrum.csv", &buf)?;
        }
        Format::Json => {
            out.write_json("spectrum.json", &prof)?;
        }
    }
    if args.output.svg {
        let plot = LinePlot {
            title: format!("Mercer truncation error, {kernel}, d = {}, L = {}", args.d, args.kmax),
            x_label: "t".into(),
            y_label: "|error|".into(),
            log_y: true,
            series: vec![Series { name: "error".into(), points: rows.iter().map(|r| (r.t, r.error)).collect() }],
            ..Default::default()
        };
        out.write("mercer.svg", plot.render().as_bytes())?;
    }
    Ok(Report {
        seeds: vec![],
        summary: json!({
            "kernel": kernel.to_string(),
            "d": args.d,
            "kmax": args.kmax,
            "max_error": max_error,
            "partial_trace": prof.partial_trace(args.kmax),
            "kernel_at_one": kernel.eval(1.0),
        }),
    })
}

/// Degrees of freedom of a kernel and its averaged version, with the bound
/// `N_{K_G}(λ) ≤ D(ℓ) + ν_d(ℓ) N_K(λ)`.
#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
#[command(args_override_self = true)]
pub struct DofArgs {
    #[arg(long, default_value = "arccos1")]
    pub kernel: String,
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 80)]
    pub kmax: usize,
    /// Comma separated or `lo:hi:count` (log spaced).
    #[arg(long, default_value = "1e-8:1:12")]
    pub lambda_grid: String,
    /// Cutoffs `ℓ` at which the bound is evaluated.
    #[arg(long, default_value = "0,2,5,10")]
    pub l_values: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DofRow {
    pub lambda: f64,
    pub plain: f64,
    pub invariant: f64,
    pub plain_remainder: f64,
    pub invariant_remainder: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub lambda: f64,
    pub l: usize,
    pub invariant: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn cmd_dof(args: &DofArgs, out: &mut OutputDir) -> Result<Report, CliError> {
    let set = load_set(&args.set)?;
    let kernel = parse_kernel(&args.kernel, set.d())?;
    let lambdas = parse_f64_list(&args.lambda_grid).map_err(CliError::Config)?;
    let ls = parse_usize_list(&args.l_values).map_err(CliError::Config)?;
    if let Some(&l) = ls.iter().find(|&&l| l > args.kmax) {
        return Err(CliError::Config(format!("cutoff {l} exceeds kmax = {}", args.kmax)));
    }
    let table = gamma_exact(&set, args.kmax)?;
    let prof = SpectralProfile::compute(kernel, set.d(), args.kmax)?;
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut bounds = Vec::new();
    for &lambda in &lambdas {
        let p = dof_pair(&prof, &table, lambda)?;
        rows.push(DofRow {
            lambda,
            plain: p.plain,
            invariant: p.invariant,
            plain_remainder: p.plain_remainder,
            invariant_remainder: p.invariant_remainder,
        });
        for &l in &ls {
            let bound = cum_invariant_mass(&table, l)? + nu(&table, l)? * p.plain;
            bounds.push(BoundRow { lambda, l, invariant: p.invariant, bound, holds: p.invariant <= bound * (1.0 + 1e-12) });
        }
    }
    out.write_table("dof", &rows, args.output.format)?;
    out.write_table("dof_bounds", &bounds, args.output.format)?;
    if args.output.svg {
        let plot = LinePlot {
            title: format!("degrees of freedom, {}", set.label()),
            x_label: "lambda".into(),
            y_label: "N(lambda)".into(),
            log_x: true,
            log_y: true,
            series: vec![
                Series { name: "plain".into(), points: rows.iter().map(|r| (r.lambda, r.plain)).collect() },
                Series { name: "invariant".into(), points: rows.iter().map(|r| (r.lambda, r.invariant)).collect() },
            ],
            ..Default::default()
        };
        out.write("dof.svg", plot.render().as_bytes())?;
    }
    Ok(Report {
        seeds: vec![],
        summary: json!({
            "set": set.label(),
            "bound_holds": bounds.iter().all(|b| b.holds),
            "checked": bounds.len(),
        }),
    })
}
