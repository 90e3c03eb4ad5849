use serde::{Deserialize, Serialize};
use serde_json::json;
use sphinv::spectra::{cum_invariant_mass, gamma_exact, ln_solver, nu_all, nud_estimate, RateMode, RateParams};

use super::{load_set, OutputArgs, Report};
use crate::config::parse_f64_list;
use crate::error::CliError;
use crate::output::OutputDir;
use crate::svg::{LinePlot, Series};

/// Frequency cutoff `ℓ_n`, `ν_d(ℓ_n)` and rate exponents over a grid of `n`.
#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
#[command(args_override_self = true)]
pub struct RatesArgs {
    #[arg(long)]
    pub set: String,
    #[arg(long, default_value_t = 120)]
    pub kmax: usize,
    /// Sample sizes, comma separated or `lo:hi:count`.
    #[arg(long, default_value = "1e2,1e3,1e4,1e5,1e6,1e7,1e8,1e9")]
    pub n_grid: String,
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value = "invariant")]
    pub mode: String,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c_beta: f64,
    /// Asymptotic gain `ν₀`; defaults to the identity weight of the set.
    #[arg(long)]
    pub nu0: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: f64,
    pub l_n: usize,
    pub nu: f64,
    /// `1/ν_d(ℓ_n)`.
    pub gain: f64,
    /// `Σ_{k<ℓ_n} γ_d(k) N(d,k)`.
    pub dim_below: f64,
    pub rate_exponent: f64,
    pub nu_estimate: f64,
}

pub fn cmd_rates(args: &RatesArgs, out: &mut OutputDir) -> Result<Report, CliError> {
    let set = load_set(&args.set)?;
    let mode: RateMode = args.mode.parse()?;
    let grid = parse_f64_list(&args.n_grid).map_err(CliError::Config)?;
    let table = gamma_exact(&set, args.kmax)?;
    let nus = nu_all(&table)?;
    let params = RateParams {
        alpha: args.alpha,
        r: args.r,
        c2: args.c2,
        beta: args.beta,
        c_beta: args.c_beta,
        nu0: args.nu0.unwrap_or(table.floor),
        d: set.d(),
        ..Default::default()
    };
    params.validate()?;
    let mut masses = Vec::with_capacity(args.kmax + 2);
    for l in 0..=args.kmax + 1 {
        masses.push(cum_invariant_mass(&table, l)?);
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &n in &grid {
        let (l, nu) = ln_solver(&params, |l| masses[l], |l| nus[l], args.kmax, n, mode)?;
        rows.push(RateRow {
            n,
            l_n: l,
            nu,
            gain: 1.0 / nu,
            dim_below: masses[l],
            rate_exponent: params.rate_exponent(),
            nu_estimate: nud_estimate(&params, n, mode)?,
        });
    }
    out.write_table("rates", &rows, args.output.format)?;
    if args.output.svg {
        let plot = LinePlot {
            title: format!("gain 1/nu(l_n) for {}", set.label()),
            x_label: "n".into(),
            y_label: "gain".into(),
            log_x: true,
            series: vec![Series { name: "1/nu".into(), points: rows.iter().map(|r| (r.n, r.gain)).collect() }],
            reference: vec![(1.0 / table.floor, "1/identity weight".into())],
            ..Default::default()
        };
        out.write("rates.svg", plot.render().as_bytes())?;
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.n.total_cmp(&b.n));
    Ok(Report {
        seeds: vec![],
        summary: json!({
            "set": set.label(),
            "rate_exponent": params.rate_exponent(),
            "gain_nondecreasing": sorted.windows(2).all(|w| w[1].gain >= w[0].gain),
            "cutoff_nondecreasing": sorted.windows(2).all(|w| w[1].l_n >= w[0].l_n),
            "final_gain": sorted.last().map(|r| r.gain),
        }),
    })
}
