use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sphinv::datagen::{make_dataset, make_dataset_in, random_direction, TargetBase, TargetSpec};
use sphinv::kernel_ridge::{gram_assemble, gram_self, lambda_sweep_gram, GramBudget, KernelSpec, WARN_EVALUATIONS};
use sphinv::rng::domain;

use super::{check_positive, load_shared_set, parse_kernel, OutputArgs, Report};
use crate::config::{parse_f64_list, parse_u64_list, parse_usize_list};
use crate::error::CliError;
use crate::output::{Format, OutputDir};
use crate::svg::{LinePlot, Series};

/// Learning curves of kernel ridge regression with plain and averaged kernels.
#[derive(Debug, Clone, PartialEq, clap::Args, Serialize, Deserialize)]
#[command(args_override_self = true)]
pub struct KrrCurveArgs {
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    #[arg(long, default_value = "relu-composite")]
    pub kernel: String,
    /// Averaging sets of the invariant kernels to compare (repeatable).
    #[arg(long = "set")]
    pub sets: Vec<String>,
    /// Leave out the plain kernel.
    #[arg(long)]
    pub no_plain: bool,
    /// Set the target is averaged over; none means the bare half-space indicator.
    #[arg(long)]
    pub target_set: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub target_reps: usize,
    #[arg(long, default_value_t = 0.7)]
    pub threshold: f64,
    /// Seed of the random target direction.
    #[arg(long, default_value_t = 0)]
    pub direction_seed: u64,
    #[arg(long, default_value = "100,200,400,800,1600,2500")]
    pub n_grid: String,
    #[arg(long, default_value = "0..5")]
    pub seeds: String,
    #[arg(long, default_value_t = 1000)]
    pub n_test: usize,
    /// Label noise standard deviation on the training set.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value = "1e-8:1:12")]
    pub lambda_grid: String,
    /// Refuse to run when more kernel evaluations would be needed.
    #[arg(long)]
    pub max_evaluations: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Best test risk for one `(n, kernel, seed)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub n: usize,
    pub kernel: String,
    pub seed: u64,
    pub lambda: f64,
    pub risk: f64,
}

/// Seed-averaged test risk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: usize,
    pub kernel: String,
    pub mean_risk: f64,
    pub std_risk: f64,
    pub seeds: usize,
    /// Mean plain risk over this kernel's mean risk.
    pub advantage: Option<f64>,
}

#[derive(Serialize)]
struct CurveFile<'a> {
    curve: &'a [CurveRow],
    runs: &'a [RunRow],
}

struct Plan {
    grid: Vec<usize>,
    seeds: Vec<u64>,
    lambdas: Vec<f64>,
    variants: Vec<(String, KernelSpec)>,
    target: TargetSpec,
}

fn plan(args: &KrrCurveArgs) -> Result<Plan, CliError> {
    let mut grid = parse_usize_list(&args.n_grid).map_err(CliError::Config)?;
    grid.sort_unstable();
    grid.dedup();
    if grid[0] == 0 {
        return Err(CliError::Config("sample sizes must be positive".into()));
    }
    check_positive("n-test", args.n_test)?;
    let seeds = parse_u64_list(&args.seeds).map_err(CliError::Config)?;
    let lambdas = parse_f64_list(&args.lambda_grid).map_err(CliError::Config)?;
    if lambdas.iter().any(|&l| !(l > 0.0)) {
        return Err(CliError::Config("lambda grid values must be positive".into()));
    }
    let kernel = parse_kernel(&args.kernel, args.d)?;
    let mut variants = Vec::new();
    if !args.no_plain {
        variants.push(("plain".to_string(), KernelSpec::plain(kernel.clone())));
    }
    for s in &args.sets {
        let set = load_shared_set(s)?;
        if set.d() != args.d {
            return Err(CliError::Config(format!("set '{s}' acts on d = {}, expected {}", set.d(), args.d)));
        }
        let name = set.label().to_string();
        if variants.iter().any(|(v, _)| *v == name) {
            return Err(CliError::Config(format!("kernel '{name}' listed twice")));
        }
        variants.push((name, KernelSpec::averaged(kernel.clone(), set)));
    }
    if variants.is_empty() {
        return Err(CliError::Config("no kernels to compare".into()));
    }
    let mut target = TargetSpec::new(
        TargetBase::Halfspace { threshold: args.threshold },
        random_direction(args.d, args.direction_seed),
    )?;
    if let Some(s) = &args.target_set {
        let set = load_shared_set(s)?;
        target = target.with_smoothing(Arc::clone(&set), args.target_reps)?;
    }
    Ok(Plan { grid, seeds, lambdas, variants, target })
}

/// Kernel and target evaluations a run needs.
pub fn evaluation_count(args: &KrrCurveArgs) -> Result<u64, CliError> {
    let p = plan(args)?;
    Ok(count(&p, args))
}

fn count(p: &Plan, args: &KrrCurveArgs) -> u64 {
    let nmax = *p.grid.last().expect("nonempty grid") as u64;
    let nt = args.n_test as u64;
    let per_seed: u64 = p
        .variants
        .iter()
        .map(|(_, spec)| spec.terms() as u64 * (nmax * (nmax + 1) / 2 + nt * nmax))
        .sum();
    let target_terms = match &p.target.smoothing {
        Some((set, reps)) => (set.len() as u64).saturating_pow(*reps as u32),
        None => 1,
    };
    (per_seed + target_terms * (nmax + nt)).saturating_mul(p.seeds.len() as u64)
}

pub fn cmd_krr_curve(args: &KrrCurveArgs, out: &mut OutputDir) -> Result<Report, CliError> {
    if !(args.noise >= 0.0) {
        return Err(CliError::Config(format!("--noise must be >= 0, got {}", args.noise)));
    }
    let p = plan(args)?;
    let evaluations = count(&p, args);
    if let Some(cap) = args.max_evaluations {
        if evaluations > cap {
            return Err(CliError::Budget(format!(
                "{evaluations} kernel/target evaluations needed, cap is {cap}"
            )));
        }
    }
    if evaluations > WARN_EVALUATIONS {
        log::warn!("learning curve needs {evaluations:e} kernel evaluations");
    }
    let nmax = *p.grid.last().expect("nonempty grid");
    let budget = GramBudget::default();
    let mut runs = Vec::new();
    for &seed in &p.seeds {
        let train = make_dataset(&p.target, nmax, args.noise, seed)?;
        let test = make_dataset_in(&p.target, args.n_test, 0.0, seed, domain::TEST_POINTS)?;
        for (name, spec) in &p.variants {
            log::info!("seed {seed}: {name} Gram at n = {nmax}");
            let k_train = gram_self(&train.points, spec, &budget)?;
            let k_cross = gram_assemble(&test.points, &train.points, spec, &budget)?;
            for &n in &p.grid {
                let sweep = lambda_sweep_gram(
                    &k_train.sub_block(n, n),
                    &train.labels[..n],
                    &k_cross.sub_block(args.n_test, n),
                    &test.labels,
                    &p.lambdas,
                )?;
                runs.push(RunRow { n, kernel: name.clone(), seed, lambda: sweep.best_lambda, risk: sweep.best_risk });
            }
        }
    }

    let mut curve = Vec::new();
    for &n in &p.grid {
        let mean_of = |name: &str| -> (f64, f64, usize) {
            let r: Vec<f64> = runs.iter().filter(|x| x.n == n && x.kernel == name).map(|x| x.risk).collect();
            let m = r.iter().sum::<f64>() / r.len() as f64;
            let var = if r.len() > 1 { r.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (r.len() - 1) as f64 } else { 0.0 };
            (m, var.sqrt(), r.len())
        };
        let plain = if args.no_plain { None } else { Some(mean_of("plain").0) };
        for (name, _) in &p.variants {
            let (mean_risk, std_risk, seeds) = mean_of(name);
            curve.push(CurveRow {
                n,
                kernel: name.clone(),
                mean_risk,
                std_risk,
                seeds,
                advantage: plain.map(|pl| pl / mean_risk),
            });
        }
    }

    match args.output.format {
        Format::Csv => {
            out.write_csv("curve.csv", &curve)?;
            out.write_csv("runs.csv", &runs)?;
        }
        Format::Json => {
            out.write_json("curve.json", &CurveFile { curve: &curve, runs: &runs })?;
        }
    }
    if args.output.svg {
        let series = p
            .variants
            .iter()
            .map(|(name, _)| Series {
                name: name.clone(),
                points: curve.iter().filter(|c| &c.kernel == name).map(|c| (c.n as f64, c.mean_risk)).collect(),
            })
            .collect();
        let plot = LinePlot {
            title: format!("KRR test risk, d = {}", args.d),
            x_label: "n".into(),
            y_label: "mean test risk".into(),
            log_x: true,
            log_y: true,
            series,
            ..Default::default()
        };
        out.write("curve.svg", plot.render().as_bytes())?;
    }
    let last: serde_json::Map<String, serde_json::Value> = curve
        .iter()
        .filter(|c| c.n == nmax)
        .map(|c| (c.kernel.clone(), json!(c.mean_risk)))
        .collect();
    Ok(Report {
        seeds: p.seeds.clone(),
        summary: json!({
            "d": args.d,
            "target": p.target.meta(),
            "kernel_evaluations": evaluations,
            "n_max": nmax,
            "mean_risk_at_n_max": last,
        }),
    })
}
