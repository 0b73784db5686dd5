use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cspa_core::data::{
    gen_four_gaussians, gen_gaussian_blobs, normalize, shuffle, to_libsvm, FOUR_CENTERS,
};
use cspa_core::theory::{audit_cspa_run, separating_scale, verify_run};
use cspa_core::{CspaConfig, Dataset, LabelOracle, OnlineLearner, WeightMatrix};
use cspa_harness::csv_out::{emit_noise_csv, fmt_sig};
use cspa_harness::{
    emit_csv, noise_study, presets, sweep_on, Algorithm, ExperimentSpec, HarnessError, Hyper,
    Result, Source,
};

#[derive(Parser)]
#[command(
    name = "cspa",
    about = "Online multiclass learning from bandit feedback"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run trials at a single hyperparameter setting.
    Run(ExpArgs),
    /// Run every point of a hyperparameter grid and report the best.
    Sweep(ExpArgs),
    /// CSPA accuracy over noise levels (--sigma) and step sizes (--beta).
    NoiseStudy(ExpArgs),
    /// Write a four-Gaussian dataset in LIBSVM format.
    Gen(GenArgs),
    /// Check the cumulative loss bound on a separable synthetic run.
    VerifyBound(BoundArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Cspa,
    Banditron,
}

#[derive(Args)]
struct ExpArgs {
    #[arg(long, value_enum, default_value = "cspa")]
    algo: Algo,
    /// LIBSVM file, or `four-gaussians` for synthetic data.
    #[arg(long, default_value = "four-gaussians")]
    data: String,
    /// Number of classes in --data (4 for synthetic data).
    #[arg(long)]
    classes: Option<usize>,
    /// Comma-separated values; `a/b` fractions allowed.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    /// Gaussian kernel bandwidths; enables the kernel expansion.
    #[arg(long)]
    kernel_g: Option<String>,
    #[arg(long)]
    support_size: Option<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Feature noise standard deviation (a list for noise-study).
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long, default_value_t = cspa_harness::DEFAULT_WINDOW)]
    window: usize,
    /// Per-class sample count for synthetic data.
    #[arg(long, default_value_t = 1000)]
    n_per_class: usize,
    /// Per-axis standard deviation of the synthetic blobs.
    #[arg(long, default_value_t = 0.1)]
    spread: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    n_per_class: usize,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    /// Centers at (+-1, +-1).
    FourCorners,
    /// Three unit centers 120 degrees apart.
    Triangle,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, value_enum, default_value = "four-corners")]
    layout: Layout,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 1000)]
    n_per_class: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step size when the comparator admits no theory value.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_list(flag: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let value = match tok.split_once('/') {
                Some((a, b)) => a
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .zip(b.trim().parse::<f64>().ok())
                    .map(|(a, b)| a / b),
                None => tok.parse().ok(),
            };
            value
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| HarnessError::Spec(format!("--{flag}: cannot parse {tok:?}")))
        })
        .collect()
}

fn opt_list(flag: &str, text: &Option<String>) -> Result<Option<Vec<f64>>> {
    text.as_deref().map(|t| parse_list(flag, t)).transpose()
}

fn source(a: &ExpArgs) -> Result<Source> {
    if a.data == "four-gaussians" {
        if a.classes.is_some_and(|k| k != 4) {
            return Err(HarnessError::Spec("four-gaussians has 4 classes".into()));
        }
        return Ok(Source::FourGaussians {
            n_per_class: a.n_per_class,
            sigma: a.spread,
            seed: a.seed,
        });
    }
    let num_classes = a
        .classes
        .ok_or_else(|| HarnessError::Spec("--classes is required with a data file".into()))?;
    Ok(Source::File {
        path: PathBuf::from(&a.data),
        num_classes,
    })
}

/// Explicit values, or the preset grid for the algorithm and feature space.
fn grid(a: &ExpArgs, algo: Algorithm, k: usize) -> Result<Vec<Hyper>> {
    let kernel = a.support_size.is_some() || a.kernel_g.is_some();
    let values = match algo {
        Algorithm::Cspa => opt_list("beta", &a.beta)?.unwrap_or_else(|| {
            if kernel {
                presets::kernel_betas(k)
            } else {
                presets::linear_betas(k)
            }
        }),
        Algorithm::Banditron => opt_list("gamma", &a.gamma)?.unwrap_or_else(|| {
            if kernel {
                presets::KERNEL_GAMMAS.to_vec()
            } else {
                presets::LINEAR_GAMMAS.to_vec()
            }
        }),
    };
    if !kernel {
        return Ok(presets::linear(&values));
    }
    let gs =
        opt_list("kernel-g", &a.kernel_g)?.unwrap_or_else(|| presets::KERNEL_BANDWIDTHS.to_vec());
    Ok(presets::kernel(&values, &gs))
}

fn build(a: &ExpArgs) -> Result<(ExperimentSpec, Dataset)> {
    let algo = match a.algo {
        Algo::Cspa => Algorithm::Cspa,
        Algo::Banditron => Algorithm::Banditron,
    };
    let src = source(a)?;
    let base = src.load()?;
    let mut spec = ExperimentSpec::new(algo, src, grid(a, algo, base.num_classes())?)
        .with_trials(a.trials)
        .with_seed(a.seed)
        .with_window(a.window);
    if a.support_size.is_some() || a.kernel_g.is_some() {
        let default = presets::KERNEL_SUPPORT_SIZE.min(base.len());
        spec = spec.with_kernel(a.support_size.unwrap_or(default));
    }
    Ok((spec, base))
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text)?;
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn experiment(a: &ExpArgs, single: bool) -> Result<()> {
    let (mut spec, base) = build(a)?;
    if let Some(s) = opt_list("sigma", &a.sigma)? {
        match s.as_slice() {
            [one] => spec = spec.with_noise(*one),
            _ => return Err(HarnessError::Spec("--sigma takes one value here".into())),
        }
    }
    if single && spec.grid.len() != 1 {
        return Err(HarnessError::Spec(format!(
            "run takes one grid point, got {}; use sweep",
            spec.grid.len()
        )));
    }
    let table = sweep_on(&base, &spec)?;
    if single {
        let row = table.best_row();
        for (t, m) in row.trials.iter().enumerate() {
            println!(
                "trial {t}: {}/{} = {}",
                m.cumulative_correct,
                m.rounds,
                fmt_sig(m.final_ratio, 6)
            );
        }
    }
    print!("{}", table.to_text());
    write_out(&a.out, &emit_csv(&table.records())?)
}

fn noise(a: &ExpArgs) -> Result<()> {
    if matches!(a.algo, Algo::Banditron) {
        return Err(HarnessError::Spec("noise-study runs CSPA only".into()));
    }
    let (spec, base) = build(a)?;
    let sigmas =
        opt_list("sigma", &a.sigma)?.unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0, 1.5]);
    let mut betas: Vec<f64> = Vec::new();
    for h in &spec.grid {
        if !betas.contains(&h.value) {
            betas.push(h.value);
        }
    }
    let cells = noise_study(&spec, &sigmas, &betas)?;
    let limit = 1.0 / (base.num_classes() as f64 - 1.0);
    println!(
        "beta < {} is inside the guaranteed range (*)",
        fmt_sig(limit, 4)
    );
    for c in &cells {
        println!(
            "sigma={:<6} beta={:<8}{} mean={}% sd={}",
            c.sigma,
            fmt_sig(c.beta, 4),
            if c.guaranteed { "*" } else { " " },
            fmt_sig(100.0 * c.mean, 4),
            fmt_sig(100.0 * c.stddev, 3),
        );
    }
    write_out(&a.out, &emit_noise_csv(&cells)?)
}

fn gen(a: &GenArgs) -> Result<()> {
    let ds: Dataset = gen_four_gaussians(a.n_per_class, a.sigma, a.seed)?;
    let text = to_libsvm(&ds);
    match &a.out {
        Some(_) => write_out(&a.out, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verify_bound(a: &BoundArgs) -> Result<()> {
    let centers: Vec<Vec<f64>> = match a.layout {
        Layout::FourCorners => FOUR_CENTERS.iter().map(|c| c.to_vec()).collect(),
        Layout::Triangle => [90.0f64, 210.0, 330.0]
            .iter()
            .map(|d| vec![d.to_radians().cos(), d.to_radians().sin()])
            .collect(),
    };
    let k = centers.len();
    let ds: Dataset = gen_gaussian_blobs("synthetic", &centers, a.n_per_class, a.sigma, a.seed)?;
    let ds = normalize(&shuffle(&ds, a.seed))?;
    let dirs = WeightMatrix::from_rows(centers)?;
    let scale = separating_scale(&dirs, &ds)?.ok_or_else(|| {
        HarnessError::Spec("class centers do not separate the sample; lower --sigma".into())
    })?;
    let u = dirs.scale(scale);
    let alpha = cspa_core::theory::alpha_of(&u, &ds)?;
    let beta = if alpha < 1.0 {
        CspaConfig::theory_beta(alpha, k)
    } else {
        eprintln!("comparator spread alpha = {alpha} >= 1: the bound does not apply");
        a.beta.unwrap_or(presets::half_theory_beta(k))
    };
    let cfg = CspaConfig::new(beta, k)?;
    let mut learner = cspa_core::Cspa::new(cfg, ds.dimension());
    let outcomes = ds
        .instances()
        .iter()
        .map(|inst| learner.step(&inst.features, &mut LabelOracle::new(inst.label)))
        .collect::<cspa_core::Result<Vec<_>>>()?;
    let report = verify_run(&outcomes, &u, &ds, beta)?;
    let audit = audit_cspa_run(&ds, &u, &cfg)?;
    let mut text = report.to_kv();
    text.push_str(&format!("comparator_scale={scale}\n"));
    text.push_str(&format!("delta_sum={}\n", audit.delta_sum()));
    text.push_str(&format!("telescoped={}\n", audit.telescoped));
    text.push_str(&format!(
        "telescoping_ok={}\n",
        (audit.delta_sum() - audit.telescoped).abs() < 1e-6
    ));
    print!("{text}");
    write_out(&a.out, &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Command::Run(a) => experiment(a, true),
        Command::Sweep(a) => experiment(a, false),
        Command::NoiseStudy(a) => noise(a),
        Command::Gen(a) => gen(a),
        Command::VerifyBound(a) => verify_bound(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
