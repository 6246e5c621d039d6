use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use deposim_cli::calibration::Calibration;
use deposim_cli::commands::{
    conjecture, fluct, limits_cmd, phase, simulate, speed, validate, CmdError,
};
use deposim_cli::config::{ExperimentConfig, ShapeName};
use deposim_cli::out;

/// Monte Carlo toolkit for heavy-tailed non-local deposition models.
#[derive(Parser)]
#[command(name = "deposim", version, about)]
struct Cli {
    /// Threads for the replica pool (defaults to the core count).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicas and emit checkpoint / deposition-log CSVs.
    Simulate(ConfigArgs),
    /// Growth-speed checks for the configured regime.
    Speed(ConfigArgs),
    /// Fluctuation-law checks for the configured regime.
    Fluct(ConfigArgs),
    /// Sweep an (alpha, beta) grid and fit both exponents per point.
    Phase {
        /// Comma-separated alpha values.
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<f64>,
        /// Comma-separated beta values.
        #[arg(long, value_delimiter = ',')]
        betas: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, value_enum, default_value = "triangle")]
        shape: ShapeArg,
        #[arg(long, default_value_t = 60.0)]
        domain: f64,
        #[arg(long, default_value_t = 512)]
        grid: usize,
        #[arg(long, default_value_t = 400)]
        replicas: u64,
        /// Comma-separated checkpoint Ns (at least three).
        #[arg(long, value_delimiter = ',', default_values_t = [316u64, 1000, 3162, 10000])]
        ns: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "out/phase")]
        out: PathBuf,
        /// Sweep points within 0.1 of a critical line instead of refusing.
        #[arg(long)]
        allow_near_boundary: bool,
    },
    /// Stream draws from a limit law to CSV.
    Limits {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// stable | mu-d | mu-stellar | stellar-series
        #[arg(long)]
        law: String,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Series truncation tolerance.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// Run the acceptance battery; exit 0 only if every criterion passes.
    Validate {
        /// Restrict to comma-separated suite keys
        /// (order-stats, vy-law, gamma-moment, speed, fluct, stellar,
        /// appendixD, phase, properties).
        #[arg(long, value_delimiter = ',')]
        suite: Option<Vec<String>>,
        #[arg(long, default_value_t = 424242)]
        seed: u64,
        #[arg(long, default_value = "out/validate")]
        out: PathBuf,
        /// Re-run at 4x budget and write observed statistics next to the
        /// frozen thresholds.
        #[arg(long)]
        calibrate: bool,
        /// Override the embedded calibration file.
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Exploratory min-model fluctuation report (no pass/fail).
    ConjectureMin(ConfigArgs),
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum ShapeArg {
    Triangle,
    CubicHump,
    Parabola,
    IndicatorStep,
}

impl From<ShapeArg> for ShapeName {
    fn from(s: ShapeArg) -> ShapeName {
        match s {
            ShapeArg::Triangle => ShapeName::Triangle,
            ShapeArg::CubicHump => ShapeName::CubicHump,
            ShapeArg::Parabola => ShapeName::Parabola,
            ShapeArg::IndicatorStep => ShapeName::IndicatorStep,
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<(ExperimentConfig, PathBuf), CmdError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CmdError::Invalid(format!("{}: {e}", args.config.display())))?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.outputs));
    Ok((cfg, out_dir))
}

fn run(cli: Cli) -> Result<bool, CmdError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CmdError::Invalid(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(args) => {
            let (cfg, out_dir) = load_config(&args)?;
            let outs = simulate::simulate(&cfg, &out_dir)?;
            println!("wrote {}", outs.checkpoint_csv.display());
            if let Some(p) = outs.stellar_csv {
                println!("wrote {}", p.display());
            }
            for p in outs.log_csvs {
                println!("wrote {}", p.display());
            }
            println!("wrote {}", outs.manifest_path.display());
            Ok(true)
        }
        Command::Speed(args) => {
            let (cfg, out_dir) = load_config(&args)?;
            let manifest = speed::speed(&cfg, &Calibration::embedded(), &out_dir)?;
            for r in &manifest.results {
                println!(
                    "{} {}: {:.4} vs {:.4}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.test,
                    r.statistic,
                    r.threshold
                );
            }
            Ok(manifest.all_pass)
        }
        Command::Fluct(args) => {
            let (cfg, out_dir) = load_config(&args)?;
            let manifest = fluct::fluct(&cfg, &Calibration::embedded(), &out_dir)?;
            for r in &manifest.results {
                println!(
                    "{} {}: {:.4} vs {:.4}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.test,
                    r.statistic,
                    r.threshold
                );
            }
            Ok(manifest.all_pass)
        }
        Command::Phase {
            alphas,
            betas,
            dim,
            shape,
            domain,
            grid,
            replicas,
            ns,
            seed,
            out,
            allow_near_boundary,
        } => {
            let args = phase::PhaseArgs {
                alphas,
                betas,
                dim,
                shape: shape.into(),
                domain,
                grid_per_dim: grid,
                replicas,
                checkpoint_ns: ns,
                master_seed: seed,
                allow_near_boundary,
            };
            let rows = phase::phase_sweep(&args, &Calibration::embedded(), &out)?;
            let mut ok = true;
            for r in &rows {
                println!(
                    "alpha={} beta={} region={} speed={:?} fluct={:?} agree={:?} ({})",
                    r.alpha, r.beta, r.predicted, r.speed_exponent, r.fluct_exponent, r.agree,
                    r.status
                );
                ok &= r.agree.unwrap_or(true) && !r.status.starts_with("error");
            }
            println!("wrote {}", out.join("phase.csv").display());
            Ok(ok)
        }
        Command::Limits {
            cfg: args,
            law,
            samples,
            tol,
        } => {
            let (cfg, out_dir) = load_config(&args)?;
            let law: limits_cmd::LawName = law.parse().map_err(CmdError::Invalid)?;
            let path = limits_cmd::limits(&cfg, law, samples, tol, &out_dir)?;
            println!("wrote {}", path.display());
            Ok(true)
        }
        Command::Validate {
            suite,
            seed,
            out,
            calibrate,
            calibration,
        } => {
            let cal = match calibration {
                Some(path) => Calibration::from_file(&path).map_err(CmdError::Invalid)?,
                None => Calibration::embedded(),
            };
            let outcome = validate::validate(suite.as_deref(), seed, calibrate, cal, &out)?;
            for line in &outcome.lines {
                println!("{line}");
            }
            Ok(outcome.all_pass)
        }
        Command::ConjectureMin(args) => {
            let (cfg, out_dir) = load_config(&args)?;
            let report = conjecture::conjecture_min(&cfg, &out_dir)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report"));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::from(deposim_cli::EXIT_OK as u8),
        Ok(false) => ExitCode::from(deposim_cli::EXIT_ASSERTION as u8),
        Err(CmdError::Invalid(msg)) => {
            eprintln!("{}", out::error_json("invalid-input", &msg));
            ExitCode::from(deposim_cli::EXIT_INVALID as u8)
        }
        Err(CmdError::Runtime(msg)) => {
            eprintln!("{}", out::error_json("runtime", &msg));
            ExitCode::from(deposim_cli::EXIT_ASSERTION as u8)
        }
    }
}
