use clap::{Args, Parser, Subcommand, ValueEnum};
use cli::{parse_complex, run, write_artifacts, CliError, Command, Engine, RunConfig, Suite};
use engines::{ContourSign, I6Variant, LSignPlacement};
use num_complex::Complex64;
use std::path::PathBuf;
use std::process::ExitCode;

/// n-level correlations of CUE eigenphases: sampling, ratios, J* and the correlation engines.
///
/// Exit codes: 0 success, 2 invalid configuration or output path, 3 numerical failure
/// (engine precondition, quadrature failure, or a failing validation suite).
#[derive(Parser, Debug)]
#[command(name = "ncorr", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// TOML configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; falls back to the configuration file, then to $NCORR_OUT_DIR, then to ".".
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// File name stem of the artifacts.
    #[arg(long, global = true)]
    prefix: Option<String>,
    /// Number of points n.
    #[arg(long = "n", global = true)]
    n: Option<usize>,
    /// Matrix size N.
    #[arg(long = "N", global = true)]
    matrix_size: Option<usize>,
    /// Slow scale 𝒯.
    #[arg(long = "T", global = true)]
    slow_scale: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Support budget of Φ.
    #[arg(long, global = true)]
    budget: Option<f64>,
    #[arg(long, global = true)]
    bump_half_width: Option<f64>,
    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    l_sign: Option<LSignArg>,
    #[arg(long, global = true)]
    q3_factor_two: Option<bool>,
    #[arg(long, global = true, value_enum)]
    i6_variant: Option<I6Arg>,
    #[arg(long, global = true, value_enum)]
    contour_sign: Option<ContourSignArg>,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Draw Haar eigenphases and export them.
    Sample,
    /// Histogram of scaled eigenphase differences against the sine-kernel limit.
    Paircorr {
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        r_max: Option<f64>,
    },
    /// Monte Carlo and closed form of the two-over-two ratio average.
    Ratios {
        #[arg(long, value_parser = parse_complex)]
        alpha: Option<Complex64>,
        #[arg(long, value_parser = parse_complex)]
        beta: Option<Complex64>,
        #[arg(long, value_parser = parse_complex)]
        gamma: Option<Complex64>,
        #[arg(long, value_parser = parse_complex)]
        delta: Option<Complex64>,
    },
    /// Evaluate J* and its terms.
    Jstar {
        /// Shift in A, as `re` or `re,im`; repeat for more.
        #[arg(long, value_parser = parse_complex)]
        a: Vec<Complex64>,
        /// Shift in B, as `re` or `re,im`; repeat for more.
        #[arg(long, value_parser = parse_complex)]
        b: Vec<Complex64>,
        #[arg(long)]
        truncation: Option<usize>,
    },
    /// Evaluate the n-level statistic with one engine.
    Ncorr {
        #[arg(long, value_enum)]
        engine: Option<Engine>,
        /// Layer of the integral formula.
        #[arg(long)]
        q: Option<usize>,
        /// Use the direct empirical sum with this periodic-shift window.
        #[arg(long)]
        window: Option<usize>,
        /// Real part of the contour lines.
        #[arg(long)]
        contour_delta: Option<f64>,
        /// Truncation height of the contour lines.
        #[arg(long)]
        height: Option<f64>,
    },
    /// Run a validation suite and print a pass/fail table.
    Validate {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LSignArg {
    SecondBlock,
    WholeBrace,
    Omitted,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum I6Arg {
    Displayed,
    WithL2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ContourSignArg {
    AsPrinted,
    Unsigned,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn build_config(cli: Cli) -> Result<RunConfig, CliError> {
    let g = cli.global;
    let mut cfg = match &g.config {
        Some(path) => RunConfig::from_toml_file(path)?,
        None => RunConfig::default(),
    };
    if g.out_dir.is_some() {
        cfg.output.dir = g.out_dir;
    }
    if g.prefix.is_some() {
        cfg.output.prefix = g.prefix;
    }
    set(&mut cfg.n, g.n);
    set(&mut cfg.matrix_size, g.matrix_size);
    if g.slow_scale.is_some() {
        cfg.slow_scale = g.slow_scale;
    }
    set(&mut cfg.seed, g.seed);
    set(&mut cfg.samples, g.samples);
    set(&mut cfg.budget, g.budget);
    set(&mut cfg.bump_half_width, g.bump_half_width);
    set(&mut cfg.abs_tol, g.abs_tol);
    set(&mut cfg.rel_tol, g.rel_tol);
    set(
        &mut cfg.conventions.l_sign,
        g.l_sign.map(|s| match s {
            LSignArg::SecondBlock => LSignPlacement::SecondBlock,
            LSignArg::WholeBrace => LSignPlacement::WholeBrace,
            LSignArg::Omitted => LSignPlacement::Omitted,
        }),
    );
    set(&mut cfg.conventions.q3_factor_two, g.q3_factor_two);
    set(
        &mut cfg.conventions.i6_variant,
        g.i6_variant.map(|v| match v {
            I6Arg::Displayed => I6Variant::Displayed,
            I6Arg::WithL2 => I6Variant::WithL2,
        }),
    );
    set(
        &mut cfg.conventions.contour_sign,
        g.contour_sign.map(|s| match s {
            ContourSignArg::AsPrinted => ContourSign::AsPrinted,
            ContourSignArg::Unsigned => ContourSign::Unsigned,
        }),
    );
    match cli.command {
        Sub::Sample => cfg.command = Command::Sample,
        Sub::Paircorr { bins, r_max } => {
            cfg.command = Command::Paircorr;
            set(&mut cfg.bins, bins);
            set(&mut cfg.r_max, r_max);
        }
        Sub::Ratios { alpha, beta, gamma, delta } => {
            cfg.command = Command::Ratios;
            set(&mut cfg.alpha, alpha);
            set(&mut cfg.beta, beta);
            set(&mut cfg.gamma, gamma);
            set(&mut cfg.delta, delta);
        }
        Sub::Jstar { a, b, truncation } => {
            cfg.command = Command::Jstar;
            if !a.is_empty() || !b.is_empty() {
                cfg.a = a;
                cfg.b = b;
            }
            if truncation.is_some() {
                cfg.truncation = truncation;
            }
        }
        Sub::Ncorr { engine, q, window, contour_delta, height } => {
            cfg.command = Command::Ncorr;
            set(&mut cfg.engine, engine);
            if q.is_some() {
                cfg.q = q;
            }
            if window.is_some() {
                cfg.window = window;
            }
            set(&mut cfg.contour_delta, contour_delta);
            if height.is_some() {
                cfg.height = height;
            }
        }
        Sub::Validate { suite } => {
            cfg.command = Command::Validate;
            set(&mut cfg.suite, suite);
        }
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let cfg = build_config(cli)?;
    let report = run(&cfg)?;
    let paths = write_artifacts(&cfg.out_dir(), &report.artifacts)?;
    println!("{}", report.summary.trim_end());
    println!("config_hash: {}", report.config_hash);
    for p in paths {
        println!("wrote {}", p.display());
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("validation failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
