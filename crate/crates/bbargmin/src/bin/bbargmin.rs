use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bbargmin::experiments::{emit_stats, run_experiment, Convention, ExperimentConfig, Format};
use bbargmin::figures::write_figure_csv;
use bbargmin::validation::{run_suite, write_report, Suite, ValidationConfig};
use bbargmin::{Error, Result};
use bbargmin_core::{run_coupled, LazyBridgePath, RunParams, RunResult, SeededNoise, Verdict};
use clap::{Args, Parser, Subcommand};

/// Online search for the minimum of a periodic Brownian path.
#[derive(Debug, Parser)]
#[command(name = "bbargmin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the search once and print its transcript.
    ///
    /// Exit status: 0 green, 2 aborted by a certificate, 1 on bad input.
    Run(RunArgs),
    /// Run a Monte Carlo experiment over a grid of (d, N).
    Experiment(ExperimentArgs),
    /// Run a validation suite and write a JSON report.
    ///
    /// Exit status: 0 if every check passes, 3 if any check fails, 1 on bad
    /// input.
    Validate(ValidateArgs),
    /// Write the plot data of the two reference runs.
    Figures(FiguresArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Grid depth (at least 3).
    #[arg(long)]
    d: u32,
    /// Zoom levels.
    #[arg(long = "N", value_name = "N")]
    n: u32,
    /// Path seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Midpoint-noise convention.
    #[arg(long, value_enum, default_value_t = Convention::VarianceConsistent)]
    convention: Convention,
    /// Also run the sub-interval minimum certificate.
    #[arg(long, default_value_t = false)]
    cert2: bool,
    /// Figure-data CSV to write [default: none].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// TOML or JSON config; replaces --d, --N, --trials and --seed.
    #[arg(long, conflicts_with_all = ["d", "n", "trials", "seed"])]
    config: Option<PathBuf>,
    /// Comma-separated grid depths.
    #[arg(long, value_delimiter = ',', default_value = "8,10,12,14")]
    d: Vec<u32>,
    /// Comma-separated zoom level counts.
    #[arg(
        long = "N",
        value_name = "N",
        value_delimiter = ',',
        default_value = "4"
    )]
    n: Vec<u32>,
    /// Trials per (d, N).
    #[arg(long, required_unless_present = "config")]
    trials: Option<u64>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Extra oracle levels beyond d + N [default: config value, else 2].
    #[arg(long)]
    extra_levels: Option<u32>,
    /// Midpoint-noise convention [default: config value, else variance-consistent].
    #[arg(long, value_enum)]
    convention: Option<Convention>,
    /// Skip the sub-interval minimum certificate.
    #[arg(long, default_value_t = false)]
    no_cert2: bool,
    /// Worker threads, 0 for all cores [default: config value, else 0].
    #[arg(long)]
    workers: Option<usize>,
    /// Record per-row wall time (makes output run-dependent).
    #[arg(long, default_value_t = false)]
    timing: bool,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Statistics file [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// bridge, bessel, vervaat, pitman, certificate2 or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Suite seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// JSON report [default: stdout].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FiguresArgs {
    /// Path seed for both runs.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Directory receiving fig1.csv (d = 14, N = 4) and fig2.csv (d = 7, N = 4, with m-values).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn coupled_run(
    d: u32,
    n: u32,
    seed: u64,
    convention: Convention,
    cert2: bool,
) -> Result<RunResult> {
    if d < 3 {
        return Err(Error::Invalid(format!("d must be ≥ 3 (got {d})")));
    }
    let mut params = RunParams::new(d, n);
    params.convention = convention.into();
    params.certificate2 = cert2;
    let mut path = LazyBridgePath::with_config(
        SeededNoise::new(seed),
        params.convention,
        bbargmin_core::DEFAULT_MAX_LEVEL,
    );
    Ok(run_coupled(&params, &mut path)?)
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Green => "green",
        Verdict::RedX => "red-x",
    }
}

fn cmd_run(a: RunArgs) -> Result<ExitCode> {
    let start = Instant::now();
    let r = coupled_run(a.d, a.n, a.seed, a.convention, a.cert2)?;
    let elapsed = start.elapsed();
    let mut out = io::stdout().lock();
    writeln!(out, "d = {}, N = {}, seed = {}", a.d, a.n, a.seed)?;
    for (i, t) in r.t_stars.iter().enumerate() {
        writeln!(out, "t*_{i} = {t}")?;
    }
    writeln!(out, "U = {} ({})", r.estimate_f64(), r.estimate)?;
    writeln!(out, "certificate 1: {}", verdict(r.cert1))?;
    if let Some(v) = r.cert2 {
        writeln!(out, "certificate 2: {}", verdict(v))?;
    }
    if let Some(level) = r.abort_level() {
        writeln!(out, "aborted at level {level}")?;
    }
    writeln!(out, "bridge values generated: {}", r.gaussians_consumed)?;
    eprintln!("wall time: {:.6} s", elapsed.as_secs_f64());
    if let Some(path) = &a.out {
        write_figure_csv(&r, File::create(path)?)?;
    }
    Ok(if r.is_green() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_experiment(a: ExperimentArgs) -> Result<ExitCode> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(a.d, a.n, a.trials.unwrap_or(0), a.seed),
    };
    if let Some(x) = a.extra_levels {
        cfg.oracle_extra_levels = x;
    }
    if let Some(c) = a.convention {
        cfg.convention = c;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    cfg.certificate2 &= !a.no_cert2;
    cfg.record_wall_time |= a.timing;
    let stats = run_experiment(&cfg)?;
    emit_stats(&stats, a.format, sink(a.out.as_deref())?)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(a: ValidateArgs) -> Result<ExitCode> {
    let suite = Suite::parse(&a.suite).ok_or_else(|| {
        Error::Invalid(format!(
            "unknown suite {:?} (expected bridge, bessel, vervaat, pitman, certificate2 or all)",
            a.suite
        ))
    })?;
    let cfg = ValidationConfig {
        seed: a.seed,
        ..ValidationConfig::default()
    };
    let report = run_suite(suite, &cfg)?;
    let mut out = sink(a.out.as_deref())?;
    write_report(&report, &mut out)?;
    writeln!(out)?;
    out.flush()?;
    for c in report.iter().filter(|c| !c.pass) {
        eprintln!(
            "FAIL {}: empirical {} vs {} (tolerance {})",
            c.name, c.empirical, c.analytic_or_bound, c.tolerance
        );
    }
    Ok(if report.iter().all(|c| c.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn cmd_figures(a: FiguresArgs) -> Result<ExitCode> {
    std::fs::create_dir_all(&a.out_dir)?;
    for (name, d, cert2) in [("fig1.csv", 14, false), ("fig2.csv", 7, true)] {
        let r = coupled_run(d, 4, a.seed, Convention::VarianceConsistent, cert2)?;
        let rows = write_figure_csv(&r, File::create(a.out_dir.join(name))?)?;
        let status = if r.is_green() { "green" } else { "aborted" };
        println!("{name}: d = {d}, N = 4, {rows} rows, {status}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Figures(a) => cmd_figures(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}
