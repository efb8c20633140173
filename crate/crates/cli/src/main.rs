use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use ore_cli::{
    parse_complex, resolve_spec, run_jordan, run_ore_check, run_stability, run_volterra, write_outputs, AnalysisReport,
    Config, DEFAULT_OUT_DIR, OUT_DIR_ENV,
};
use ore_core::operators::volterra::{DEFAULT_GRID, DEFAULT_NMAX};
use ore_core::Execution;

const EXIT_CHECKS_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "orex", version, about = "Analytic Ore extensions for [x, y] = h(y)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Zeros, orders and exponents of h, stability certificates and the main relation.
    Analyze(Common),
    /// Stability certificates for delta_0 = h d/dy at each zero.
    Stability(Common),
    /// Checks [x, y] = h(y) and the intertwining mu.delta_0 = delta.mu.
    OreCheck(Common),
    /// n! |V^n| for the Volterra operator, written as CSV.
    Volterra(VolterraArgs),
    /// Finite-dimensional pairs with Y a Jordan block.
    Jordan(JordanArgs),
    /// Every suite: analyze, volterra and jordan.
    Report(ReportArgs),
}

#[derive(Args)]
struct VolterraArgs {
    /// Volterra grid points.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Largest power of V.
    #[arg(long, default_value_t = DEFAULT_NMAX)]
    nmax: usize,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    out: PathBuf,
    /// Run on the current thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct FunctionArgs {
    /// h as an expression in y (e.g. "z(z-1)^2") or inline JSON.
    #[arg(long = "h", conflicts_with = "spec", required_unless_present = "spec")]
    h: Option<String>,
    /// Path to a JSON function spec.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    function: FunctionArgs,
    /// Series order.
    #[arg(long = "N", default_value_t = 64)]
    order: usize,
    /// Largest x-degree in the main-relation check.
    #[arg(long, default_value_t = 4)]
    xdeg: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random trials per stability certificate.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Tolerance for the main relation (or the Jordan residual).
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = DEFAULT_OUT_DIR)]
    out: PathBuf,
    /// Run on the current thread only.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct JordanArgs {
    #[command(flatten)]
    common: Common,
    /// Eigenvalue of Y, e.g. "0" or "3.14159i". Defaults to every zero of h.
    #[arg(long)]
    lambda: Option<String>,
    /// Matrix dimension.
    #[arg(long, default_value_t = 4)]
    dim: usize,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    jordan: JordanArgs,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = DEFAULT_NMAX)]
    nmax: usize,
}

impl Common {
    fn config(&self) -> Config {
        Config {
            order: self.order,
            x_degree: self.xdeg,
            seed: self.seed,
            trials: self.trials,
            tol: self.tol,
            ..Config::default()
        }
    }

    fn exec(&self) -> Execution {
        if self.sequential { Execution::Sequential } else { Execution::Parallel }
    }

    fn start(&self, name: &str, config: Config) -> Result<(AnalysisReport, ore_core::FunctionModel)> {
        let spec = resolve_spec(self.function.h.as_deref(), self.function.spec.as_deref())?;
        let mut report = AnalysisReport::new(name, config);
        let model = report.load_function(spec)?;
        Ok((report, model))
    }
}

fn run(cli: Cli) -> Result<(AnalysisReport, PathBuf)> {
    match cli.command {
        Command::Analyze(c) => {
            let (mut report, h) = c.start("analyze", c.config())?;
            run_stability(&mut report, &h, c.exec())?;
            run_ore_check(&mut report, &h)?;
            Ok((report, c.out))
        }
        Command::Stability(c) => {
            let (mut report, h) = c.start("stability", c.config())?;
            run_stability(&mut report, &h, c.exec())?;
            Ok((report, c.out))
        }
        Command::OreCheck(c) => {
            let (mut report, h) = c.start("ore-check", c.config())?;
            run_ore_check(&mut report, &h)?;
            Ok((report, c.out))
        }
        Command::Volterra(v) => {
            let config = Config {
                grid: Some(v.grid),
                nmax: Some(v.nmax),
                ..Config::default()
            };
            let mut report = AnalysisReport::new("volterra", config);
            let exec = if v.sequential { Execution::Sequential } else { Execution::Parallel };
            run_volterra(&mut report, v.grid, v.nmax, exec)?;
            Ok((report, v.out))
        }
        Command::Jordan(j) => {
            let lambda = j.lambda.as_deref().map(parse_complex).transpose()?;
            let config = Config {
                dim: Some(j.dim),
                lambda,
                ..j.common.config()
            };
            let (mut report, h) = j.common.start("jordan", config)?;
            run_jordan(&mut report, &h, lambda, j.dim)?;
            Ok((report, j.common.out))
        }
        Command::Report(r) => {
            let j = r.jordan;
            let c = &j.common;
            let lambda = j.lambda.as_deref().map(parse_complex).transpose()?;
            let config = Config {
                dim: Some(j.dim),
                lambda,
                grid: Some(r.grid),
                nmax: Some(r.nmax),
                ..c.config()
            };
            let (mut report, h) = c.start("report", config)?;
            run_stability(&mut report, &h, c.exec())?;
            run_ore_check(&mut report, &h)?;
            run_volterra(&mut report, r.grid, r.nmax, c.exec())?;
            run_jordan(&mut report, &h, lambda, j.dim)?;
            Ok((report, j.common.out))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out) = match run(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let written = match write_outputs(&out, &report.command, &report) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match report.to_json() {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    for note in &report.diagnostics {
        eprintln!("{note}");
    }
    let failures = report.failures();
    if failures.is_empty() {
        eprintln!("all {} checks passed", report.checks.len());
        ExitCode::SUCCESS
    } else {
        for f in failures {
            eprintln!("FAILED {}: {:e} (limit {:e})", f.name, f.value, f.limit);
        }
        ExitCode::from(EXIT_CHECKS_FAILED)
    }
}
