//! `glq`: Galerkin double surface integrals of `1/|x - y|` over triangle pairs.

mod converge;
mod eval;
mod input;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use glq_core::Config;

#[derive(Parser)]
#[command(name = "glq", version, about = "Analytical Galerkin BEM integrals for the Laplace kernel")]
struct Cli {
    /// Relative tolerance for coincident vertices.
    #[arg(long, global = true, env = "GLQ_TOL_TOUCH", default_value_t = 1e-12)]
    tol_touch: f64,
    /// Planes are parallel below this tilt angle.
    #[arg(long, global = true, env = "GLQ_TOL_PARALLEL", default_value_t = 1e-12)]
    tol_parallel: f64,
    /// Worker threads (0 picks the number of cores).
    #[arg(long, global = true, env = "GLQ_THREADS", default_value_t = 0)]
    threads: usize,
    #[arg(long, global = true, env = "GLQ_FORMAT", value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate L, M, L' and M' for every pair of a JSON or CSV file.
    Eval {
        input: PathBuf,
        /// Output file (standard output when absent).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Stop at the first record that fails instead of reporting all.
        #[arg(long)]
        fail_fast: bool,
    },
    /// Compare against the reference benchmark values and the quadrature oracle.
    Validate {
        /// Absolute tolerance for benchmark values.
        #[arg(long, env = "GLQ_TOL", default_value_t = 1e-12)]
        tol: f64,
        /// Relative tolerance for the quadrature cross-checks.
        #[arg(long, env = "GLQ_ORACLE_TOL", default_value_t = 1e-10)]
        oracle_tol: f64,
    },
    /// Sweep the near-touching benchmark offsets and fit convergence slopes.
    Converge {
        #[arg(long, value_enum)]
        kind: converge::Kind,
        #[arg(long, default_value_t = 1e-6)]
        eps_min: f64,
        #[arg(long, default_value_t = 1e-2)]
        eps_max: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Why a command did not succeed.
pub enum Failure {
    /// Exit code 1.
    Validation,
    /// Exit code 2.
    Input(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into())
    }
}

pub fn writer(path: &Option<PathBuf>) -> anyhow::Result<Box<dyn std::io::Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).map_err(|e| anyhow::anyhow!("{}: {e}", p.display()))?,
        )),
        None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
    })
}

/// Scientific notation with 17 significant digits, enough to read back the
/// same double.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn run(cli: Cli) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    let cfg = Config { touch: cli.tol_touch, parallel: cli.tol_parallel, ..Config::default() };
    match cli.command {
        Command::Eval { input, output, fail_fast } => eval::run(&input, &output, fail_fast, cli.format, &cfg),
        Command::Validate { tol, oracle_tol } => validate::run(tol, oracle_tol, cli.format, &cfg),
        Command::Converge { kind, eps_min, eps_max, points, output } => {
            converge::run(kind, eps_min, eps_max, points, &output, cli.format, &cfg)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
