use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod spec;
mod verify;

#[derive(Parser, Debug)]
#[command(
    name = "resum",
    version,
    about = "Borel-Laplace summation over strongly regular sequences"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Relative tolerance for quadratures and fits.
    #[arg(long, global = true, default_value_t = 1e-10, value_parser = positive)]
    pub tol: f64,
    /// Table or moment depth.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub depth: Option<u64>,
    /// Directory for output files; without it every output goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for per-point evaluations.
    #[arg(long, global = true, env = "RESUM_WORKERS")]
    pub workers: Option<usize>,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

fn existing(s: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.exists() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Axioms, growth maps and order diagnostics of a sequence.
    Seq {
        #[arg(value_parser = existing)]
        spec: PathBuf,
    },
    /// Moments and validation of a kernel.
    Kernel {
        /// Kernel file or inline `tag:params`.
        spec: String,
        /// Sequence the kernel is validated against; defaults to its own moments.
        #[arg(long, value_parser = existing)]
        sequence: Option<PathBuf>,
    },
    /// Sums a formal series in a direction.
    Sum(SumArgs),
    /// Formal solution and classification of a moment PDE problem.
    Mpde {
        #[arg(value_parser = existing)]
        problem: PathBuf,
        /// Direction for the two-variable summability and data checks.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<f64>,
    },
    /// Cross-module identity suite.
    Verify {
        #[arg(long, default_value = "gevrey:1")]
        kernel: String,
        /// Perturbs the moment table so that identities relying on it break.
        #[arg(long)]
        inject_wrong_moments: bool,
        /// Runtime budget in seconds.
        #[arg(long, default_value_t = 60.0)]
        budget: f64,
    },
}

#[derive(Args, Debug)]
pub struct SumArgs {
    #[arg(long, value_parser = existing)]
    pub series: PathBuf,
    /// Kernel file or inline `tag:params`.
    #[arg(long)]
    pub kernel: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub direction: f64,
    /// `pade:M,N` or `closed:NAME`; near-diagonal rational approximant by default.
    #[arg(long)]
    pub method: Option<String>,
    /// Comma-separated points, e.g. `0.05,0.1+0.02i`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: String,
    #[arg(long, value_enum, default_value_t = Normalization::Monomial)]
    pub normalization: Normalization,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// The file holds `a_p` of `Σ a_p z^p`.
    Monomial,
    /// The file holds `f_p` of `Σ f_p z^p/p!`.
    Factorial,
}

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    VerdictFailed,
}

fn main() -> ExitCode {
    // Usage errors share exit code 1 with other operational errors; 2 is
    // reserved for failed verdicts.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(n) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let g = &cli.global;
    let result = match cli.command {
        Command::Seq { spec } => commands::run_seq(g, &spec),
        Command::Kernel { spec, sequence } => commands::run_kernel(g, &spec, sequence.as_deref()),
        Command::Sum(args) => commands::run_sum(g, &args),
        Command::Mpde { problem, direction } => commands::run_mpde(g, &problem, direction),
        Command::Verify {
            kernel,
            inject_wrong_moments,
            budget,
        } => verify::run_verify(g, &kernel, inject_wrong_moments, budget),
    };
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::VerdictFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
