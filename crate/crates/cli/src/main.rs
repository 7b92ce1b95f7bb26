//! `mmlab`: command-line front end for the spectral laboratory.
//!
//! Every subcommand takes the same flat flag set; a JSON config file
//! may supply any subset of the same keys, with flags winning. All
//! randomness derives from `--seed` through per-replication streams,
//! so reruns are byte-identical.

use clap::{Args, Parser, Subcommand};
use mmlab::config::{load_config_file, ConfigFile, ExperimentConfig};
use mmlab::run;
use mmlab::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "mmlab",
    version,
    about = "Spectral laboratory for random distance matrices of metric measure triples",
    after_help = "Exit codes: 0 success, 1 failed check, 2 invalid input, \
3 unsupported triple, 4 insufficient data."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample distance-matrix minors, written as CSV and binary
    Sample(CommonArgs),
    /// Per-replication eigenvalue CSVs, optional pooled histogram SVG
    Spectrum(CommonArgs),
    /// Replicated trace statistic with a Levy fit or concentration report
    TraceDist(CommonArgs),
    /// Operator spectrum by Nystrom quadrature (plus analytic circle)
    Operator(CommonArgs),
    /// Growth exponent of tr M^2 across minor orders
    Growth(CommonArgs),
    /// Self-check suite: metric axioms, identities, invariances
    Check(CommonArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Triple name: cauchy-line | unit-interval | circle | sphere:<d>
    #[arg(long)]
    triple: Option<String>,

    /// Minor order (points per replication)
    #[arg(long)]
    n: Option<usize>,

    /// Comma-separated minor orders for the growth fit
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,

    /// Number of replications
    #[arg(long)]
    reps: Option<usize>,

    /// Master seed; replication r runs on stream (seed, r)
    #[arg(long)]
    seed: Option<u64>,

    /// Spectral normalization: raw | n | n^<beta>
    #[arg(long)]
    normalization: Option<String>,

    /// Shorthand for --normalization n^<beta>
    #[arg(long, conflicts_with = "normalization")]
    beta: Option<f64>,

    /// Quadrature grid for the Nystrom operator spectrum
    #[arg(long)]
    grid: Option<usize>,

    /// Frequency cutoff for the analytic circle spectrum
    #[arg(long)]
    kmax: Option<usize>,

    /// Leading eigenvalues compared in operator reports
    #[arg(long)]
    top: Option<usize>,

    /// Output directory (created if missing)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Emit SVG plots alongside the data files
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    plots: Option<bool>,

    /// JSON config file with the same keys; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(self) -> Result<ExperimentConfig, Error> {
        let flags = ConfigFile {
            triple: self.triple,
            n: self.n,
            orders: self.orders,
            reps: self.reps,
            seed: self.seed,
            normalization: self.normalization,
            beta: self.beta,
            grid: self.grid,
            kmax: self.kmax,
            top: self.top,
            out: self.out.map(|p| p.to_string_lossy().into_owned()),
            plots: self.plots,
        };
        let layered = match &self.config {
            Some(path) => flags.over(load_config_file(path)?),
            None => flags,
        };
        ExperimentConfig::resolve(layered)
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::UnsupportedTriple(_) => 3,
        Error::InsufficientData(_) => 4,
        Error::InvalidInput(_) | Error::NumericDegeneracy(_) | Error::Io(_) => 2,
    }
}

fn run_files(
    cmd: fn(&ExperimentConfig) -> mmlab::Result<Vec<PathBuf>>,
    args: CommonArgs,
) -> Result<(), Error> {
    let cfg = args.resolve()?;
    for path in cmd(&cfg)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn run_check(args: CommonArgs) -> Result<bool, Error> {
    let cfg = args.resolve()?;
    let results = run::cmd_check(&cfg)?;
    let mut all_passed = true;
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("check {} [{}]: {tag} ({})", r.name, r.triple, r.detail);
        all_passed &= r.passed;
    }
    Ok(all_passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Sample(args) => run_files(run::cmd_sample, args),
        Command::Spectrum(args) => run_files(run::cmd_spectrum, args),
        Command::TraceDist(args) => run_files(run::cmd_trace_dist, args),
        Command::Operator(args) => run_files(run::cmd_operator, args),
        Command::Growth(args) => run_files(run::cmd_growth, args),
        Command::Check(args) => {
            return match run_check(args) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(err) => {
                    eprintln!("error: {err}");
                    ExitCode::from(exit_code_for(&err))
                }
            }
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
