use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use owlball::experiment::{run_experiment, ExperimentConfig, OutputFormat, Solver};
use owlball::io::{read_vector, write_vector};
use owlball::{project_ball, Error, Instance, RootfindParams, SsnParams, Weights};

/// Projection onto the ordered weighted l1 norm ball.
#[derive(Debug, Parser)]
#[command(name = "owlball", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time the Newton projector against the root-finding baseline.
    Bench(BenchArgs),
    /// Project one vector read from disk.
    Project(ProjectArgs),
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [10_000, 100_000, 1_000_000])]
    n: Vec<usize>,
    /// Standard deviations of the entries of b, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1.0, 1e3])]
    sigma: Vec<f64>,
    /// Radius fractions tau / kappa(b), comma separated, each in (0, 1).
    #[arg(long, value_delimiter = ',', default_values_t = [1e-3, 1e-2, 1e-1, 0.5, 0.8])]
    beta: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Solvers to run: ssn, rootfind.
    #[arg(long, value_delimiter = ',', default_values_t = [Solver::Ssn, Solver::Rootfind])]
    solvers: Vec<Solver>,
    /// Newton stopping tolerance on the relative dual residual.
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
    /// Root-finder tolerance on the relative norm residual.
    #[arg(long, default_value_t = 1e-9)]
    rootfind_tol: f64,
    /// csv (one row per run) or md (per-cell averages).
    #[arg(long, default_value = "md")]
    format: OutputFormat,
    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 gives the cleanest timings.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    /// Point to project (.csv or .f64).
    #[arg(long)]
    input: PathBuf,
    /// Nonincreasing nonnegative weights (.csv or .f64).
    #[arg(long)]
    lambda: PathBuf,
    /// Ball radius.
    #[arg(long)]
    tau: f64,
    /// Output file (.csv or .f64).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-12)]
    eps: f64,
}

/// How a run ended, beyond plain success.
enum Failure {
    Usage(anyhow::Error),
    NotConverged(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let cfg = ExperimentConfig {
        n_list: args.n,
        sigma_list: args.sigma,
        beta_list: args.beta,
        reps: args.reps,
        seed: args.seed,
        solvers: args.solvers,
        eps: args.eps,
        rootfind: RootfindParams {
            tol: args.rootfind_tol,
            ..RootfindParams::default()
        },
        threads: args.threads,
    };
    let table = run_experiment(&cfg).context("benchmark failed")?;

    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match args.format {
        OutputFormat::Csv => table.write_csv(&mut sink),
        OutputFormat::Markdown => table.write_markdown(&mut sink),
    }
    .and_then(|_| sink.flush())
    .context("cannot write table")?;

    for c in table.cells.iter().filter(|c| c.gap_exceeded()) {
        eprintln!(
            "warning: objective gap {:.1e} between solvers at beta={}, n={}, sigma={}",
            c.max_objective_gap.unwrap_or(f64::NAN),
            c.beta,
            c.n,
            c.sigma
        );
    }
    let failed = table.records.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        return Err(Failure::NotConverged(anyhow::anyhow!(
            "{failed} of {} solves did not converge",
            table.records.len()
        )));
    }
    Ok(())
}

fn project(args: ProjectArgs) -> Result<(), Failure> {
    let b =
        read_vector(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let lam =
        read_vector(&args.lambda).with_context(|| format!("reading {}", args.lambda.display()))?;
    let weights = Weights::new(lam).context("invalid weights")?;
    let inst = Instance::new(b, weights, args.tau).context("invalid instance")?;
    let params = SsnParams {
        eps: args.eps,
        ..SsnParams::default()
    };
    let result = match project_ball(&inst, &params) {
        Ok(r) => r,
        Err(e @ Error::NotConverged { .. }) => {
            return Err(Failure::NotConverged(anyhow::Error::new(e)))
        }
        Err(e) => return Err(anyhow::Error::new(e).context("projection failed").into()),
    };
    write_vector(&args.out, &result.x)
        .with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(r) = result.report() {
        eprintln!(
            "{} iterations, eta = {:.1e}, y = {:e}",
            r.iterations, r.residual_eta, r.y_star
        );
    } else {
        eprintln!("input already inside the ball");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match cli.command {
        Command::Bench(args) => bench(args),
        Command::Project(args) => project(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
