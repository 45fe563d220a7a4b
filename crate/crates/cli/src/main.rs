use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biharm::harness::{self, EpsGrid, EpsSpec, FSpec, LambdaSpec, RunConfig};
use biharm::{Error, Execution, SolverConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "biharm",
    version,
    about = "Two solutions of a forced biharmonic Dirichlet problem on a weighted graph"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph file and print domain diagnostics.
    Check { graph: PathBuf },
    /// Print λ₁, τ, embedding bounds, ‖f‖ and the ε threshold as JSON.
    Constants {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute and certify both solutions at one ε.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number, `eps1`, or `c*eps1`.
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run the solver over a grid of ε values.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        /// MIN:MAX:COUNT:log|lin; endpoints accept `eps1` and `c*eps1`.
        #[arg(long)]
        eps_grid: String,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_json: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Absolute value or a multiple of λ₁, e.g. `0.5*lambda1`.
    #[arg(long, default_value = "0.5*lambda1", allow_hyphen_values = true)]
    lambda: String,
    #[arg(long)]
    p: f64,
    /// `const:c`, `vertex:ID:c`, or a JSON file of per-vertex values.
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Disable rayon even when built with the `parallel` feature.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 64)]
    path_nodes: usize,
}

impl ProblemArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::new(
            &self.graph,
            self.lambda.parse::<LambdaSpec>()?,
            self.p,
            self.f.parse::<FSpec>()?,
        );
        cfg.solver.seed = self.seed;
        if self.sequential {
            cfg.execution = Execution::Sequential;
        }
        Ok(cfg)
    }
}

impl SolverArgs {
    fn apply(&self, solver: &mut SolverConfig) {
        solver.tol = self.tol;
        solver.max_iter = self.max_iter;
        solver.path_nodes = self.path_nodes;
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_solver_failure() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn check(graph: &Path) -> ExitCode {
    match harness::check_graph(graph) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn constants(problem: &ProblemArgs, out: Option<&Path>) -> Result<ExitCode, Error> {
    let report = harness::run_constants(&problem.config()?)?;
    let json = serde_json::to_string_pretty(&report).expect("constants serialize");
    match out {
        Some(path) => write(path, &json)?,
        None => println!("{json}"),
    }
    if report.constants.tau <= 0.0 {
        eprintln!(
            "WARNING: lambda = {} >= lambda1 = {}; tau = {} <= 0 and no threshold exists",
            report.constants.lambda, report.constants.lambda1, report.constants.tau
        );
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn solve(
    problem: &ProblemArgs,
    eps: &str,
    out: &Path,
    solver: &SolverArgs,
) -> Result<ExitCode, Error> {
    let mut cfg = problem.config()?;
    cfg.eps = Some(eps.parse::<EpsSpec>()?);
    solver.apply(&mut cfg.solver);
    let (_, _, report) = harness::run_solve(&cfg)?;
    write(out, &report.to_json())?;
    let cert = &report.certificate;
    println!(
        "J(u0) = {:e}  J(uc) = {:e}  certified = {}",
        report.local_min.energy, report.mountain_pass.energy, cert.certified
    );
    for note in &report.notes {
        println!("note: {note}");
    }
    if !cert.in_regime {
        println!("uncertified: eps outside the guaranteed regime");
        return Ok(ExitCode::SUCCESS);
    }
    if cert.certified {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "certificate failed: local_min = {}, mountain_pass = {}, distinct = {}",
            cert.local_min, cert.mountain_pass, cert.distinct
        );
        Ok(ExitCode::from(2))
    }
}

fn sweep(
    problem: &ProblemArgs,
    grid: &str,
    out_csv: &Path,
    out_json: &Path,
    solver: &SolverArgs,
) -> Result<ExitCode, Error> {
    let mut cfg = problem.config()?;
    cfg.eps_grid = Some(grid.parse::<EpsGrid>()?);
    solver.apply(&mut cfg.solver);
    let summary = harness::run_sweep(&cfg)?;
    let mut csv = Vec::new();
    harness::write_csv(&summary.rows, &mut csv)?;
    write(out_csv, &String::from_utf8(csv).expect("csv is utf-8"))?;
    write(
        out_json,
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    println!(
        "{}/{} rows certified; largest certified eps = {:?}; eps1_hat = {:?}",
        summary.certified_rows, summary.row_count, summary.largest_certified_eps, summary.eps1_hat
    );
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { graph } => return check(graph),
        Command::Constants { problem, out } => constants(problem, out.as_deref()),
        Command::Solve {
            problem,
            eps,
            out,
            solver,
        } => solve(problem, eps, out, solver),
        Command::Sweep {
            problem,
            eps_grid,
            out_csv,
            out_json,
            solver,
        } => sweep(problem, eps_grid, out_csv, out_json, solver),
    };
    result.unwrap_or_else(|e| fail(&e))
}
