use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use compsolve::Method;
use compsolve_cli::{
    exit_code, parse_choices, run_robustness, run_single, run_table2, CliError, Ksp, OutputFormat, Pc, ProblemKind,
    RunSpec, SolverChoice, TABLE2_DEFAULT,
};

/// Active-set complementarity solvers: benchmark harness.
///
/// Without a subcommand, runs a single solve and prints its report.
#[derive(Parser)]
#[command(name = "compsolve", version)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem under several linear-solver configurations.
    Table2 {
        /// Comma-separated list of `lu` and `cg+<pc>` entries.
        #[arg(long, default_value = "lu,cg+ilu0,cg+bjacobi")]
        configs: String,
    },
    /// Run both methods over the bundled certified suite.
    Robustness {
        /// Linear solver, `lu` or `cg+<pc>`; suite Jacobians may be nonsymmetric.
        #[arg(long, default_value = "lu")]
        solver: SolverChoice,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, global = true, value_enum, default_value = "jbearing")]
    problem: ProblemKind,
    #[arg(long, global = true, default_value_t = 100)]
    nx: usize,
    #[arg(long, global = true, default_value_t = 100)]
    ny: usize,
    /// Journal bearing eccentricity, in (0, 1).
    #[arg(long, global = true, default_value_t = 0.9)]
    ecc: f64,
    /// Journal bearing half height.
    #[arg(long, global = true, default_value_t = 10.0)]
    b: f64,
    /// Torsion load.
    #[arg(long, global = true, default_value_t = 5.0)]
    c: f64,
    /// Combustion parameter, in (0, 6.8).
    #[arg(long, global = true, default_value_t = 5.0)]
    lambda: f64,
    /// Random LCP size.
    #[arg(long, global = true, default_value_t = 8)]
    n: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// assm (semismooth) or rsls (reduced space).
    #[arg(long, global = true, default_value = "assm")]
    method: Method,
    #[arg(long, global = true, value_enum, default_value = "cg")]
    ksp: Ksp,
    #[arg(long, global = true, value_enum, default_value = "ilu0")]
    pc: Pc,
    #[arg(long, global = true, default_value_t = compsolve::linalg::DEFAULT_BLOCK_COUNT)]
    blocks: usize,
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 100)]
    max_solves: usize,
    #[arg(long, global = true, default_value_t = 1e-2)]
    inner_rtol: f64,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: OutputFormat,
    /// Write the solution as `i,j,xi1,xi2,value` CSV.
    #[arg(long, global = true)]
    dump_solution: Option<PathBuf>,
    /// Write the final Jacobian in MatrixMarket format.
    #[arg(long, global = true)]
    dump_matrix: Option<PathBuf>,
}

impl From<RunArgs> for RunSpec {
    fn from(a: RunArgs) -> Self {
        RunSpec {
            problem: a.problem,
            nx: a.nx,
            ny: a.ny,
            ecc: a.ecc,
            b: a.b,
            c: a.c,
            lambda: a.lambda,
            n: a.n,
            seed: a.seed,
            method: a.method,
            ksp: a.ksp,
            pc: a.pc,
            blocks: a.blocks,
            tol: a.tol,
            max_solves: a.max_solves,
            inner_rtol: a.inner_rtol,
            format: a.format,
            dump_solution: a.dump_solution,
            dump_matrix: a.dump_matrix,
        }
    }
}

fn emit<T: serde::Serialize>(format: OutputFormat, value: &T, csv: impl FnOnce() -> String) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => out.write_all(csv().as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let spec = RunSpec::from(cli.run);
    match cli.command {
        None => {
            let outcome = run_single(&spec)?;
            let doc = &outcome.document;
            emit(spec.format, doc, || doc.to_csv())?;
            Ok(exit_code(doc.report.status))
        }
        Some(Command::Table2 { configs }) => {
            let choices: Vec<SolverChoice> = if configs.is_empty() {
                TABLE2_DEFAULT.to_vec()
            } else {
                parse_choices(&configs)?
            };
            let table = run_table2(&spec, &choices)?;
            emit(spec.format, &table, || table.to_csv())?;
            Ok(table
                .rows
                .iter()
                .map(|r| exit_code(r.status))
                .find(|&c| c != 0)
                .unwrap_or(0))
        }
        Some(Command::Robustness { solver }) => {
            let report = run_robustness(&spec.solver_config(), solver, spec.blocks)?;
            emit(spec.format, &report, || report.to_csv())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
