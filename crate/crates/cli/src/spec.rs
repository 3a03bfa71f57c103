use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use compsolve::linalg::DEFAULT_DENSE_CAP;
use compsolve::problems::{
    combustion, journal_bearing, lcp_nonneg, obstacle, random_monotone_lcp, torsion, BearingParams, GridSpec,
    COMBUSTION_LAMBDA_MAX,
};
use compsolve::{LinearSolver, MCProblem, Method, PreconditionerKind, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Largest random LCP accepted from the command line (the matrix is dense).
pub const MAX_LCP_SIZE: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Jbearing,
    Obstacle,
    Torsion,
    Combustion,
    Lcp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Ksp {
    Cg,
    Lu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Pc {
    None,
    Jacobi,
    Ilu0,
    Bjacobi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// One linear-solver configuration: `lu` or `cg+<pc>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverChoice {
    pub ksp: Ksp,
    pub pc: Pc,
}

impl SolverChoice {
    pub const LU: SolverChoice = SolverChoice {
        ksp: Ksp::Lu,
        pc: Pc::None,
    };

    pub const fn cg(pc: Pc) -> Self {
        SolverChoice { ksp: Ksp::Cg, pc }
    }

    pub fn linear_solver(self, blocks: usize) -> LinearSolver {
        match self.ksp {
            Ksp::Lu => LinearSolver::lu(),
            Ksp::Cg => LinearSolver::cg(match self.pc {
                Pc::None => PreconditionerKind::Identity,
                Pc::Jacobi => PreconditionerKind::Jacobi,
                Pc::Ilu0 => PreconditionerKind::Ilu0,
                Pc::Bjacobi => PreconditionerKind::BlockJacobiIlu0(blocks),
            }),
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ksp {
            Ksp::Lu => f.write_str("lu"),
            Ksp::Cg => {
                let pc = match self.pc {
                    Pc::None => "none",
                    Pc::Jacobi => "jacobi",
                    Pc::Ilu0 => "ilu0",
                    Pc::Bjacobi => "bjacobi",
                };
                write!(f, "cg+{pc}")
            }
        }
    }
}

impl FromStr for SolverChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = || CliError::Spec(format!("unknown solver configuration {s:?} (expected lu or cg+<pc>)"));
        match s {
            "lu" => Ok(Self::LU),
            _ => {
                let pc = s.strip_prefix("cg+").ok_or_else(bad)?;
                let pc = <Pc as clap::ValueEnum>::from_str(pc, false).map_err(|_| bad())?;
                Ok(Self::cg(pc))
            }
        }
    }
}

/// Comma-separated list of [`SolverChoice`]s.
pub fn parse_choices(s: &str) -> Result<Vec<SolverChoice>, CliError> {
    let list: Vec<SolverChoice> = s.split(',').map(|t| t.trim().parse()).collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err(CliError::Spec("empty solver configuration list".into()));
    }
    Ok(list)
}

/// A fully specified run: problem, method, linear solver and output options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub problem: ProblemKind,
    pub nx: usize,
    pub ny: usize,
    pub ecc: f64,
    pub b: f64,
    pub c: f64,
    pub lambda: f64,
    pub n: usize,
    pub seed: u64,
    pub method: Method,
    pub ksp: Ksp,
    pub pc: Pc,
    pub blocks: usize,
    pub tol: f64,
    pub max_solves: usize,
    pub inner_rtol: f64,
    pub format: OutputFormat,
    pub dump_solution: Option<PathBuf>,
    pub dump_matrix: Option<PathBuf>,
}

impl Default for RunSpec {
    fn default() -> Self {
        let cfg = SolverConfig::default();
        Self {
            problem: ProblemKind::Jbearing,
            nx: 100,
            ny: 100,
            ecc: 0.9,
            b: 10.0,
            c: 5.0,
            lambda: 5.0,
            n: 8,
            seed: 0,
            method: Method::Assm,
            ksp: Ksp::Cg,
            pc: Pc::Ilu0,
            blocks: compsolve::linalg::DEFAULT_BLOCK_COUNT,
            tol: cfg.tol,
            max_solves: cfg.max_linear_solves,
            inner_rtol: cfg.inner_rtol,
            format: OutputFormat::Json,
            dump_solution: None,
            dump_matrix: None,
        }
    }
}

/// A constructed problem and its starting point.
pub struct BuiltProblem {
    pub problem: MCProblem,
    pub x0: Vec<f64>,
    pub grid: Option<GridSpec>,
}

impl RunSpec {
    pub fn choice(&self) -> SolverChoice {
        SolverChoice {
            ksp: self.ksp,
            pc: self.pc,
        }
    }

    pub fn dim(&self) -> usize {
        match self.problem {
            ProblemKind::Lcp => self.n,
            _ => self.nx.saturating_mul(self.ny),
        }
    }

    /// Rejects out-of-range parameters; runs before anything is built.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Spec(m));
        match self.problem {
            ProblemKind::Lcp => {
                if self.n == 0 || self.n > MAX_LCP_SIZE {
                    return bad(format!("--n must lie in 1..={MAX_LCP_SIZE}"));
                }
            }
            _ => {
                if self.nx == 0 || self.ny == 0 {
                    return bad("--nx and --ny must be positive".into());
                }
            }
        }
        match self.problem {
            ProblemKind::Jbearing => {
                if !(self.ecc > 0.0 && self.ecc < 1.0) {
                    return bad(format!("--ecc must lie in (0, 1), got {}", self.ecc));
                }
                if !(self.b > 0.0 && self.b.is_finite()) {
                    return bad(format!("--b must be positive, got {}", self.b));
                }
            }
            ProblemKind::Torsion if !self.c.is_finite() => return bad("--c must be finite".into()),
            ProblemKind::Combustion if !(self.lambda > 0.0 && self.lambda < COMBUSTION_LAMBDA_MAX) => {
                return bad(format!(
                    "--lambda must lie in (0, {COMBUSTION_LAMBDA_MAX}), got {}",
                    self.lambda
                ));
            }
            _ => {}
        }
        if self.blocks == 0 {
            return bad("--blocks must be positive".into());
        }
        if self.ksp == Ksp::Lu && self.dim() > DEFAULT_DENSE_CAP {
            return bad(format!(
                "--ksp lu supports at most {DEFAULT_DENSE_CAP} unknowns, got {}",
                self.dim()
            ));
        }
        if self.max_solves == 0 {
            return bad("--max-solves must be positive".into());
        }
        if !(self.inner_rtol > 0.0 && self.inner_rtol < 1.0) {
            return bad(format!("--inner-rtol must lie in (0, 1), got {}", self.inner_rtol));
        }
        self.solver_config()
            .validate()
            .map_err(|e| CliError::Spec(e.to_string()))
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            tol: self.tol,
            max_linear_solves: self.max_solves,
            inner_rtol: self.inner_rtol,
            ..SolverConfig::default()
        }
    }

    pub fn linear_solver(&self) -> LinearSolver {
        self.choice().linear_solver(self.blocks)
    }

    /// Builds the problem and its documented start (the projected zero vector).
    pub fn build(&self) -> Result<BuiltProblem, CliError> {
        self.validate()?;
        let (problem, grid) = match self.problem {
            ProblemKind::Jbearing => {
                let params = BearingParams::new(self.ecc, self.b)?;
                let grid = params.grid(self.nx, self.ny)?;
                (journal_bearing(&grid, &params)?, Some(grid))
            }
            ProblemKind::Obstacle => {
                let grid = GridSpec::unit_square(self.nx, self.ny)?;
                (obstacle(&grid)?, Some(grid))
            }
            ProblemKind::Torsion => {
                let grid = GridSpec::unit_square(self.nx, self.ny)?;
                (torsion(&grid, self.c)?, Some(grid))
            }
            ProblemKind::Combustion => {
                let grid = GridSpec::unit_square(self.nx, self.ny)?;
                (combustion(&grid, self.lambda)?, Some(grid))
            }
            ProblemKind::Lcp => {
                let (m, q) = random_monotone_lcp(self.n, self.seed);
                (lcp_nonneg(format!("lcp_n{}_s{}", self.n, self.seed), &m, &q)?, None)
            }
        };
        let x0 = problem.project(&vec![0.0; problem.dim()]);
        Ok(BuiltProblem { problem, x0, grid })
    }
}
