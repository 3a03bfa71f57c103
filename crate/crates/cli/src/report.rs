use std::fmt::Write as _;
use std::io::{self, Write};

use compsolve::model::lossless_f64;
use compsolve::problems::{GridSpec, SuiteCategory};
use compsolve::{Method, SolverReport, Status};
use serde::{Deserialize, Serialize};

use crate::spec::{RunSpec, SolverChoice};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything reported for one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub tool_version: String,
    pub spec: RunSpec,
    pub problem_name: String,
    pub dimension: usize,
    pub report: SolverReport,
    #[serde(with = "lossless_f64")]
    pub complementarity_error: f64,
}

impl ReportDocument {
    pub const CSV_HEADER: &'static str = "problem,method,solver,status,outer_iterations,linear_solves,\
inner_iterations_total,initial_residual,final_residual,complementarity_error,wall_time_seconds";

    pub fn csv_row(&self) -> String {
        let r = &self.report;
        format!(
            "{},{},{},{:?},{},{},{},{:?},{:?},{:?},{:?}",
            self.problem_name,
            self.spec.method,
            self.spec.choice(),
            r.status,
            r.outer_iterations,
            r.linear_solves,
            r.inner_iterations_total,
            r.initial_residual,
            r.final_residual,
            self.complementarity_error,
            r.wall_time_seconds
        )
    }

    /// Summary line followed by the per-iteration history.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n{}\n\n", Self::CSV_HEADER, self.csv_row());
        out.push_str("iteration,residual_norm,step_size,active_count,gradient_fallback,inner_iterations\n");
        for h in &self.report.history {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{},{},{}",
                h.iteration, h.residual_norm, h.step_size, h.active_count, h.gradient_fallback, h.inner_iterations
            );
        }
        out
    }
}

/// One row of the linear-solver comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table2Row {
    pub solver: String,
    pub status: Status,
    pub wall_time_seconds: f64,
    pub outer_iterations: usize,
    pub linear_solves: usize,
    pub inner_iterations_total: usize,
    #[serde(with = "lossless_f64")]
    pub final_residual: f64,
    #[serde(with = "lossless_f64")]
    pub complementarity_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairwiseDifference {
    pub a: String,
    pub b: String,
    #[serde(with = "lossless_f64")]
    pub max_abs_difference: f64,
}

/// The same problem solved under several linear-solver configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table2Report {
    pub tool_version: String,
    pub problem_name: String,
    pub dimension: usize,
    pub method: Method,
    pub rows: Vec<Table2Row>,
    pub pairwise: Vec<PairwiseDifference>,
}

impl Table2Report {
    pub fn row(&self, choice: SolverChoice) -> Option<&Table2Row> {
        let label = choice.to_string();
        self.rows.iter().find(|r| r.solver == label)
    }

    pub fn max_pairwise_difference(&self) -> f64 {
        self.pairwise.iter().fold(0.0f64, |m, p| m.max(p.max_abs_difference))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "problem,method,solver,status,wall_time_seconds,outer_iterations,linear_solves,inner_iterations_total,\
final_residual,complementarity_error\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:?},{:?},{},{},{},{:?},{:?}",
                self.problem_name,
                self.method,
                r.solver,
                r.status,
                r.wall_time_seconds,
                r.outer_iterations,
                r.linear_solves,
                r.inner_iterations_total,
                r.final_residual,
                r.complementarity_error
            );
        }
        out.push_str("\nsolver_a,solver_b,max_abs_difference\n");
        for p in &self.pairwise {
            let _ = writeln!(out, "{},{},{:?}", p.a, p.b, p.max_abs_difference);
        }
        out
    }
}

/// Outcome of one method on one suite instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessEntry {
    pub instance: String,
    pub category: SuiteCategory,
    pub method: Method,
    pub status: Status,
    #[serde(with = "lossless_f64")]
    pub complementarity_error: f64,
    pub solved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSummary {
    pub method: Method,
    pub solved: usize,
    pub total: usize,
    pub fraction: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessReport {
    pub tool_version: String,
    pub solver: String,
    pub entries: Vec<RobustnessEntry>,
    pub summary: Vec<MethodSummary>,
}

impl RobustnessReport {
    pub fn summary_for(&self, method: Method) -> Option<&MethodSummary> {
        self.summary.iter().find(|s| s.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,category,method,status,complementarity_error,solved\n");
        for e in &self.entries {
            let category = serde_json::to_value(e.category)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned));
            let _ = writeln!(
                out,
                "{},{},{},{:?},{:?},{}",
                e.instance,
                category.unwrap_or_default(),
                e.method,
                e.status,
                e.complementarity_error,
                e.solved
            );
        }
        out.push_str("\nmethod,solved,total,fraction\n");
        for s in &self.summary {
            let _ = writeln!(out, "{},{},{},{:?}", s.method, s.solved, s.total, s.fraction);
        }
        out
    }
}

/// `i,j,xi1,xi2,value`, one row per node in unknown order. Without a grid the
/// coordinates are left empty and `i` is the component index.
pub fn write_solution_csv<W: Write>(mut w: W, grid: Option<&GridSpec>, x: &[f64]) -> io::Result<()> {
    writeln!(w, "i,j,xi1,xi2,value")?;
    match grid {
        Some(g) => {
            for ((i, j, x1, x2), v) in g.nodes().zip(x) {
                writeln!(w, "{i},{j},{x1:?},{x2:?},{v:?}")?;
            }
        }
        None => {
            for (i, v) in x.iter().enumerate() {
                writeln!(w, "{i},0,,,{v:?}")?;
            }
        }
    }
    Ok(())
}
