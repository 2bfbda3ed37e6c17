//! Error metrics, convergence studies and CSV export.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::expr::{Expr, ExprError};
use crate::problem::Problem;
use crate::solver::{self, Solution, SolveError};

/// Errors below this are treated as exact when estimating orders.
pub const ORDER_ERROR_FLOOR: f64 = 1e-300;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("exact solution at t = {t}: {source}")]
    Exact {
        t: f64,
        #[source]
        source: ExprError,
    },
    #[error("problem has no exact solution")]
    NoExactSolution,
    #[error("mesh sizes must be strictly increasing, got {0:?}")]
    NotIncreasing(Vec<usize>),
    #[error("N = {n}: {source}")]
    Solve {
        n: usize,
        #[source]
        source: SolveError,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// `max_i |exact(t_i) − x(t_i)|` over all mesh nodes, including `t_0`.
pub fn max_node_error(solution: &Solution, exact: &Expr) -> Result<f64, AnalysisError> {
    solution.node_values().try_fold(0.0f64, |worst, (t, x)| {
        let reference = exact.eval_t(t).map_err(|source| AnalysisError::Exact { t, source })?;
        Ok(worst.max((reference - x).abs()))
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub epsilon: f64,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub problem_label: String,
    pub rows: Vec<ConvergenceRow>,
    /// `log(ε_prev/ε_next) / log(h_prev/h_next)` for consecutive rows, which is
    /// `log₂(ε_prev/ε_next)` for halvings. `None` when either error is below
    /// [`ORDER_ERROR_FLOOR`].
    pub orders: Vec<Option<f64>>,
}

impl ConvergenceReport {
    /// Mean of the last `count` defined orders.
    pub fn mean_tail_order(&self, count: usize) -> Option<f64> {
        let tail: Vec<f64> = self.orders.iter().rev().take(count).flatten().copied().collect();
        (tail.len() == count && count > 0).then(|| tail.iter().sum::<f64>() / count as f64)
    }

    /// Rendered as an aligned text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        if !self.problem_label.is_empty() {
            let _ = writeln!(out, "# {}", self.problem_label);
        }
        let _ = writeln!(
            out,
            "{:>8}  {:>23}  {:>23}  {:>23}  {:>12}",
            "N", "h", "epsilon", "order", "runtime_ms"
        );
        for (i, row) in self.rows.iter().enumerate() {
            let order = match i.checked_sub(1).and_then(|j| self.orders[j]) {
                Some(o) => format!("{o:.16e}"),
                None => String::new(),
            };
            let _ = writeln!(
                out,
                "{:>8}  {:>23.16e}  {:>23.16e}  {:>23}  {:>12.3}",
                row.n, row.h, row.epsilon, order, row.runtime_ms
            );
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,h,epsilon,order,runtime_ms\n");
        for (i, row) in self.rows.iter().enumerate() {
            let order = match i.checked_sub(1).and_then(|j| self.orders[j]) {
                Some(o) => format!("{o:.16e}"),
                None => String::new(),
            };
            let _ = writeln!(
                out,
                "{},{:.16e},{:.16e},{},{:.3}",
                row.n, row.h, row.epsilon, order, row.runtime_ms
            );
        }
        out
    }
}

fn order(prev: &ConvergenceRow, next: &ConvergenceRow) -> Option<f64> {
    if prev.epsilon < ORDER_ERROR_FLOOR || next.epsilon < ORDER_ERROR_FLOOR {
        return None;
    }
    Some((prev.epsilon / next.epsilon).ln() / (prev.h / next.h).ln())
}

/// One solve per mesh size, run in parallel and joined in input order.
pub fn convergence_study(problem: &Problem, sizes: &[usize]) -> Result<ConvergenceReport, AnalysisError> {
    let exact = problem.exact().ok_or(AnalysisError::NoExactSolution)?;
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::NotIncreasing(sizes.to_vec()));
    }
    let rows = sizes
        .par_iter()
        .map(|&n| {
            let started = Instant::now();
            let solution = solver::solve(problem, n).map_err(|source| AnalysisError::Solve { n, source })?;
            let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
            Ok(ConvergenceRow {
                n,
                h: solution.mesh().h(),
                epsilon: max_node_error(&solution, exact)?,
                runtime_ms,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let orders = rows.windows(2).map(|w| order(&w[0], &w[1])).collect();
    Ok(ConvergenceReport {
        problem_label: problem.label().to_owned(),
        rows,
        orders,
    })
}

/// `t,x` with one row per mesh node.
pub fn solution_csv(solution: &Solution) -> String {
    let mut out = String::from("t,x\n");
    for (t, x) in solution.node_values() {
        let _ = writeln!(out, "{t:.16e},{x:.16e}");
    }
    out
}

/// Something that can be written as CSV.
pub enum CsvSource<'a> {
    Report(&'a ConvergenceReport),
    Solution(&'a Solution),
}

pub fn export_csv(source: CsvSource<'_>, path: &Path) -> Result<(), AnalysisError> {
    let body = match source {
        CsvSource::Report(r) => r.to_csv(),
        CsvSource::Solution(s) => solution_csv(s),
    };
    std::fs::write(path, body).map_err(|source| AnalysisError::Io {
        path: path.to_owned(),
        source,
    })
}
