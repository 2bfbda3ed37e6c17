//! Mid-rectangle stepping scheme.
//!
//! The approximation is piecewise constant, `x_N(t) = x_k` on `Δ_k`. At each
//! node `t_k` the equation is written as a sum over kernel strips, every strip
//! is split at mesh nodes and each cell is replaced by one mid-rectangle.
//! Cells whose midpoint lies in an earlier segment use the already known
//! value; cells inside `Δ_k` carry the single unknown `x_k`.

use crate::expr::{ExprError, Var};
use crate::mesh::{CrossingTable, Mesh, MeshError};
use crate::problem::{Diagnostics, Problem, ProblemError, DEFAULT_J_MAX};
use crate::quadrature::{cells_located, Cell};

/// `|Σ K_i(0,0)[α_i'(0) − α_{i-1}'(0)]|` at or below this leaves `x(0)` undetermined.
pub const X0_DENOMINATOR_TOL: f64 = 1e-12;
/// Relative threshold for the coefficient of the unknown at each step.
pub const STEP_COEFFICIENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("problem is not valid: {}", .0.join("; "))]
    Validation(Vec<String>),
    #[error("x(0) denominator is {denominator:e}: the solution is not unique (free constants may appear)")]
    ZeroDenominator { denominator: f64 },
    #[error("step {k} is singular: coefficient of x_{k} is {coefficient:e}")]
    SingularStep { k: usize, coefficient: f64 },
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("{context}: {source}")]
    Eval {
        context: String,
        #[source]
        source: ExprError,
    },
}

impl SolveError {
    /// Failures of the scheme itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            SolveError::ZeroDenominator { .. }
                | SolveError::SingularStep { .. }
                | SolveError::Eval { .. }
                | SolveError::Problem(ProblemError::Eval { .. })
                | SolveError::Problem(ProblemError::DegenerateDiagonal(_))
        )
    }
}

/// Piecewise-constant approximate solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    mesh: Mesh,
    x0: f64,
    values: Vec<f64>,
    diagnostics: Diagnostics,
}

impl Solution {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Value at `t = 0`.
    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// `x_1 … x_N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// `x_N(t)`: `x0` at the origin, otherwise the value of the segment holding `t`.
    pub fn evaluate(&self, t: f64) -> Result<f64, MeshError> {
        match self.mesh.locate(t)? {
            0 => Ok(self.x0),
            j => Ok(self.values[j - 1]),
        }
    }

    /// `(t_i, x(t_i))` for `i = 0..=N`.
    pub fn node_values(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let xs = std::iter::once(self.x0).chain(self.values.iter().copied());
        self.mesh.nodes().iter().copied().zip(xs)
    }
}

/// Discretised equation at node `t_k`: `known_sum + xk_coefficient·x_k = f_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepAssembly {
    pub k: usize,
    pub known_sum: f64,
    pub xk_coefficient: f64,
    pub f_k: f64,
}

/// `x(0) = f'(0) / Σ K_i(0,0)[α_i'(0) − α_{i-1}'(0)]`, with `f'` taken symbolically.
pub fn compute_x0(problem: &Problem) -> Result<f64, SolveError> {
    let denominator = problem.x0_denominator()?;
    if !(denominator.abs() > X0_DENOMINATOR_TOL) {
        return Err(SolveError::ZeroDenominator { denominator });
    }
    let slope = problem
        .rhs()
        .differentiate(Var::T)
        .eval_t(0.0)
        .map_err(|source| SolveError::Eval {
            context: "f'(0)".into(),
            source,
        })?;
    Ok(slope / denominator)
}

/// Strip bounds `α_0(t_k) … α_n(t_k)` and their segments at node `k`.
fn strip_bounds(problem: &Problem, mesh: &Mesh, table: &CrossingTable, k: usize) -> Vec<(f64, usize)> {
    let n = problem.pieces();
    let mut bounds = Vec::with_capacity(n + 1);
    bounds.push((0.0, 0));
    bounds.extend((1..n).map(|i| (table.value(i, k), table.v(i, k))));
    bounds.push((mesh.node(k), k));
    bounds
}

/// Visits every cell of every strip at node `k` as `(piece, cell)`.
fn for_each_cell(
    problem: &Problem,
    mesh: &Mesh,
    table: &CrossingTable,
    k: usize,
    mut visit: impl FnMut(usize, Cell) -> Result<(), SolveError>,
) -> Result<(), SolveError> {
    let bounds = strip_bounds(problem, mesh, table, k);
    for (idx, pair) in bounds.windows(2).enumerate() {
        let ((lo, lo_seg), (hi, hi_seg)) = (pair[0], pair[1]);
        for cell in cells_located(mesh, lo, lo_seg, hi, hi_seg) {
            visit(idx + 1, cell)?;
        }
    }
    Ok(())
}

/// Assembles the relation at node `t_k` from `known = [x_1, …, x_{k-1}]`
/// (extra trailing entries are ignored).
pub fn assemble_step(
    problem: &Problem,
    mesh: &Mesh,
    table: &CrossingTable,
    k: usize,
    known: &[f64],
) -> Result<StepAssembly, SolveError> {
    assert!(
        (1..=mesh.segments()).contains(&k) && known.len() + 1 >= k,
        "step {k} needs x_1..x_{{k-1}}"
    );
    let t_k = mesh.node(k);
    let mut known_sum = 0.0;
    let mut xk_coefficient = 0.0;
    for_each_cell(problem, mesh, table, k, |piece, cell| {
        let kernel = problem
            .kernel(piece, t_k, cell.midpoint())
            .map_err(|source| SolveError::Eval {
                context: format!("K_{piece}(t_{k}, {})", cell.midpoint()),
                source,
            })?;
        let weight = cell.width() * kernel;
        if cell.segment < k {
            known_sum += weight * known[cell.segment - 1];
        } else {
            xk_coefficient += weight;
        }
        Ok(())
    })?;
    let f_k = problem.rhs().eval_t(t_k).map_err(|source| SolveError::Eval {
        context: format!("f(t_{k})"),
        source,
    })?;
    Ok(StepAssembly {
        k,
        known_sum,
        xk_coefficient,
        f_k,
    })
}

/// Cells used at node `k`, grouped as `(piece, cell)`.
pub fn step_cells(
    problem: &Problem,
    mesh: &Mesh,
    table: &CrossingTable,
    k: usize,
) -> Result<Vec<(usize, Cell)>, SolveError> {
    let mut out = Vec::new();
    for_each_cell(problem, mesh, table, k, |piece, cell| {
        out.push((piece, cell));
        Ok(())
    })?;
    Ok(out)
}

/// `x_k = (f_k − known_sum) / xk_coefficient`.
pub fn step_solve(step: &StepAssembly) -> Result<f64, SolveError> {
    let scale = 1f64.max(step.f_k.abs()).max(step.known_sum.abs());
    if !(step.xk_coefficient.abs() > STEP_COEFFICIENT_TOL * scale) {
        return Err(SolveError::SingularStep {
            k: step.k,
            coefficient: step.xk_coefficient,
        });
    }
    Ok((step.f_k - step.known_sum) / step.xk_coefficient)
}

/// Solves on a uniform mesh with `n` segments.
pub fn solve(problem: &Problem, n: usize) -> Result<Solution, SolveError> {
    let mesh = Mesh::uniform(n, problem.t_end())?;
    solve_on_mesh(problem, mesh)
}

/// Solves on an arbitrary mesh covering `[0, T]`.
pub fn solve_on_mesh(problem: &Problem, mesh: Mesh) -> Result<Solution, SolveError> {
    let diagnostics = problem.diagnose(DEFAULT_J_MAX);
    if !diagnostics.ordering_ok {
        return Err(SolveError::Validation(diagnostics.messages));
    }
    let table = CrossingTable::build(&mesh, problem)?;
    let x0 = compute_x0(problem)?;
    let mut values = Vec::with_capacity(mesh.segments());
    for k in 1..=mesh.segments() {
        let step = assemble_step(problem, &mesh, &table, k, &values)?;
        values.push(step_solve(&step)?);
    }
    Ok(Solution {
        mesh,
        x0,
        values,
        diagnostics,
    })
}
