//! Numerical solution of linear Volterra integral equations of the first kind
//!
//! ```text
//! ∫₀ᵗ K(t,s) x(s) ds = f(t),   f(0) = 0,
//! ```
//!
//! whose kernel is piecewise smooth with jump discontinuities along curves
//! `α_i(t)` that start at the origin. The solution is approximated by a
//! piecewise-constant function computed node by node with the mid-rectangle
//! rule; the error at the nodes decays like `O(1/N)`.
//!
//! ```
//! use vie_core::{config, solver, analysis};
//!
//! let problem = config::example(1).unwrap();
//! let solution = solver::solve(&problem, 64).unwrap();
//! let eps = analysis::max_node_error(&solution, problem.exact().unwrap()).unwrap();
//! assert!(eps < 0.1);
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod expr;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod solver;

pub use expr::{Expr, ExprError, Var};
pub use mesh::{CrossingTable, Mesh};
pub use problem::{Diagnostics, Problem};
pub use solver::{solve, Solution, SolveError};
