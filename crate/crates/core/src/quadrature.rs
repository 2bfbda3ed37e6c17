//! Mid-rectangle rule and the splitting of one kernel strip into mesh cells.

use crate::expr::ExprError;
use crate::mesh::{Mesh, MeshError};
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("interval [{lo}, {hi}] is inverted")]
    Inverted { lo: f64, hi: f64 },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("K_{piece}: {source}")]
    Kernel {
        piece: usize,
        #[source]
        source: ExprError,
    },
}

/// `(b − a)·g((a + b)/2)`.
pub fn midpoint_rule<E>(g: impl FnOnce(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<f64, E> {
    Ok((b - a) * g(0.5 * (a + b))?)
}

/// Sub-interval `[a, b]` lying inside a single mesh segment `Δ_segment`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub a: f64,
    pub b: f64,
    pub segment: usize,
}

impl Cell {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// Splits `[lo, hi]` at every node strictly inside it, given the segments
/// already located for both ends. Zero-width cells are skipped.
///
/// With `lo ∈ Δ_u` and `hi ∈ Δ_w` the cells are `[lo, t_u]`, the full
/// segments `Δ_{u+1} … Δ_{w-1}`, and `[t_{w-1}, hi]`; when `u = w` the whole
/// interval is one cell.
pub fn cells_located(
    mesh: &Mesh,
    lo: f64,
    lo_segment: usize,
    hi: f64,
    hi_segment: usize,
) -> impl Iterator<Item = Cell> + '_ {
    let single = (lo_segment == hi_segment).then_some(Cell {
        a: lo,
        b: hi,
        segment: hi_segment,
    });
    let split = (lo_segment < hi_segment).then(|| {
        let head = Cell {
            a: lo,
            b: mesh.node(lo_segment),
            segment: lo_segment,
        };
        let middle = (lo_segment + 1..hi_segment).map(move |j| Cell {
            a: mesh.node(j - 1),
            b: mesh.node(j),
            segment: j,
        });
        let tail = Cell {
            a: mesh.node(hi_segment - 1),
            b: hi,
            segment: hi_segment,
        };
        std::iter::once(head).chain(middle).chain(std::iter::once(tail))
    });
    single
        .into_iter()
        .chain(split.into_iter().flatten())
        .filter(|c| c.b > c.a)
}

/// Splits `[lo, hi]` at interior mesh nodes.
pub fn cells(mesh: &Mesh, lo: f64, hi: f64) -> Result<Vec<Cell>, QuadratureError> {
    if lo > hi {
        return Err(QuadratureError::Inverted { lo, hi });
    }
    let u = mesh.locate(lo)?;
    let w = mesh.locate(hi)?;
    Ok(cells_located(mesh, lo, u, hi, w).collect())
}

/// One mid-rectangle of kernel piece `piece` at time `t_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubIntervalContribution {
    pub a: f64,
    pub b: f64,
    pub piece: usize,
    pub midpoint: f64,
    /// `(b − a)·K_piece(t_k, midpoint)`.
    pub weight: f64,
    pub segment_of_midpoint: usize,
}

/// Mid-rectangles for `∫_lo^hi K_piece(t_k, s) x(s) ds`, one per mesh cell.
pub fn split_piece(
    mesh: &Mesh,
    lo: f64,
    hi: f64,
    piece: usize,
    t_k: f64,
    problem: &Problem,
) -> Result<Vec<SubIntervalContribution>, QuadratureError> {
    cells(mesh, lo, hi)?
        .into_iter()
        .map(|cell| {
            let midpoint = cell.midpoint();
            let weight = midpoint_rule(|s| problem.kernel(piece, t_k, s), cell.a, cell.b)
                .map_err(|source| QuadratureError::Kernel { piece, source })?;
            Ok(SubIntervalContribution {
                a: cell.a,
                b: cell.b,
                piece,
                midpoint,
                weight,
                segment_of_midpoint: cell.segment,
            })
        })
        .collect()
}
