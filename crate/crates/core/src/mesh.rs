//! Time meshes and the curve crossing table.
//!
//! Segments are half-open, `Δ_j = (t_{j-1}, t_j]`, so a point lying exactly
//! on node `t_j` belongs to `Δ_j` (the segment to its left).

use crate::expr::ExprError;
use crate::problem::Problem;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("mesh needs at least 2 segments, got {0}")]
    TooFewSegments(usize),
    #[error("mesh horizon must be finite and positive, got {0}")]
    Horizon(f64),
    #[error("mesh nodes must start at 0 and increase strictly")]
    NotIncreasing,
    #[error("point {s} lies outside [0, {t_end}]")]
    OutOfRange { s: f64, t_end: f64 },
    #[error(
        "curve alpha_{curve}(t_{node}) = {value} lies outside (alpha_{prev}(t_{node}), t_{node}] = ({lower}, {upper}]"
    )]
    CurveOrdering {
        curve: usize,
        prev: usize,
        node: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("alpha_{curve}(t_{node}): {source}")]
    CurveEval {
        curve: usize,
        node: usize,
        #[source]
        source: ExprError,
    },
}

/// Nodes `0 = t_0 < t_1 < … < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    h: f64,
}

impl Mesh {
    /// `t_i = i·T/N`, with the last node pinned to `T`.
    pub fn uniform(n: usize, t_end: f64) -> Result<Self, MeshError> {
        if n < 2 {
            return Err(MeshError::TooFewSegments(n));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(MeshError::Horizon(t_end));
        }
        let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 * t_end / n as f64).collect();
        nodes[n] = t_end;
        Self::from_nodes(nodes)
    }

    /// Arbitrary strictly increasing node list starting at zero.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, MeshError> {
        if nodes.len() < 3 {
            return Err(MeshError::TooFewSegments(nodes.len().saturating_sub(1)));
        }
        if nodes[0] != 0.0 || nodes.windows(2).any(|w| !(w[0] < w[1])) || !nodes.iter().all(|t| t.is_finite()) {
            return Err(MeshError::NotIncreasing);
        }
        let h = nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Ok(Self { nodes, h })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `t_i`.
    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Number of segments `N`.
    pub fn segments(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Maximum step.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn t_end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index `j` of the segment `Δ_j` containing `s`, or 0 for `s = 0`.
    pub fn locate(&self, s: f64) -> Result<usize, MeshError> {
        if !(0.0..=self.t_end()).contains(&s) {
            return Err(MeshError::OutOfRange { s, t_end: self.t_end() });
        }
        Ok(self.nodes.partition_point(|&t| t < s))
    }
}

/// `v[i][j]`: the segment containing `α_i(t_j)` for interior curves
/// `i = 1..n-1` and nodes `j = 1..N`, together with the curve values.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingTable {
    curves: usize,
    segments: usize,
    values: Vec<f64>,
    index: Vec<usize>,
}

impl CrossingTable {
    /// Evaluates every interior curve at every node `t_1 … t_N` and locates it.
    /// Requires `0 < α_1(t_j) ≤ … ≤ α_{n-1}(t_j) ≤ t_j` at each node.
    pub fn build(mesh: &Mesh, problem: &Problem) -> Result<Self, MeshError> {
        let curves = problem.pieces() - 1;
        let segments = mesh.segments();
        let mut values = Vec::with_capacity(curves * segments);
        let mut index = Vec::with_capacity(curves * segments);
        for (c, curve) in problem.curves().iter().enumerate() {
            let i = c + 1;
            for j in 1..=segments {
                let tj = mesh.node(j);
                let value = curve.eval_t(tj).map_err(|source| MeshError::CurveEval {
                    curve: i,
                    node: j,
                    source,
                })?;
                let lower = if c == 0 {
                    0.0
                } else {
                    values[(c - 1) * segments + j - 1]
                };
                let positive = if c == 0 { value > lower } else { value >= lower };
                if !(positive && value <= tj) {
                    return Err(MeshError::CurveOrdering {
                        curve: i,
                        prev: i - 1,
                        node: j,
                        value,
                        lower,
                        upper: tj,
                    });
                }
                values.push(value);
                index.push(mesh.locate(value)?);
            }
        }
        Ok(Self {
            curves,
            segments,
            values,
            index,
        })
    }

    /// Number of interior curves, `n − 1`.
    pub fn curves(&self) -> usize {
        self.curves
    }

    pub fn is_empty(&self) -> bool {
        self.curves == 0
    }

    /// `v_{ij}` for `1 ≤ i ≤ n−1`, `1 ≤ j ≤ N`.
    pub fn v(&self, i: usize, j: usize) -> usize {
        self.index[(i - 1) * self.segments + j - 1]
    }

    /// `α_i(t_j)` for `1 ≤ i ≤ n−1`, `1 ≤ j ≤ N`.
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[(i - 1) * self.segments + j - 1]
    }

    /// Row `v_{i,1} … v_{i,N}`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.index[(i - 1) * self.segments..i * self.segments]
    }
}
