use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How the nodes of a [`Grid`] were generated; uniform grids get O(1) lookup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    Uniform,
    LogUniform,
    Composite,
}

/// Strictly increasing, finite, non-negative radii (or frequencies).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    nodes: Vec<f64>,
    kind: GridKind,
}

impl Grid {
    pub fn new(nodes: Vec<f64>, kind: GridKind) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidInput("a grid needs at least 2 nodes".into()));
        }
        if nodes.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidInput("grid nodes must be finite and >= 0".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, kind })
    }

    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(Error::InvalidInput(format!("bad uniform grid [{a}, {b}] with {n} nodes")));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        nodes[n - 1] = b;
        Self::new(nodes, GridKind::Uniform)
    }

    pub fn log_uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 || !(a > 0.0) || !(b > a) {
            return Err(Error::InvalidInput(format!("bad log grid [{a}, {b}] with {n} nodes")));
        }
        let (la, lb) = (a.ln(), b.ln());
        let mut nodes: Vec<f64> =
            (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect();
        nodes[0] = a;
        nodes[n - 1] = b;
        Self::new(nodes, GridKind::LogUniform)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index `i` of the cell `[x_i, x_{i+1}]` containing `x`, clamped to the grid.
    pub fn cell(&self, x: f64) -> usize {
        let n = self.nodes.len();
        if x <= self.nodes[0] {
            return 0;
        }
        if x >= self.nodes[n - 1] {
            return n - 2;
        }
        if self.kind == GridKind::Uniform {
            let h = (self.nodes[n - 1] - self.nodes[0]) / (n - 1) as f64;
            let mut i = (((x - self.nodes[0]) / h) as usize).min(n - 2);
            // Guard against rounding in the division.
            while i > 0 && self.nodes[i] > x {
                i -= 1;
            }
            while i + 2 < n && self.nodes[i + 1] <= x {
                i += 1;
            }
            return i;
        }
        self.nodes.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2)
    }
}
