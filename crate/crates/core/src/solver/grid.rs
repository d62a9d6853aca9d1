use crate::error::{domain, Result};

/// Nodes uniform in `log r` on `[inner, 1]`, both ends included.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    /// `nodes_per_octave` nodes per doubling of `r`. When `inner` is a power
    /// of two, grids with different `inner` share their nodes on the overlap.
    pub fn geometric(inner: f64, nodes_per_octave: usize) -> Result<Self> {
        if !(inner > 0.0 && inner < 1.0) {
            return Err(domain(format!("inner radius {inner} outside (0, 1)")));
        }
        if nodes_per_octave == 0 {
            return Err(domain("nodes_per_octave must be positive"));
        }
        let octaves = -inner.log2();
        let n = ((octaves * nodes_per_octave as f64) - 1e-9).ceil().max(1.0) as usize;
        let lo = inner.log2();
        let nodes = (0..=n)
            .map(|i| if i == n { 1.0 } else { (lo * (n - i) as f64 / n as f64).exp2() })
            .collect();
        Ok(Self { nodes })
    }

    /// Arbitrary strictly increasing nodes ending at 1.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(domain("a grid needs at least three nodes"));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) || !(nodes[0] > 0.0) {
            return Err(domain("grid nodes must be positive and strictly increasing"));
        }
        if (nodes[nodes.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(domain("grid must end at r = 1"));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn inner(&self) -> f64 {
        self.nodes[0]
    }

    /// Largest step in `log r`.
    pub fn max_log_step(&self) -> f64 {
        self.nodes.windows(2).map(|w| (w[1] / w[0]).ln()).fold(0.0, f64::max)
    }

    /// Index of the node equal to `r` up to relative `1e-10`.
    pub fn find(&self, r: f64) -> Option<usize> {
        let i = self.nodes.partition_point(|&x| x < r * (1.0 - 1e-10));
        (i < self.nodes.len() && (self.nodes[i] - r).abs() <= 1e-10 * r).then_some(i)
    }
}
