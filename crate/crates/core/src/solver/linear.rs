use super::grid::RadialGrid;
use crate::classification::Potential;
use crate::error::{domain, Error, Result};
use crate::quadrature::RadialProfile;

/// Conservative discretisation of `-v'' - (N-1)/r v' + c(r) v` on a radial grid.
///
/// Cell fluxes are exact for `1` and the fundamental profile (`r^{2-N}`, or
/// `log r` in the plane), so the assembled matrix is an M-matrix for every
/// nonnegative `c` and every grid.
#[derive(Debug, Clone)]
pub struct RadialOperator {
    dim: usize,
    nodes: Vec<f64>,
    /// flux coefficient of each cell, `n - 1` entries
    cond: Vec<f64>,
    /// `int r^{N-1} dr` over each dual cell
    vol: Vec<f64>,
}

impl RadialOperator {
    pub fn new(dim: usize, grid: &RadialGrid) -> Self {
        let nodes = grid.nodes().to_vec();
        let n = nodes.len();
        let nf = dim as f64;
        let c = 2.0 - nf;
        let cond = nodes
            .windows(2)
            .map(|w| {
                if dim == 2 {
                    1.0 / (w[1] / w[0]).ln()
                } else {
                    c / (w[1].powf(c) - w[0].powf(c))
                }
            })
            .collect();
        let t: Vec<f64> = nodes.iter().map(|r| r.ln()).collect();
        let vol = (0..n)
            .map(|i| {
                let lo = if i == 0 { t[0] } else { 0.5 * (t[i - 1] + t[i]) };
                let hi = if i == n - 1 { t[n - 1] } else { 0.5 * (t[i] + t[i + 1]) };
                ((nf * hi).exp() - (nf * lo).exp()) / nf
            })
            .collect();
        Self { dim, nodes, cond, vol }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn volumes(&self) -> &[f64] {
        &self.vol
    }

    /// `(L v)_i` at interior nodes (zero at the two boundary nodes), where
    /// `absorption[i]` is `lambda V(r_i)`.
    pub fn apply(&self, v: &[f64], absorption: &[f64]) -> Vec<f64> {
        let n = self.nodes.len();
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            let left = self.cond[i - 1] * (v[i] - v[i - 1]);
            let right = self.cond[i] * (v[i + 1] - v[i]);
            out[i] = left - right + self.vol[i] * absorption[i] * v[i];
        }
        out
    }

    /// Diagonal entry of row `i`.
    pub fn apply_diag(&self, i: usize, absorption: &[f64]) -> f64 {
        let left = if i > 0 { self.cond[i - 1] } else { 0.0 };
        let right = self.cond.get(i).copied().unwrap_or(0.0);
        left + right + self.vol[i] * absorption[i]
    }

    /// Solves `L v = f` at interior nodes with Dirichlet data `(left, right)`.
    /// `f` holds pointwise source values; cell volumes are applied here.
    pub fn solve(&self, absorption: &[f64], f: &[f64], left: f64, right: f64) -> Result<Vec<f64>> {
        let n = self.nodes.len();
        if absorption.len() != n || f.len() != n {
            return Err(domain("operator, absorption and source sizes differ"));
        }
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut lower = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            diag[k] = self.cond[i - 1] + self.cond[i] + self.vol[i] * absorption[i];
            lower[k] = -self.cond[i - 1];
            upper[k] = -self.cond[i];
            rhs[k] = self.vol[i] * f[i];
        }
        rhs[0] += self.cond[0] * left;
        rhs[m - 1] += self.cond[n - 2] * right;
        // Thomas elimination; pivots stay positive for an M-matrix
        for k in 1..m {
            if !(diag[k - 1] > 0.0) {
                return Err(Error::SingularSystem { row: k });
            }
            let w = lower[k] / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        if !(diag[m - 1] > 0.0) {
            return Err(Error::SingularSystem { row: m });
        }
        let mut v = vec![0.0; n];
        v[0] = left;
        v[n - 1] = right;
        v[m] = rhs[m - 1] / diag[m - 1];
        for k in (0..m - 1).rev() {
            v[k + 1] = (rhs[k] - upper[k] * v[k + 2]) / diag[k];
        }
        Ok(v)
    }
}

/// Solves `-v'' - (N-1)/r v' + lambda V v = rhs` on `(a, 1)` with `v(a)`,
/// `v(1)` prescribed, on the nodes of `rhs`, which must span `[a, 1]`.
pub fn linear_bvp_solve(
    dim: usize,
    lambda: f64,
    potential: &Potential,
    rhs: &RadialProfile,
    inner: f64,
    boundary: (f64, f64),
) -> Result<RadialProfile> {
    if !(inner > 0.0 && inner < 1.0) {
        return Err(domain(format!("inner radius {inner} outside (0, 1)")));
    }
    if !(lambda >= 0.0) {
        return Err(domain("lambda must be nonnegative"));
    }
    let nodes = rhs.nodes().to_vec();
    if (nodes[0] - inner).abs() > 1e-12 * inner {
        return Err(domain("rhs grid must start at the inner radius"));
    }
    let grid = RadialGrid::from_nodes(nodes)?;
    let op = RadialOperator::new(dim, &grid);
    let absorption: Vec<f64> = grid.nodes().iter().map(|&r| lambda * potential.eval(r)).collect();
    if absorption.iter().any(|&c| !(c >= 0.0)) {
        return Err(domain("lambda V must be nonnegative on the grid"));
    }
    let v = op.solve(&absorption, rhs.values(), boundary.0, boundary.1)?;
    let sing = if dim == 2 { (0.0, 1.0) } else { (dim as f64 - 2.0, 0.0) };
    RadialProfile::new(grid.nodes().to_vec(), v, sing)
}
