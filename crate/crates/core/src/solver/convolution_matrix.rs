use std::cell::RefCell;

use rayon::prelude::*;

use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::quadrature::{angular_mean_diff, gauss10, integrate_adaptive, QuadratureConfig, SingularEnds};
use crate::special::{surface_area, KernelParams};

/// Discrete form of `f -> int_{a<|y|<1} K(x-y) f(|y|) dy` at the grid
/// nodes, for `f` piecewise linear in `log r` between nodes.
///
/// Every entry is nonnegative, so the map is order preserving.
#[derive(Debug, Clone)]
pub struct ConvolutionMatrix {
    nodes: Vec<f64>,
    rows: Vec<Vec<f64>>,
}

impl ConvolutionMatrix {
    /// Rows at the two boundary nodes are left empty.
    pub fn assemble(kernel: &KernelParams, grid: &RadialGrid, cfg: &QuadratureConfig) -> Result<Self> {
        let nodes = grid.nodes().to_vec();
        let n = nodes.len();
        let mut rows: Vec<Vec<f64>> = (1..n - 1)
            .into_par_iter()
            .map(|i| row(kernel, &nodes, i, cfg))
            .collect::<Result<_>>()?;
        rows.insert(0, vec![0.0; n]);
        rows.push(vec![0.0; n]);
        Ok(Self { nodes, rows })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|w| w.iter().zip(f).map(|(a, b)| a * b).sum()).collect()
    }
}

fn row(kernel: &KernelParams, nodes: &[f64], i: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    let dim = kernel.dim;
    let n = nodes.len();
    let r = nodes[i];
    let sigma = surface_area(dim);
    let acfg = QuadratureConfig { rel_tol: 1e-10, abs_tol: f64::MIN_POSITIVE, max_subdivisions: cfg.max_subdivisions };
    let k = |d: f64| kernel.eval_unchecked(d);
    let err: RefCell<Option<Error>> = RefCell::new(None);
    // sigma s^{N-1} A(r, s)
    let radial = |s: f64, diff: f64| -> f64 {
        if diff < 1e-50 * r {
            return 0.0;
        }
        match angular_mean_diff(dim, r, s, diff, &k, &acfg) {
            Ok(a) => sigma * s.powi(dim as i32 - 1) * a,
            Err(e) => {
                err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let surface = |res: Result<f64>| -> Result<f64> {
        match (res, err.borrow_mut().take()) {
            (_, Some(e)) => Err(e),
            (res, None) => res,
        }
    };
    let t: Vec<f64> = nodes.iter().map(|s| s.ln()).collect();
    let gl = gauss10();
    let mut w = vec![0.0; n];
    for c in 0..n - 1 {
        let (t0, t1) = (t[c], t[c + 1]);
        let h = t1 - t0;
        let hat_lo = |ts: f64| (t1 - ts) / h;
        let hat_hi = |ts: f64| (ts - t0) / h;
        if c == i || c + 1 == i {
            // r is an endpoint: integrate in the offset from r
            let (sign, len) = if c == i { (1.0, nodes[c + 1] - r) } else { (-1.0, r - nodes[c]) };
            let lo = integrate_adaptive(
                |tau| {
                    let s = r + sign * tau;
                    radial(s, tau) * hat_lo(s.ln())
                },
                0.0,
                len,
                SingularEnds::LO,
                cfg,
            );
            w[c] += surface(lo.map(|v| v.value))?;
            let hi = integrate_adaptive(
                |tau| {
                    let s = r + sign * tau;
                    radial(s, tau) * hat_hi(s.ln())
                },
                0.0,
                len,
                SingularEnds::LO,
                cfg,
            );
            w[c + 1] += surface(hi.map(|v| v.value))?;
        } else if c + 2 == i || c == i + 1 {
            for (j, hat) in [(c, &hat_lo as &dyn Fn(f64) -> f64), (c + 1, &hat_hi)] {
                let v = integrate_adaptive(
                    |ts| {
                        let s = ts.exp();
                        radial(s, (s - r).abs()) * s * hat(ts)
                    },
                    t0,
                    t1,
                    SingularEnds::NONE,
                    cfg,
                );
                w[j] += surface(v.map(|v| v.value))?;
            }
        } else {
            let mid = 0.5 * (t0 + t1);
            for &(x, wt) in &gl {
                let ts = mid + 0.5 * h * x;
                let s = ts.exp();
                let g = 0.5 * h * wt * radial(s, (s - r).abs()) * s;
                w[c] += g * hat_lo(ts);
                w[c + 1] += g * hat_hi(ts);
            }
            surface(Ok(0.0))?;
        }
    }
    Ok(w)
}
