use serde::Serialize;

use super::barrier::SubSuperPair;
use super::convolution_matrix::ConvolutionMatrix;
use super::grid::RadialGrid;
use super::linear::RadialOperator;
use crate::classification::Potential;
use crate::error::{domain, Error, Result};
use crate::quadrature::{QuadratureConfig, RadialProfile};
use crate::special::KernelParams;

/// The truncated problem on `1/inner_index < |x| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnulusProblem {
    pub kernel: KernelParams,
    pub p: f64,
    pub q: f64,
    pub potential: Potential,
    pub lambda: f64,
    pub inner_index: usize,
    pub nodes_per_octave: usize,
    /// multiplies the nonlinear term; 1 for the actual equation
    pub coupling: f64,
}

impl AnnulusProblem {
    pub fn inner(&self) -> f64 {
        1.0 / self.inner_index as f64
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        if self.inner_index < 3 {
            return Err(domain(format!("inner index {} < 3", self.inner_index)));
        }
        RadialGrid::geometric(self.inner(), self.nodes_per_octave)
    }

    /// Assembles the operator and the convolution matrix; `lambda` is left free.
    pub fn discretize(&self, quad: &QuadratureConfig) -> Result<Discretization> {
        if !(self.lambda >= 0.0) {
            return Err(domain("lambda must be nonnegative"));
        }
        let grid = self.grid()?;
        let conv = if self.coupling == 0.0 {
            None
        } else {
            Some(ConvolutionMatrix::assemble(&self.kernel, &grid, quad)?)
        };
        let potential: Vec<f64> = grid.nodes().iter().map(|&r| self.potential.eval(r)).collect();
        if potential.iter().any(|&v| !(v >= 0.0)) {
            return Err(domain("potential must be nonnegative on the grid"));
        }
        Ok(Discretization {
            op: RadialOperator::new(self.kernel.dim, &grid),
            grid,
            conv,
            potential,
            p: self.p,
            q: self.q,
            coupling: self.coupling,
        })
    }
}

/// Assembled pieces of an [`AnnulusProblem`].
#[derive(Debug, Clone)]
pub struct Discretization {
    grid: RadialGrid,
    op: RadialOperator,
    conv: Option<ConvolutionMatrix>,
    potential: Vec<f64>,
    p: f64,
    q: f64,
    coupling: f64,
}

/// Settings of the outer iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationConfig {
    /// stop when successive iterates differ by less than this, relative sup norm
    pub tol: f64,
    pub max_iterations: usize,
    /// slack of the order checks, relative to `max` of the super-solution
    pub tol_mono_rel: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_iterations: 200, tol_mono_rel: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual: f64,
    pub min_gap_sub: f64,
    pub min_gap_super: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationState {
    pub iterate_index: usize,
    pub current: RadialProfile,
    pub residual_history: Vec<f64>,
    pub monotone_ok: bool,
    pub sandwich_ok: bool,
    pub log: Vec<IterationRecord>,
}

/// Smallest normalised defect of the discrete barrier inequalities.
/// Both are nonnegative when the pair is admissible on this grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateReport {
    pub sub_margin: f64,
    pub super_margin: f64,
    /// `min (sup - sub)` over the nodes
    pub order_gap: f64,
}

impl GateReport {
    pub fn sub_ok(&self) -> bool {
        self.sub_margin >= -1e-12
    }

    pub fn super_ok(&self) -> bool {
        self.super_margin >= -1e-12
    }

    pub fn ok(&self) -> bool {
        self.sub_ok() && self.super_ok() && self.order_gap >= 0.0
    }
}

impl Discretization {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn operator(&self) -> &RadialOperator {
        &self.op
    }

    fn sing_exp(&self) -> (f64, f64) {
        if self.op.dim() == 2 {
            (0.0, 1.0)
        } else {
            (self.op.dim() as f64 - 2.0, 0.0)
        }
    }

    fn absorption(&self, lambda: f64) -> Vec<f64> {
        self.potential.iter().map(|v| lambda * v).collect()
    }

    /// Pointwise nonlinearity `(K * u^p) u^q` at the nodes.
    pub fn nonlinearity(&self, u: &[f64]) -> Vec<f64> {
        match &self.conv {
            None => vec![0.0; u.len()],
            Some(w) => {
                let up: Vec<f64> = u.iter().map(|v| v.powf(self.p)).collect();
                w.apply(&up).iter().zip(u).map(|(c, v)| self.coupling * c * v.powf(self.q)).collect()
            }
        }
    }

    /// `(sub_margin, super_margin)` of the pair's barriers at `lambda`.
    pub fn gates(&self, pair: &SubSuperPair, lambda: f64) -> Result<GateReport> {
        let nodes = self.grid.nodes();
        let sub: Vec<f64> = nodes.iter().map(|&r| pair.sub.eval(r)).collect();
        let sup: Vec<f64> = nodes.iter().map(|&r| pair.sup.eval(r)).collect();
        if sub.iter().chain(&sup).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidProfile("barrier is not positive and finite on the grid".into()));
        }
        let abs = self.absorption(lambda);
        let margin = |u: &[f64], sign: f64| {
            let lu = self.op.apply(u, &abs);
            let f = self.nonlinearity(u);
            let vol = self.op.volumes();
            (1..nodes.len() - 1)
                .map(|i| {
                    let rhs = vol[i] * f[i];
                    let scale = rhs.abs() + lu[i].abs() + (self.op.apply_diag(i, &abs) * u[i]).abs();
                    sign * (rhs - lu[i]) / scale
                })
                .fold(f64::INFINITY, f64::min)
        };
        let order_gap = sub.iter().zip(&sup).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
        Ok(GateReport { sub_margin: margin(&sub, 1.0), super_margin: margin(&sup, -1.0), order_gap })
    }

    /// Picard iteration from the sub-solution with Dirichlet data taken
    /// from the sub-solution.
    pub fn iterate(
        &self,
        pair: &SubSuperPair,
        lambda: f64,
        cfg: &IterationConfig,
    ) -> Result<(RadialProfile, IterationState)> {
        let nodes = self.grid.nodes();
        let n = nodes.len();
        let sub: Vec<f64> = nodes.iter().map(|&r| pair.sub.eval(r)).collect();
        let sup: Vec<f64> = nodes.iter().map(|&r| pair.sup.eval(r)).collect();
        let scale = sup.iter().cloned().fold(0.0, f64::max);
        let tol_mono = cfg.tol_mono_rel * scale;
        let abs = self.absorption(lambda);
        let check = |iter: usize, prev: Option<&[f64]>, u: &[f64]| -> Result<(f64, f64)> {
            let mut gap_sub = f64::INFINITY;
            let mut gap_sup = f64::INFINITY;
            for i in 0..n {
                gap_sub = gap_sub.min(u[i] - sub[i]);
                gap_sup = gap_sup.min(sup[i] - u[i]);
                if u[i] < sub[i] - tol_mono || u[i] > sup[i] + tol_mono {
                    return Err(Error::MonotonicityViolation {
                        iteration: iter,
                        radius: nodes[i],
                        detail: format!(
                            "iterate {:.6e} outside [{:.6e}, {:.6e}] on a grid of {n} nodes",
                            u[i], sub[i], sup[i]
                        ),
                    });
                }
                if let Some(prev) = prev {
                    if u[i] < prev[i] - tol_mono {
                        return Err(Error::MonotonicityViolation {
                            iteration: iter,
                            radius: nodes[i],
                            detail: format!(
                                "iterate decreased from {:.6e} to {:.6e} on a grid of {n} nodes",
                                prev[i], u[i]
                            ),
                        });
                    }
                }
            }
            Ok((gap_sub, gap_sup))
        };

        let mut u = sub.clone();
        let (g0, g1) = check(0, None, &u)?;
        let mut log = vec![IterationRecord { iter: 0, residual: f64::NAN, min_gap_sub: g0, min_gap_super: g1 }];
        let mut history = Vec::new();
        for iter in 1..=cfg.max_iterations {
            let f = self.nonlinearity(&u);
            let next = self.op.solve(&abs, &f, sub[0], sub[n - 1])?;
            let (gs, gu) = check(iter, Some(&u), &next)?;
            let top = next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let diff = next.iter().zip(&u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            let residual = if top > 0.0 { diff / top } else { diff };
            history.push(residual);
            log.push(IterationRecord { iter, residual, min_gap_sub: gs, min_gap_super: gu });
            u = next;
            if residual < cfg.tol {
                let current = RadialProfile::new(nodes.to_vec(), u, self.sing_exp())?;
                let state = IterationState {
                    iterate_index: iter,
                    current: current.clone(),
                    residual_history: history,
                    monotone_ok: true,
                    sandwich_ok: true,
                    log,
                };
                return Ok((current, state));
            }
        }
        Err(Error::IterationNonConvergence {
            iterations: cfg.max_iterations,
            residual: history.last().copied().unwrap_or(f64::NAN),
        })
    }
}

/// Discretises `problem` and runs the monotone iteration for `pair`.
pub fn monotone_iterate(
    problem: &AnnulusProblem,
    pair: &SubSuperPair,
    quad: &QuadratureConfig,
    cfg: &IterationConfig,
) -> Result<(RadialProfile, IterationState)> {
    problem.discretize(quad)?.iterate(pair, problem.lambda, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::{ExistenceQuery, LambdaMode, Recipe};
    use crate::solver::barrier::{build_subsuper, Barrier, BarrierTerm, SubSuperParams};

    fn problem(lambda: f64, coupling: f64) -> AnnulusProblem {
        AnnulusProblem {
            kernel: KernelParams::new(3, 1.0, 0.0).unwrap(),
            p: 1.0,
            q: 1.0,
            potential: Potential::Constant(1.0),
            lambda,
            inner_index: 8,
            nodes_per_octave: 8,
            coupling,
        }
    }

    #[test]
    fn linear_problem_is_a_fixed_point() {
        let e = Barrier { dim: 3, terms: vec![BarrierTerm::PowerLog { coef: 1.0, power: -1.0, log_power: 0.0 }] };
        let pair = SubSuperPair {
            recipe: Recipe::CaseA,
            params: SubSuperParams { scale: 1.0, k: None, sigma: None, mu: None, lambda: 0.0 },
            sub: e.clone(),
            sup: e,
        };
        let (u, state) =
            monotone_iterate(&problem(0.0, 0.0), &pair, &QuadratureConfig::default(), &IterationConfig::default())
                .unwrap();
        assert_eq!(state.iterate_index, 1);
        assert!(state.residual_history[0] < 1e-14);
        assert!((u.eval(0.25) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_barrier_is_reported() {
        let query = ExistenceQuery::new(
            KernelParams::new(3, 1.0, 0.0).unwrap(),
            1.0,
            1.0,
            Potential::Constant(1.0),
            LambdaMode::Small,
        )
        .unwrap();
        let pair = build_subsuper(&query, 50.0, 1e-3).unwrap();
        let d = problem(1e-3, 1.0).discretize(&QuadratureConfig::relative(1e-8)).unwrap();
        let gates = d.gates(&pair, 1e-3).unwrap();
        assert!(!gates.super_ok());
        let err = d.iterate(&pair, 1e-3, &IterationConfig::default()).unwrap_err();
        assert!(matches!(err, Error::MonotonicityViolation { .. }), "{err}");
        assert!(err.to_string().contains("25 nodes"));
    }

    #[test]
    fn admissible_pair_gives_monotone_sandwiched_iterates() {
        let query = ExistenceQuery::new(
            KernelParams::new(3, 1.0, 0.0).unwrap(),
            1.0,
            1.0,
            Potential::Constant(1.0),
            LambdaMode::Small,
        )
        .unwrap();
        let pair = build_subsuper(&query, 1e-3, 1e-3).unwrap();
        let d = problem(1e-3, 1.0).discretize(&QuadratureConfig::relative(1e-8)).unwrap();
        assert!(d.gates(&pair, 1e-3).unwrap().ok());
        let (u, state) = d.iterate(&pair, 1e-3, &IterationConfig::default()).unwrap();
        assert!(state.monotone_ok && state.sandwich_ok);
        for rec in &state.log {
            assert!(rec.min_gap_sub >= -1e-12 && rec.min_gap_super >= -1e-12);
        }
        for (&r, &v) in u.nodes().iter().zip(u.values()) {
            assert!(r * v >= 1e-3 * (1.0 - 1e-10) && r * v <= 2e-3);
        }
    }
}
