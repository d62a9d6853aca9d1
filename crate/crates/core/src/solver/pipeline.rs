use serde::Serialize;

use super::barrier::{build_subsuper, SubSuperPair};
use super::iterate::{AnnulusProblem, Discretization, GateReport, IterationConfig, IterationState};
use super::mass::{extract_singular_mass, SingularMass};
use crate::classification::{classify, ExistenceQuery, LambdaMode, Recipe, Verdict};
use crate::error::{domain, Error, Result};
use crate::quadrature::{QuadratureConfig, RadialProfile};

/// Settings of a constructive run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub nodes_per_octave: usize,
    /// inner radii `1/k`, listed by increasing `k`
    pub inner_schedule: Vec<usize>,
    /// starting `m` (or `M`) before calibration
    pub initial_scale: f64,
    /// rescale `m`/`M` until the discrete super-solution check passes
    pub auto_scale: bool,
    /// number of factor-4 steps tried when searching for `lambda`
    pub lambda_search_steps: usize,
    pub iteration: IterationConfig,
    #[serde(skip)]
    pub quad: QuadratureConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            nodes_per_octave: 24,
            inner_schedule: vec![32, 64],
            initial_scale: 0.1,
            auto_scale: true,
            lambda_search_steps: 24,
            iteration: IterationConfig::default(),
            quad: QuadratureConfig::relative(1e-9),
        }
    }
}

/// Outcome of choosing `m`/`M` and `lambda`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    pub pair: SubSuperPair,
    pub lambda: f64,
    /// discrete barrier checks, one per grid of the schedule
    pub gates: Vec<GateReport>,
    pub log: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationStep {
    pub inner: f64,
    pub solution: RadialProfile,
    pub state: IterationState,
    /// relative sup change against the previous step on the common region
    pub change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub verdict: Verdict,
    pub calibration: Calibration,
    pub steps: Vec<ContinuationStep>,
    pub mass: SingularMass,
}

impl SolveReport {
    /// The solution on the smallest inner radius.
    pub fn finest(&self) -> &ContinuationStep {
        self.steps.last().expect("at least one step")
    }
}

fn validate_schedule(schedule: &[usize]) -> Result<()> {
    if schedule.is_empty() {
        return Err(domain("empty inner schedule"));
    }
    if schedule[0] < 3 || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("inner schedule must be 1/k with increasing k >= 3"));
    }
    Ok(())
}

fn problems(query: &ExistenceQuery, lambda: f64, cfg: &SolverConfig) -> Vec<AnnulusProblem> {
    cfg.inner_schedule
        .iter()
        .map(|&k| AnnulusProblem {
            kernel: query.kernel,
            p: query.p,
            q: query.q,
            potential: query.potential.clone(),
            lambda,
            inner_index: k,
            nodes_per_octave: cfg.nodes_per_octave,
            coupling: 1.0,
        })
        .collect()
}

fn discretize_all(query: &ExistenceQuery, lambda: f64, cfg: &SolverConfig) -> Result<Vec<Discretization>> {
    problems(query, lambda, cfg).iter().map(|p| p.discretize(&cfg.quad)).collect()
}

fn all_gates(discs: &[Discretization], pair: &SubSuperPair, lambda: f64) -> Result<Vec<GateReport>> {
    discs.iter().map(|d| d.gates(pair, lambda)).collect()
}

/// Rescales by `factor` until the super-solution check holds on every grid.
fn scale_search(
    query: &ExistenceQuery,
    discs: &[Discretization],
    start: f64,
    factor: f64,
    lambda: f64,
    gate_lambda: f64,
    log: &mut Vec<String>,
) -> Result<SubSuperPair> {
    let mut scale = start;
    for _ in 0..60 {
        let pair = build_subsuper(query, scale, lambda)?;
        let gates = all_gates(discs, &pair, gate_lambda)?;
        let worst = gates.iter().map(|g| g.super_margin).fold(f64::INFINITY, f64::min);
        log.push(format!("scale {:.6e}: super margin {worst:.3e}", pair.params.scale));
        if gates.iter().all(GateReport::super_ok) {
            return Ok(pair);
        }
        scale = pair.params.scale * factor;
    }
    Err(Error::RecipeUnavailable("no barrier scale passes the super-solution check".into()))
}

/// Picks `m`/`M` and `lambda` for the recipe of `query` so that the discrete
/// barrier inequalities hold on all `discs`.
pub fn calibrate(query: &ExistenceQuery, discs: &[Discretization], cfg: &SolverConfig) -> Result<Calibration> {
    let verdict = classify(query)?;
    let recipe = verdict
        .recipe
        .ok_or_else(|| Error::RecipeUnavailable(format!("verdict {:?}", verdict.tag)))?;
    let given = match query.lambda_mode {
        LambdaMode::Given(l) => Some(l),
        _ => None,
    };
    let mut log = Vec::new();
    let steps = cfg.lambda_search_steps.max(1);
    let small_scale = query.p + query.q > 1.0;
    let (pair, lambda) = match recipe {
        Recipe::CaseA | Recipe::N2Log => {
            let lambda0 = given.unwrap_or(1.0);
            let pair = if cfg.auto_scale {
                // lambda V only helps the super-solution, so check it without
                scale_search(query, discs, cfg.initial_scale, 0.5, lambda0, given.unwrap_or(0.0), &mut log)?
            } else {
                build_subsuper(query, cfg.initial_scale, lambda0)?
            };
            let lambda = match given {
                Some(l) => l,
                None => {
                    let mut found = None;
                    let mut lambda = 1.0;
                    for _ in 0..steps {
                        let gates = all_gates(discs, &pair, lambda)?;
                        let worst = gates.iter().map(|g| g.sub_margin).fold(f64::INFINITY, f64::min);
                        log.push(format!("lambda {lambda:.6e}: sub margin {worst:.3e}"));
                        if gates.iter().all(GateReport::sub_ok) {
                            found = Some(lambda);
                            break;
                        }
                        lambda *= 0.25;
                    }
                    found.ok_or_else(|| Error::RecipeUnavailable("no lambda in the search range".into()))?
                }
            };
            (pair, lambda)
        }
        Recipe::CaseB => {
            let lambda = given.unwrap_or(1.0);
            let pair = if cfg.auto_scale {
                scale_search(query, discs, cfg.initial_scale.max(1.0), 2.0, lambda, lambda, &mut log)?
            } else {
                build_subsuper(query, cfg.initial_scale, lambda)?
            };
            (pair, lambda)
        }
        Recipe::CaseC => {
            let lambda = match given {
                Some(l) => l,
                None => {
                    // the super check does not depend on M here
                    let mut found = None;
                    let mut lambda = 1.0;
                    for _ in 0..steps {
                        let pair = build_subsuper(query, cfg.initial_scale.max(1.0), lambda)?;
                        let gates = all_gates(discs, &pair, lambda)?;
                        let worst = gates.iter().map(|g| g.super_margin).fold(f64::INFINITY, f64::min);
                        log.push(format!("lambda {lambda:.6e}: super margin {worst:.3e}"));
                        if gates.iter().all(GateReport::super_ok) {
                            found = Some(lambda);
                            break;
                        }
                        lambda *= 4.0;
                    }
                    found.ok_or_else(|| Error::RecipeUnavailable("no lambda in the search range".into()))?
                }
            };
            (build_subsuper(query, cfg.initial_scale.max(1.0), lambda)?, lambda)
        }
        Recipe::Cor15 => {
            let lambda = given.ok_or_else(|| domain("this recipe needs a given lambda"))?;
            let pair = if cfg.auto_scale {
                let factor = if small_scale { 0.5 } else { 2.0 };
                scale_search(query, discs, cfg.initial_scale, factor, lambda, lambda, &mut log)?
            } else {
                build_subsuper(query, cfg.initial_scale, lambda)?
            };
            (pair, lambda)
        }
    };
    let mut pair = pair;
    pair.params.lambda = lambda;
    let gates = all_gates(discs, &pair, lambda)?;
    Ok(Calibration { pair, lambda, gates, log })
}

fn continuation(
    discs: &[Discretization],
    pair: &SubSuperPair,
    lambda: f64,
    cfg: &IterationConfig,
) -> Result<Vec<ContinuationStep>> {
    let mut steps: Vec<ContinuationStep> = Vec::with_capacity(discs.len());
    for d in discs {
        let (solution, state) = d.iterate(pair, lambda, cfg)?;
        let change = steps.last().map(|prev| relative_change(&prev.solution, &solution));
        steps.push(ContinuationStep { inner: d.grid().inner(), solution, state, change });
    }
    Ok(steps)
}

/// `max |a - b| / max |b|` over shared nodes with `r >= max(1/8, inner of a)`.
fn relative_change(a: &RadialProfile, b: &RadialProfile) -> f64 {
    let lower = (0.125f64).max(a.nodes()[0]) * (1.0 - 1e-12);
    let mut diff = 0.0f64;
    let mut top = 0.0f64;
    let bn = b.nodes();
    for (&r, &va) in a.nodes().iter().zip(a.values()) {
        if r < lower {
            continue;
        }
        let j = bn.partition_point(|&x| x < r * (1.0 - 1e-9));
        if j < bn.len() && (bn[j] - r).abs() <= 1e-9 * r {
            let vb = b.values()[j];
            diff = diff.max((va - vb).abs());
            top = top.max(vb.abs());
        }
    }
    diff / top
}

/// Solves on each annulus of `cfg.inner_schedule` with the given pair and
/// reports the change between consecutive solutions.
pub fn continuation_shrink(
    query: &ExistenceQuery,
    pair: &SubSuperPair,
    lambda: f64,
    cfg: &SolverConfig,
) -> Result<Vec<ContinuationStep>> {
    validate_schedule(&cfg.inner_schedule)?;
    let discs = discretize_all(query, lambda, cfg)?;
    continuation(&discs, pair, lambda, &cfg.iteration)
}

/// Classification, calibration, continuation over the schedule and mass
/// extraction on the finest annulus.
pub fn solve(query: &ExistenceQuery, cfg: &SolverConfig) -> Result<SolveReport> {
    validate_schedule(&cfg.inner_schedule)?;
    let verdict = classify(query)?;
    if verdict.recipe.is_none() {
        return Err(Error::RecipeUnavailable(format!(
            "verdict {:?} ({})",
            verdict.tag,
            verdict.witness.as_deref().unwrap_or("-")
        )));
    }
    let discs = discretize_all(query, 0.0, cfg)?;
    let calibration = calibrate(query, &discs, cfg)?;
    let steps = continuation(&discs, &calibration.pair, calibration.lambda, &cfg.iteration)?;
    let mass = extract_singular_mass(&steps.last().expect("nonempty schedule").solution, query.dim())?;
    Ok(SolveReport { verdict, calibration, steps, mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::Potential;
    use crate::special::KernelParams;

    fn case_a(mode: LambdaMode) -> ExistenceQuery {
        ExistenceQuery::new(KernelParams::new(3, 1.0, 0.0).unwrap(), 1.0, 1.0, Potential::Constant(1.0), mode).unwrap()
    }

    fn coarse() -> SolverConfig {
        SolverConfig { nodes_per_octave: 8, inner_schedule: vec![8, 16], initial_scale: 1e-2, ..Default::default() }
    }

    #[test]
    fn small_lambda_run_passes_all_checks() {
        let report = solve(&case_a(LambdaMode::Small), &coarse()).unwrap();
        let cal = &report.calibration;
        assert!(cal.gates.iter().all(GateReport::ok));
        assert!(cal.lambda <= 1.0);
        assert_eq!(cal.pair.params.lambda, cal.lambda);
        assert_eq!(report.steps.len(), 2);
        assert!(report.steps[1].change.unwrap() < 1e-2);
        let m = cal.pair.params.scale;
        assert!(report.mass.profile_coefficient >= m && report.mass.profile_coefficient <= 2.0 * m);
    }

    #[test]
    fn single_step_schedule_echoes_the_iteration() {
        let query = case_a(LambdaMode::Given(1e-3));
        let cfg = SolverConfig { inner_schedule: vec![8], ..coarse() };
        let pair = build_subsuper(&query, 1e-3, 1e-3).unwrap();
        let steps = continuation_shrink(&query, &pair, 1e-3, &cfg).unwrap();
        assert_eq!(steps.len(), 1);
        assert!(steps[0].change.is_none());
        let problem = &problems(&query, 1e-3, &cfg)[0];
        let (u, _) = problem.discretize(&cfg.quad).unwrap().iterate(&pair, 1e-3, &cfg.iteration).unwrap();
        assert_eq!(u, steps[0].solution);
    }

    #[test]
    fn schedule_validation_and_refusal() {
        let bad = SolverConfig { inner_schedule: vec![16, 8], ..coarse() };
        assert!(solve(&case_a(LambdaMode::Small), &bad).is_err());
        let refused =
            ExistenceQuery::new(KernelParams::new(3, 1.0, 0.0).unwrap(), 2.5, 2.5, Potential::Constant(1.0), LambdaMode::Small)
                .unwrap();
        assert!(matches!(solve(&refused, &coarse()), Err(Error::RecipeUnavailable(_))));
    }

    #[test]
    fn sublinear_and_linear_sum_recipes_run() {
        let b = ExistenceQuery::new(KernelParams::new(3, 1.0, 0.0).unwrap(), 0.3, 0.4, Potential::Constant(1.0), LambdaMode::Small)
            .unwrap();
        let rb = solve(&b, &coarse()).unwrap();
        assert_eq!(rb.calibration.pair.recipe, Recipe::CaseB);
        assert!(rb.steps.iter().all(|s| s.state.monotone_ok && s.state.sandwich_ok));

        let c = ExistenceQuery::new(KernelParams::new(3, 1.0, 0.0).unwrap(), 0.5, 0.5, Potential::Constant(1.0), LambdaMode::Large)
            .unwrap();
        let rc = solve(&c, &coarse()).unwrap();
        assert_eq!(rc.calibration.pair.recipe, Recipe::CaseC);
        assert!(rc.calibration.gates.iter().all(GateReport::super_ok));
    }
}
