//! Existence and non-existence predicates for singular radial solutions.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::estimates::near;
use crate::quadrature::{integrate_adaptive, QuadratureConfig, RadialDensity, RadialProfile, SingularEnds};
use crate::special::{log_weight, surface_area, KernelParams};

/// The potential `V` on `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// `coef * r^{-gamma} * log^tau(e/r)`
    PowerLog { coef: f64, gamma: f64, tau: f64 },
    Constant(f64),
    /// `log log(2e/r)`
    LogLog,
    Tabulated(RadialProfile),
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::PowerLog { coef, gamma, tau } => {
                if !(*coef > 0.0) || !gamma.is_finite() || !tau.is_finite() {
                    return Err(domain("power-log potential needs coef > 0 and finite exponents"));
                }
            }
            Potential::Constant(a) => {
                if !(*a >= 0.0) || !a.is_finite() {
                    return Err(domain("constant potential must be finite and nonnegative"));
                }
            }
            Potential::LogLog => {}
            Potential::Tabulated(p) => {
                if p.values().iter().any(|&v| v < 0.0) {
                    return Err(domain("tabulated potential must be nonnegative"));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Potential::PowerLog { coef, gamma, tau } => {
                let mut v = *coef;
                if *gamma != 0.0 {
                    v *= r.powf(-gamma);
                }
                if *tau != 0.0 {
                    v *= (1.0 - r.ln()).powf(*tau);
                }
                v
            }
            Potential::Constant(a) => *a,
            Potential::LogLog => log_weight(r).ln(),
            Potential::Tabulated(p) => p.eval(r),
        }
    }

    /// `sup V` over `(0, 1]`, or `None` when `V` is unbounded at the origin.
    pub fn sup(&self) -> Option<f64> {
        match self {
            Potential::Constant(a) => Some(*a),
            Potential::LogLog => None,
            Potential::PowerLog { gamma, tau, .. } => {
                if *gamma > 0.0 || (*gamma == 0.0 && *tau > 0.0) {
                    return None;
                }
                // continuous and bounded; sample densely in log r
                let mut best = self.eval(1.0);
                for i in 1..=4000 {
                    let r = (-(i as f64) * 0.01).exp();
                    best = best.max(self.eval(r));
                }
                Some(best)
            }
            Potential::Tabulated(p) => {
                let (a, b) = p.sing_exp();
                if a > 0.0 || (a == 0.0 && b > 0.0) {
                    return None;
                }
                Some(p.values().iter().cloned().fold(0.0, f64::max))
            }
        }
    }

    fn label(&self) -> String {
        match self {
            Potential::PowerLog { coef, gamma, tau } => format!("{coef}*r^-{gamma}*log^{tau}(e/r)"),
            Potential::Constant(a) => format!("{a}"),
            Potential::LogLog => "loglog(2e/r)".into(),
            Potential::Tabulated(_) => "tabulated".into(),
        }
    }
}

/// How the spectral parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// some `lambda` below an unknown threshold; searched downward
    Small,
    /// some `lambda` above an unknown threshold; searched upward
    Large,
    Given(f64),
}

/// A full problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceQuery {
    pub kernel: KernelParams,
    pub p: f64,
    pub q: f64,
    pub potential: Potential,
    pub lambda_mode: LambdaMode,
}

impl ExistenceQuery {
    pub fn new(kernel: KernelParams, p: f64, q: f64, potential: Potential, lambda_mode: LambdaMode) -> Result<Self> {
        if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
            return Err(domain("p and q must be positive"));
        }
        potential.validate()?;
        if let LambdaMode::Given(l) = lambda_mode {
            if !(l > 0.0 && l.is_finite()) {
                return Err(domain("given lambda must be positive"));
            }
        }
        Ok(Self { kernel, p, q, potential, lambda_mode })
    }

    pub fn dim(&self) -> usize {
        self.kernel.dim
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictTag {
    SingularProfileExists,
    NoSingularSolution,
    RemovableOnly,
    OutOfScope,
}

/// Which explicit sub/super-solution construction applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Recipe {
    /// `N = 2`, logarithmic profile, small `lambda`
    #[serde(rename = "N2_Log")]
    N2Log,
    /// `p + q > 1`
    CaseA,
    /// `p + q < 1`
    CaseB,
    /// `p + q = 1`, large `lambda`
    CaseC,
    /// `V = 1` with a prescribed `lambda`, `p + q != 1`
    Cor15,
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Recipe::N2Log => "N2_Log",
            Recipe::CaseA => "CaseA",
            Recipe::CaseB => "CaseB",
            Recipe::CaseC => "CaseC",
            Recipe::Cor15 => "Cor15",
        };
        f.write_str(s)
    }
}

/// Identifiers of the conditions a verdict can rest on.
pub mod witness {
    pub const MAX_EXPONENT: &str = "max-exponent";
    pub const SUPERCRITICAL_SUM: &str = "supercritical-sum";
    pub const CRITICAL_SUM_BETA: &str = "critical-sum-beta";
    pub const POTENTIAL_GROWTH: &str = "potential-growth";
    pub const N2_Q_AT_MOST_ONE: &str = "n2-q-at-most-one";
    pub const N2_SLOW_GROWTH: &str = "n2-slow-growth";
    pub const N2_LAMBDA_MODE: &str = "n2-lambda-mode";
    pub const N2_DINI: &str = "n2-dini";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "verdict")]
    pub tag: VerdictTag,
    pub recipe: Option<Recipe>,
    pub witness: Option<String>,
}

impl Verdict {
    fn exists(recipe: Recipe) -> Self {
        Self { tag: VerdictTag::SingularProfileExists, recipe: Some(recipe), witness: None }
    }
    fn with(tag: VerdictTag, witness: &str) -> Self {
        Self { tag, recipe: None, witness: Some(witness.to_string()) }
    }
}

/// Whether `V` satisfies the Dini-type integrability that makes isolated
/// singularities of the linear equation fundamental-solution-like.
pub fn dini_check(dim: usize, potential: &Potential) -> Result<bool> {
    if dim < 2 {
        return Err(domain(format!("dimension {dim} < 2")));
    }
    match potential {
        Potential::PowerLog { gamma, tau, .. } => Ok(if near(*gamma, 2.0) {
            let bound = if dim == 2 { -2.0 } else { -1.0 };
            *tau < bound && !near(*tau, bound)
        } else {
            *gamma < 2.0
        }),
        Potential::Constant(_) | Potential::LogLog => Ok(true),
        Potential::Tabulated(p) => {
            // s V(s), with an extra log weight in the plane, in the planar measure
            let g = |r: f64| {
                let w = if dim == 2 { log_weight(r) } else { 1.0 };
                w * p.eval(r)
            };
            match annular_divergence_test(|r| surface_area(2) * r * g(r))? {
                L1Verdict::Converges { .. } => Ok(true),
                L1Verdict::Diverges { .. } => Ok(false),
            }
        }
    }
}

/// `max{p, q} < N/(N-2)` together with the subcritical sum, or the critical
/// sum when `beta < -1`. Always false for `N < 3`.
pub fn exponent_conditions(dim: usize, alpha: f64, beta: f64, p: f64, q: f64) -> bool {
    failed_condition(dim, alpha, beta, p, q).is_none() && dim >= 3
}

fn failed_condition(dim: usize, alpha: f64, beta: f64, p: f64, q: f64) -> Option<&'static str> {
    let n = dim as f64;
    let cap = n / (n - 2.0);
    let m = p.max(q);
    if !(m < cap) || near(m, cap) {
        return Some(witness::MAX_EXPONENT);
    }
    let sum = p + q;
    let crit = (2.0 * n - alpha) / (n - 2.0);
    if near(sum, crit) {
        if beta < -1.0 && !near(beta, -1.0) {
            None
        } else {
            Some(witness::CRITICAL_SUM_BETA)
        }
    } else if sum < crit {
        None
    } else {
        Some(witness::SUPERCRITICAL_SUM)
    }
}

fn inconclusive_tabulated(what: &str) -> Error {
    Error::Inconclusive(format!("{what} is not decided for tabulated potentials"))
}

/// Growth restriction on `V` near the origin, depending on `q`.
pub fn potential_growth_check(dim: usize, q: f64, potential: &Potential) -> Result<bool> {
    if dim < 3 {
        return Err(domain("the growth condition is stated for N >= 3"));
    }
    let n = dim as f64;
    if q > 1.0 && !near(q, 1.0) {
        let thr = (q - 1.0) * (n - 2.0);
        match potential {
            Potential::PowerLog { gamma, tau, .. } => {
                Ok(if near(*gamma, thr) { *tau < 0.0 } else { *gamma < thr })
            }
            Potential::Constant(_) | Potential::LogLog => Ok(true),
            Potential::Tabulated(_) => Err(inconclusive_tabulated("the growth condition")),
        }
    } else {
        bounded_near_origin(potential, "boundedness")
    }
}

fn bounded_near_origin(potential: &Potential, what: &str) -> Result<bool> {
    match potential {
        Potential::PowerLog { gamma, tau, .. } => {
            Ok(if gamma.abs() < 1e-12 { *tau <= 0.0 } else { *gamma < 0.0 })
        }
        Potential::Constant(_) => Ok(true),
        Potential::LogLog => Ok(false),
        Potential::Tabulated(_) => Err(inconclusive_tabulated(what)),
    }
}

/// `V = O(log^eps(2e/r))` for every `eps > 0`.
pub fn n2_slowgrowth_check(potential: &Potential) -> Result<bool> {
    match potential {
        Potential::LogLog => Ok(true),
        other => bounded_near_origin(other, "slow growth"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceRate {
    Log,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum L1Verdict {
    Converges { value: f64 },
    Diverges { rate: DivergenceRate },
}

pub const DYADIC_DEPTH: usize = 40;
const TAIL: usize = 5;
const RATIO_LO: f64 = 0.95;
const RATIO_HI: f64 = 1.05;

/// Decides `int_0^{1/2} h(r) dr < inf` from the dyadic pieces
/// `A_j = int_{2^{-j-1}}^{2^{-j}} h`, `j = 1..=40`, using the trend of
/// the last five ratios `A_{j+1}/A_j`.
pub fn annular_divergence_test(h: impl Fn(f64) -> f64) -> Result<L1Verdict> {
    let cfg = QuadratureConfig { rel_tol: 1e-10, abs_tol: f64::MIN_POSITIVE, max_subdivisions: 200 };
    let mut pieces = Vec::with_capacity(DYADIC_DEPTH);
    for j in 1..=DYADIC_DEPTH {
        let hi = 2f64.powi(-(j as i32));
        let a = integrate_adaptive(&h, 0.5 * hi, hi, SingularEnds::NONE, &cfg)?.value;
        if a < 0.0 {
            return Err(Error::Inconclusive(format!("negative annular mass at j = {j}")));
        }
        pieces.push(a);
    }
    let total: f64 = pieces.iter().sum();
    let last = pieces[DYADIC_DEPTH - 1];
    if last == 0.0 {
        return Ok(L1Verdict::Converges { value: total });
    }
    let ratios: Vec<f64> = pieces[DYADIC_DEPTH - TAIL - 1..]
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { f64::INFINITY })
        .collect();
    if ratios.iter().all(|&x| x < RATIO_LO) {
        let rho = ratios.iter().cloned().fold(0.0, f64::max);
        return Ok(L1Verdict::Converges { value: total + last * rho / (1.0 - rho) });
    }
    if ratios.iter().all(|&x| x > RATIO_HI) {
        return Ok(L1Verdict::Diverges { rate: DivergenceRate::Power });
    }
    if ratios.iter().all(|&x| (RATIO_LO..=RATIO_HI).contains(&x)) {
        return Ok(L1Verdict::Diverges { rate: DivergenceRate::Log });
    }
    Err(Error::Inconclusive(format!("annular ratios {ratios:?} show no clean trend")))
}

/// Whether the radial function `g` is integrable over `B_{1/2}` in R^N.
pub fn l1loc_divergence_test<D: RadialDensity + ?Sized>(g: &D, dim: usize) -> Result<L1Verdict> {
    if dim < 2 {
        return Err(domain(format!("dimension {dim} < 2")));
    }
    let sigma = surface_area(dim);
    annular_divergence_test(|r| sigma * r.powi(dim as i32 - 1) * g.eval(r))
}

/// Existence verdict for a query.
pub fn classify(query: &ExistenceQuery) -> Result<Verdict> {
    let dim = query.dim();
    let (p, q) = (query.p, query.q);
    if dim == 2 {
        if !(q > 1.0) || near(q, 1.0) {
            return Ok(Verdict::with(VerdictTag::OutOfScope, witness::N2_Q_AT_MOST_ONE));
        }
        let slow = n2_slowgrowth_check(&query.potential)?;
        if slow && query.lambda_mode == LambdaMode::Small {
            return Ok(Verdict::exists(Recipe::N2Log));
        }
        if dini_check(2, &query.potential)? {
            return Ok(Verdict::with(VerdictTag::RemovableOnly, witness::N2_DINI));
        }
        let w = if slow { witness::N2_LAMBDA_MODE } else { witness::N2_SLOW_GROWTH };
        return Ok(Verdict::with(VerdictTag::OutOfScope, w));
    }
    let k = &query.kernel;
    if let Some(w) = failed_condition(dim, k.alpha, k.beta, p, q) {
        return Ok(Verdict::with(VerdictTag::NoSingularSolution, w));
    }
    if !potential_growth_check(dim, q, &query.potential)? {
        return Ok(Verdict::with(VerdictTag::NoSingularSolution, witness::POTENTIAL_GROWTH));
    }
    let sum = p + q;
    let unit_potential = matches!(query.potential, Potential::Constant(a) if a == 1.0);
    let recipe = if near(sum, 1.0) {
        Recipe::CaseC
    } else if matches!(query.lambda_mode, LambdaMode::Given(_)) && unit_potential {
        Recipe::Cor15
    } else if sum > 1.0 {
        Recipe::CaseA
    } else {
        Recipe::CaseB
    };
    Ok(Verdict::exists(recipe))
}

/// One cell of a `(p, q)` sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub verdict: String,
    pub witness: String,
}

/// Classifies `p = p_max i/n_p`, `q = q_max j/n_q` for `i, j >= 1`, p-major.
pub fn sweep_pq(
    kernel: KernelParams,
    potential: &Potential,
    lambda_mode: LambdaMode,
    p_max: f64,
    q_max: f64,
    n_p: usize,
    n_q: usize,
) -> Result<Vec<SweepRow>> {
    if !(p_max > 0.0 && q_max > 0.0) || n_p == 0 || n_q == 0 {
        return Err(domain("sweep needs positive ranges and step counts"));
    }
    let cells: Vec<(f64, f64)> = (1..=n_p)
        .flat_map(|i| (1..=n_q).map(move |j| (p_max * i as f64 / n_p as f64, q_max * j as f64 / n_q as f64)))
        .collect();
    cells
        .par_iter()
        .map(|&(p, q)| {
            let query = ExistenceQuery::new(kernel, p, q, potential.clone(), lambda_mode)?;
            let v = classify(&query)?;
            let witness = match (&v.recipe, &v.witness) {
                (Some(r), _) => r.to_string(),
                (None, Some(w)) => w.clone(),
                (None, None) => String::new(),
            };
            Ok(SweepRow {
                dim: kernel.dim,
                alpha: kernel.alpha,
                beta: kernel.beta,
                p,
                q,
                verdict: format!("{:?}", v.tag),
                witness,
            })
        })
        .collect()
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
