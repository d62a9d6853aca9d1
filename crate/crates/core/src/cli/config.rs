use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::classification::{ExistenceQuery, LambdaMode, Potential};
use crate::error::{domain, Result};
use crate::quadrature::RadialProfile;
use crate::solver::{IterationConfig, SolverConfig};
use crate::special::KernelParams;

/// Potential as written in a config file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    PowerLog { coef: f64, gamma: f64, tau: f64 },
    Constant { value: f64 },
    LogLog,
    /// CSV `r,value`, relative to the config file
    Tabulated { csv: PathBuf },
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Constant { value: 1.0 }
    }
}

impl PotentialSpec {
    pub fn resolve(&self, base: &Path) -> Result<Potential> {
        Ok(match self {
            PotentialSpec::PowerLog { coef, gamma, tau } => {
                Potential::PowerLog { coef: *coef, gamma: *gamma, tau: *tau }
            }
            PotentialSpec::Constant { value } => Potential::Constant(*value),
            PotentialSpec::LogLog => Potential::LogLog,
            PotentialSpec::Tabulated { csv } => Potential::Tabulated(RadialProfile::read(base.join(csv))?),
        })
    }
}

fn default_lambda_mode() -> LambdaMode {
    LambdaMode::Small
}

/// Fields shared by `classify` and `solve`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryConfig {
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default = "default_lambda_mode")]
    pub lambda_mode: LambdaMode,
}

impl QueryConfig {
    pub fn query(&self, base: &Path) -> Result<ExistenceQuery> {
        let kernel = KernelParams::new(self.dim, self.alpha, self.beta)?;
        ExistenceQuery::new(kernel, self.p, self.q, self.potential.resolve(base)?, self.lambda_mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSet {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

fn default_dim() -> usize {
    3
}

fn default_rel_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    #[serde(rename = "N", default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub sets: Option<Vec<ParamSet>>,
    #[serde(default)]
    pub radii: Option<Vec<f64>>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { dim: 3, sets: None, radii: None, rel_tol: default_rel_tol() }
    }
}

impl AuditConfig {
    /// One set per regime, chosen for `N = 3` and shifted with `N` otherwise.
    pub fn parameter_sets(&self) -> Vec<ParamSet> {
        if let Some(s) = &self.sets {
            return s.clone();
        }
        let n = self.dim as f64;
        let set = |alpha: f64, beta: f64, gamma: f64| ParamSet { alpha, beta, gamma };
        vec![
            set(2.0, 0.0, n - 1.0),
            set(1.0, 0.5, n - 1.0),
            set(1.0, -1.0, n - 1.0),
            set(1.0, -3.0, n - 1.0),
            set(1.0, 0.0, 1.0),
        ]
    }

    /// `1e-4 .. 1e-1` in half decades unless given.
    pub fn radii(&self) -> Vec<f64> {
        match &self.radii {
            Some(r) => r.clone(),
            None => (0..7).map(|i| 10f64.powf(-4.0 + 0.5 * i as f64)).collect(),
        }
    }
}

fn default_npo() -> usize {
    24
}

fn default_schedule() -> Vec<usize> {
    vec![32, 64]
}

fn default_scale() -> f64 {
    0.1
}

fn default_true() -> bool {
    true
}

fn default_tol() -> f64 {
    1e-8
}

fn default_budget() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default = "default_lambda_mode")]
    pub lambda_mode: LambdaMode,
    #[serde(default = "default_npo")]
    pub nodes_per_octave: usize,
    /// inner radii `1/k`
    #[serde(default = "default_schedule")]
    pub inner_schedule: Vec<usize>,
    #[serde(default = "default_scale")]
    pub initial_scale: f64,
    #[serde(default = "default_true")]
    pub auto_scale: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_budget")]
    pub max_iterations: usize,
}

impl SolveConfig {
    pub fn query(&self) -> QueryConfig {
        QueryConfig {
            dim: self.dim,
            alpha: self.alpha,
            beta: self.beta,
            p: self.p,
            q: self.q,
            potential: self.potential.clone(),
            lambda_mode: self.lambda_mode,
        }
    }

    pub fn solver(&self) -> Result<SolverConfig> {
        if !(self.initial_scale > 0.0) || !(self.tol > 0.0) || self.nodes_per_octave == 0 {
            return Err(domain("initial_scale, tol and nodes_per_octave must be positive"));
        }
        Ok(SolverConfig {
            nodes_per_octave: self.nodes_per_octave,
            inner_schedule: self.inner_schedule.clone(),
            initial_scale: self.initial_scale,
            auto_scale: self.auto_scale,
            iteration: IterationConfig { tol: self.tol, max_iterations: self.max_iterations, ..Default::default() },
            ..SolverConfig::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(rename = "N")]
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default = "default_lambda_mode")]
    pub lambda_mode: LambdaMode,
    pub p_max: f64,
    pub q_max: f64,
    pub n_p: usize,
    pub n_q: usize,
}

fn default_cases() -> usize {
    100
}

fn default_seed() -> u64 {
    20240917
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanValueConfig {
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for MeanValueConfig {
    fn default() -> Self {
        Self { cases: default_cases(), seed: default_seed() }
    }
}
