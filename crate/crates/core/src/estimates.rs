//! Two-sided envelopes for truncated Riesz-log potentials, the Psi profile
//! of the nonlinearity, and a Hoelder-modulus probe.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{convolve_radial, PowerLogDensity, QuadratureConfig, RadialDensity};
use crate::special::{log_weight, KernelParams};

const TOL: f64 = 1e-12;

pub(crate) fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * 1f64.max(a.abs()).max(b.abs())
}

/// Behaviour of `I(r) = int_{|y|<1} K(x-y) |y|^{-gamma} dy` as `r -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Supercritical,
    CriticalAbove,
    CriticalLog,
    CriticalBelow,
    Subcritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `r^power * log^log_power(2e/r) * [log log(2e/r)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub power: f64,
    pub log_power: f64,
    pub loglog: bool,
}

impl Envelope {
    pub const ONE: Envelope = Envelope { power: 0.0, log_power: 0.0, loglog: false };

    pub fn eval(&self, r: f64) -> f64 {
        let l = log_weight(r);
        let mut v = 1.0;
        if self.power != 0.0 {
            v *= r.powf(self.power);
        }
        if self.log_power != 0.0 {
            v *= l.powf(self.log_power);
        }
        if self.loglog {
            v *= l.ln();
        }
        v
    }

    pub fn is_constant(&self) -> bool {
        self.power == 0.0 && self.log_power == 0.0 && !self.loglog
    }
}

impl fmt::Display for Envelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        if self.power != 0.0 {
            parts.push(format!("r^{}", self.power));
        }
        if self.log_power != 0.0 {
            parts.push(format!("log^{}(2e/r)", self.log_power));
        }
        if self.loglog {
            parts.push("loglog(2e/r)".to_string());
        }
        write!(f, "{}", parts.join("*"))
    }
}

fn check_exponents(dim: usize, alpha: f64, gamma: f64) -> Result<()> {
    let n = dim as f64;
    if dim < 2 {
        return Err(domain(format!("dimension {dim} < 2")));
    }
    if !(alpha >= 0.0 && alpha < n) {
        return Err(domain(format!("alpha = {alpha} outside [0, {n})")));
    }
    if !(gamma >= 0.0) {
        return Err(domain(format!("gamma = {gamma} must be nonnegative")));
    }
    if gamma >= n {
        return Err(domain(format!("gamma = {gamma} >= N: the potential is infinite")));
    }
    Ok(())
}

pub fn classify_regime(dim: usize, alpha: f64, beta: f64, gamma: f64) -> Result<Regime> {
    check_exponents(dim, alpha, gamma)?;
    let n = dim as f64;
    let s = alpha + gamma;
    Ok(if near(s, n) {
        if near(beta, -1.0) {
            Regime::CriticalLog
        } else if beta > -1.0 {
            Regime::CriticalAbove
        } else {
            Regime::CriticalBelow
        }
    } else if s > n {
        Regime::Supercritical
    } else {
        Regime::Subcritical
    })
}

/// Comparison function of the regime of `(alpha, beta, gamma)`.
pub fn envelope_i(dim: usize, alpha: f64, beta: f64, gamma: f64) -> Result<Envelope> {
    let n = dim as f64;
    Ok(match classify_regime(dim, alpha, beta, gamma)? {
        Regime::Supercritical => Envelope { power: n - alpha - gamma, log_power: beta, loglog: false },
        Regime::CriticalAbove => Envelope { power: 0.0, log_power: 1.0 + beta, loglog: false },
        Regime::CriticalLog => Envelope { power: 0.0, log_power: 0.0, loglog: true },
        Regime::CriticalBelow | Regime::Subcritical => Envelope::ONE,
    })
}

/// The potential with a logarithmic density is bounded above and below.
pub fn envelope_j(dim: usize, alpha: f64, _beta: f64, theta: f64) -> Result<Envelope> {
    check_exponents(dim, alpha, 0.0)?;
    if !(theta >= 0.0) {
        return Err(domain(format!("theta = {theta} must be nonnegative")));
    }
    Ok(Envelope::ONE)
}

/// Extremes of `I/Phi` over a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub spread: f64,
}

impl AuditSummary {
    pub fn bounded(&self, threshold: f64) -> bool {
        self.spread.is_finite() && self.spread < threshold
    }
}

/// Ratios `I/Phi` over the sample. Non-finite values are skipped; an empty
/// sample gives an infinite spread.
pub fn audit_two_sided(samples: &[(f64, f64)], envelope: &Envelope) -> AuditSummary {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(r, v) in samples {
        let q = v / envelope.eval(r);
        if q.is_finite() {
            lo = lo.min(q);
            hi = hi.max(q);
        }
    }
    let spread = if lo <= hi { hi / lo } else { f64::INFINITY };
    AuditSummary { min_ratio: lo, max_ratio: hi, spread }
}

/// One line of the audit CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
    #[serde(rename = "I_value")]
    pub i_value: f64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeAudit {
    pub regime: Regime,
    pub envelope: Envelope,
    pub rows: Vec<AuditRow>,
    pub summary: AuditSummary,
}

/// Evaluates `I` for `f = |y|^{-gamma}` at each radius and audits it against
/// `envelope` (the matched one when `None`). Radii where quadrature fails
/// are kept with `NaN` values.
pub fn audit_regime(
    dim: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    radii: &[f64],
    envelope: Option<Envelope>,
    cfg: &QuadratureConfig,
) -> Result<RegimeAudit> {
    let regime = classify_regime(dim, alpha, beta, gamma)?;
    let envelope = match envelope {
        Some(e) => e,
        None => envelope_i(dim, alpha, beta, gamma)?,
    };
    let params = KernelParams::new(dim, alpha, beta)?;
    let f = PowerLogDensity::power(gamma);
    let values: Vec<Result<f64>> =
        radii.par_iter().map(|&r| convolve_radial(&params, &f, r, 0.0, cfg)).collect();
    let mut rows = Vec::with_capacity(radii.len());
    for (&r, v) in radii.iter().zip(values) {
        let i_value = match v {
            Ok(v) => v,
            Err(Error::NonConvergence { .. }) => f64::NAN,
            Err(e) => return Err(e),
        };
        let env = envelope.eval(r);
        rows.push(AuditRow { alpha, beta, gamma, r, i_value, envelope: env, ratio: i_value / env });
    }
    let samples: Vec<(f64, f64)> = rows.iter().map(|row| (row.r, row.i_value)).collect();
    let summary = audit_two_sided(&samples, &envelope);
    Ok(RegimeAudit { regime, envelope, rows, summary })
}

/// One evaluation of the log-density potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JSample {
    pub r: f64,
    pub rho: f64,
    pub value: f64,
}

/// `J` for `f = log^theta(2e/|y|)` over all `(r, rho)` combinations, with the
/// spread taken jointly.
pub fn audit_j(
    dim: usize,
    alpha: f64,
    beta: f64,
    theta: f64,
    radii: &[f64],
    cutoffs: &[f64],
    cfg: &QuadratureConfig,
) -> Result<(Vec<JSample>, AuditSummary)> {
    let envelope = envelope_j(dim, alpha, beta, theta)?;
    let params = KernelParams::new(dim, alpha, beta)?;
    let f = PowerLogDensity { coef: 1.0, a: 0.0, b: theta };
    let grid: Vec<(f64, f64)> =
        radii.iter().flat_map(|&r| cutoffs.iter().map(move |&rho| (r, rho))).collect();
    let samples = grid
        .par_iter()
        .map(|&(r, rho)| convolve_radial(&params, &f, r, rho, cfg).map(|value| JSample { r, rho, value }))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.r, s.value)).collect();
    Ok((samples, audit_two_sided(&pairs, &envelope)))
}

/// Profile of the right-hand side near the origin when `u ~ r^{2-N}`.
pub fn psi_profile(dim: usize, alpha: f64, beta: f64, p: f64, q: f64) -> Result<Envelope> {
    if dim < 3 {
        return Err(domain("the Psi profile needs N >= 3"));
    }
    let n = dim as f64;
    if !(alpha >= 0.0 && alpha < n) {
        return Err(domain(format!("alpha = {alpha} outside [0, {n})")));
    }
    if !(p > 0.0 && q > 0.0) {
        return Err(domain("p and q must be positive"));
    }
    let pc = (n - alpha) / (n - 2.0);
    let base = -q * (n - 2.0);
    Ok(if near(p, pc) {
        if near(beta, -1.0) {
            Envelope { power: base, log_power: 0.0, loglog: true }
        } else if beta > -1.0 {
            Envelope { power: base, log_power: 1.0 + beta, loglog: false }
        } else {
            Envelope { power: base, log_power: 0.0, loglog: false }
        }
    } else if p < pc {
        Envelope { power: base, log_power: 0.0, loglog: false }
    } else {
        Envelope { power: n - alpha - (p + q) * (n - 2.0), log_power: beta, loglog: false }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderSample {
    pub base: f64,
    pub separation: f64,
    pub difference: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderProbe {
    pub exponent: f64,
    pub samples: Vec<HolderSample>,
    pub sup_ratio: f64,
    /// largest ratio at the finest separations over the largest at the coarsest
    pub tail_growth: f64,
}

impl HolderProbe {
    pub fn stable(&self) -> bool {
        self.sup_ratio.is_finite() && self.tail_growth < 2.0
    }
}

pub const HOLDER_BASES: [f64; 2] = [0.25, 0.5];
pub const HOLDER_SEPARATIONS: std::ops::RangeInclusive<i32> = 3..=10;

/// Samples the modulus `|If(x) - If(y)| / (h^{N/s' - alpha} log^{beta+}(2e/h))`
/// for `y = x + h e` along a ray, `h = 2^-3 .. 2^-10`, at most `pair_budget`
/// pairs.
pub fn holder_modulus_probe<D: RadialDensity + ?Sized>(
    params: &KernelParams,
    f: &D,
    s_exp: f64,
    pair_budget: usize,
    cfg: &QuadratureConfig,
) -> Result<HolderProbe> {
    if !(s_exp > 1.0) {
        return Err(domain(format!("integrability exponent {s_exp} must exceed 1")));
    }
    let n = params.n();
    let s_conj = s_exp / (s_exp - 1.0);
    let exponent = n / s_conj - params.alpha;
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(domain(format!(
            "need alpha < N/s' < alpha + 1, got N/s' = {}",
            n / s_conj
        )));
    }
    if pair_budget == 0 {
        return Err(domain("pair budget must be positive"));
    }
    let beta_plus = params.beta.max(0.0);
    let mut pairs = Vec::new();
    for &base in &HOLDER_BASES {
        for j in HOLDER_SEPARATIONS {
            pairs.push((base, 2f64.powi(-j)));
        }
    }
    pairs.truncate(pair_budget);
    let tight = QuadratureConfig { rel_tol: cfg.rel_tol.min(1e-11), ..*cfg };
    let samples = pairs
        .par_iter()
        .map(|&(base, h)| {
            let ix = convolve_radial(params, f, base, 0.0, &tight)?;
            let iy = convolve_radial(params, f, base + h, 0.0, &tight)?;
            let difference = (ix - iy).abs();
            let ratio = difference / (h.powf(exponent) * log_weight(h).powf(beta_plus));
            Ok(HolderSample { base, separation: h, difference, ratio })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_ratio = samples.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let mid = 2f64.powf(-6.5);
    let coarse = samples.iter().filter(|s| s.separation > mid).map(|s| s.ratio).fold(0.0, f64::max);
    let fine = samples.iter().filter(|s| s.separation < mid).map(|s| s.ratio).fold(0.0, f64::max);
    let tail_growth = if coarse > 0.0 && fine > 0.0 { fine / coarse } else { 0.0 };
    Ok(HolderProbe { exponent, samples, sup_ratio, tail_growth })
}
