use serde::Serialize;

use crate::classification::{classify, ExistenceQuery, Recipe, VerdictTag};
use crate::error::{domain, Error, Result};
use crate::estimates::near;
use crate::quadrature::RadialProfile;
use crate::special::{fundamental_schrodinger, log_weight};

/// One explicit radial building block of a barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BarrierTerm {
    /// `coef r^power log^log_power(2e/r)`
    PowerLog { coef: f64, power: f64, log_power: f64 },
    /// `coef G_mu(r)`, the decaying fundamental solution of `-Delta + mu`
    Yukawa { coef: f64, mu: f64 },
}

impl BarrierTerm {
    fn eval(&self, dim: usize, r: f64) -> f64 {
        match *self {
            BarrierTerm::PowerLog { coef, power, log_power } => {
                let mut v = coef * r.powf(power);
                if log_power != 0.0 {
                    v *= log_weight(r).powf(log_power);
                }
                v
            }
            BarrierTerm::Yukawa { coef, mu } => coef * fundamental_schrodinger(dim, mu, r).unwrap_or(f64::NAN),
        }
    }

    fn neg_laplacian(&self, dim: usize, r: f64) -> f64 {
        match *self {
            BarrierTerm::PowerLog { coef, power: e, log_power: b } => {
                let n2 = dim as f64 - 2.0;
                let l = log_weight(r);
                let bracket = (e * e + n2 * e) * l.powf(b) - (2.0 * e + n2) * b * l.powf(b - 1.0)
                    + b * (b - 1.0) * l.powf(b - 2.0);
                -coef * r.powf(e - 2.0) * bracket
            }
            BarrierTerm::Yukawa { mu, .. } => -mu * self.eval(dim, r),
        }
    }

    /// `(a, b)` with the term behaving like `r^{-a} log^b(2e/r)` at the origin.
    fn sing_exp(&self, dim: usize) -> (f64, f64) {
        match *self {
            BarrierTerm::PowerLog { power, log_power, .. } => (-power, log_power),
            BarrierTerm::Yukawa { .. } => (dim as f64 - 2.0, 0.0),
        }
    }
}

/// A positive combination of [`BarrierTerm`]s in dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Barrier {
    pub dim: usize,
    pub terms: Vec<BarrierTerm>,
}

impl Barrier {
    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(self.dim, r)).sum()
    }

    /// `-Delta` of the barrier at radius `r > 0`.
    pub fn neg_laplacian(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.neg_laplacian(self.dim, r)).sum()
    }

    /// Leading behaviour at the origin.
    pub fn sing_exp(&self) -> (f64, f64) {
        self.terms
            .iter()
            .map(|t| t.sing_exp(self.dim))
            .fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |best, e| {
                if e.0 > best.0 + 1e-12 || (near(e.0, best.0) && e.1 > best.1) {
                    e
                } else {
                    best
                }
            })
    }

    pub fn sample(&self, nodes: &[f64]) -> Result<RadialProfile> {
        RadialProfile::from_fn(nodes.to_vec(), |r| self.eval(r), self.sing_exp())
    }

    fn scaled(&self, factor: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| match *t {
                BarrierTerm::PowerLog { coef, power, log_power } => {
                    BarrierTerm::PowerLog { coef: coef * factor, power, log_power }
                }
                BarrierTerm::Yukawa { coef, mu } => BarrierTerm::Yukawa { coef: coef * factor, mu },
            })
            .collect();
        Self { dim: self.dim, terms }
    }
}

/// Constants of a barrier pair. `scale` is the small `m` or the large `M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubSuperParams {
    pub scale: f64,
    pub k: Option<f64>,
    pub sigma: Option<f64>,
    pub mu: Option<f64>,
    pub lambda: f64,
}

/// An ordered pair `sub <= sup` built from explicit profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubSuperPair {
    pub recipe: Recipe,
    pub params: SubSuperParams,
    pub sub: Barrier,
    #[serde(rename = "super")]
    pub sup: Barrier,
}

impl SubSuperPair {
    pub fn sub_profile(&self, nodes: &[f64]) -> Result<RadialProfile> {
        self.sub.sample(nodes)
    }

    pub fn super_profile(&self, nodes: &[f64]) -> Result<RadialProfile> {
        self.sup.sample(nodes)
    }

    /// Same construction with `scale` multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.params.scale *= factor;
        out.sub = self.sub.scaled(factor);
        out.sup = self.sup.scaled(factor);
        out
    }

    /// Smallest `sup / sub` over a dense logarithmic sample of `[1e-8, 1]`.
    pub fn min_order_ratio(&self) -> f64 {
        (0..=1600)
            .map(|i| {
                let r = 10f64.powf(-8.0 * i as f64 / 1600.0);
                self.sup.eval(r) / self.sub.eval(r)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Midpoint of the admissible window for the exponent `k` of the `r^{-k}` term.
pub fn k_window(dim: usize, alpha: f64, p: f64, q: f64) -> (f64, f64) {
    let n2 = dim as f64 - 2.0;
    let lo = (q * n2).max((p + q) * n2 - dim as f64 + alpha) - 2.0;
    (lo.max(0.0), n2)
}

/// Window for `sigma` in the critical-sum branch.
pub fn sigma_window(beta: f64) -> (f64, f64) {
    (0.0, std::f64::consts::LN_2.min(-(beta + 1.0)))
}

fn mid(w: (f64, f64)) -> f64 {
    0.5 * (w.0 + w.1)
}

fn is_critical_sum(query: &ExistenceQuery) -> bool {
    let n = query.dim() as f64;
    near(query.p + query.q, (2.0 * n - query.kernel.alpha) / (n - 2.0))
}

/// Builds the barrier pair for `query` with scale `m_or_m` and spectral
/// parameter `lambda` (which fixes `mu` in the Yukawa based recipes).
pub fn build_subsuper(query: &ExistenceQuery, m_or_m: f64, lambda: f64) -> Result<SubSuperPair> {
    if !(m_or_m > 0.0 && m_or_m.is_finite()) {
        return Err(domain("barrier scale must be positive"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain("lambda must be positive"));
    }
    let verdict = classify(query)?;
    let recipe = match (verdict.tag, verdict.recipe) {
        (VerdictTag::SingularProfileExists, Some(r)) => r,
        _ => {
            return Err(Error::RecipeUnavailable(format!(
                "verdict {:?} ({})",
                verdict.tag,
                verdict.witness.as_deref().unwrap_or("-")
            )))
        }
    };
    let dim = query.dim();
    let n2 = dim as f64 - 2.0;
    let s = m_or_m;
    let pl = |coef: f64, power: f64, log_power: f64| BarrierTerm::PowerLog { coef, power, log_power };
    let barrier = |terms: Vec<BarrierTerm>| Barrier { dim, terms };
    let mut params = SubSuperParams { scale: s, k: None, sigma: None, mu: None, lambda };
    let critical = dim >= 3 && is_critical_sum(query);
    // the critical-sum profile r^{2-N} log^{-sigma}, or r^{-k} otherwise
    let extra = |params: &mut SubSuperParams, coef: f64| {
        if critical {
            let sigma = mid(sigma_window(query.kernel.beta));
            params.sigma = Some(sigma);
            pl(coef, -n2, -sigma)
        } else {
            let k = mid(k_window(dim, query.kernel.alpha, query.p, query.q));
            params.k = Some(k);
            pl(coef, -k, 0.0)
        }
    };
    let pair = match recipe {
        Recipe::N2Log => {
            params.sigma = Some(0.5);
            SubSuperPair {
                recipe,
                params,
                sub: barrier(vec![pl(s, 0.0, 1.0)]),
                sup: barrier(vec![pl(s, 0.0, 1.0), pl(s, 0.0, 0.5)]),
            }
        }
        Recipe::CaseA => {
            let e = extra(&mut params, s);
            SubSuperPair {
                recipe,
                params,
                sub: barrier(vec![pl(s, -n2, 0.0)]),
                sup: barrier(vec![pl(s, -n2, 0.0), e]),
            }
        }
        Recipe::CaseB | Recipe::CaseC => {
            let v0 = match query.potential.sup() {
                Some(v) if v > 0.0 => v,
                Some(_) => 1.0,
                None => return Err(Error::RecipeUnavailable("potential is unbounded".into())),
            };
            let mu = lambda * v0;
            params.mu = Some(mu);
            let k = mid(k_window(dim, query.kernel.alpha, query.p, query.q));
            params.k = Some(k);
            let sub = barrier(vec![BarrierTerm::Yukawa { coef: 1.0, mu }]);
            let mut pair = SubSuperPair {
                recipe,
                params,
                sub,
                sup: barrier(vec![pl(s, -n2, 0.0), pl(s, -k, 0.0)]),
            };
            let mut guard = 0;
            while pair.min_order_ratio() < 1.1 {
                pair.params.scale *= 2.0;
                pair.sup = pair.sup.scaled(2.0);
                guard += 1;
                if guard > 200 {
                    return Err(Error::RecipeUnavailable("no scale orders the pair".into()));
                }
            }
            pair
        }
        Recipe::Cor15 => {
            params.mu = Some(lambda);
            let g = BarrierTerm::Yukawa { coef: s, mu: lambda };
            let e = extra(&mut params, s);
            SubSuperPair { recipe, params, sub: barrier(vec![g]), sup: barrier(vec![g, e]) }
        }
    };
    Ok(pair)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::{LambdaMode, Potential};
    use crate::special::KernelParams;

    fn query(dim: usize, alpha: f64, beta: f64, p: f64, q: f64, v: Potential, mode: LambdaMode) -> ExistenceQuery {
        ExistenceQuery::new(KernelParams::new(dim, alpha, beta).unwrap(), p, q, v, mode).unwrap()
    }

    fn fd_neg_laplacian(b: &Barrier, r: f64) -> f64 {
        let h = 1e-4 * r;
        let d2 = (b.eval(r + h) - 2.0 * b.eval(r) + b.eval(r - h)) / (h * h);
        let d1 = (b.eval(r + h) - b.eval(r - h)) / (2.0 * h);
        -(d2 + (b.dim as f64 - 1.0) / r * d1)
    }

    #[test]
    fn laplacians_match_finite_differences() {
        let cases = [
            Barrier { dim: 3, terms: vec![BarrierTerm::PowerLog { coef: 1.0, power: -0.5, log_power: 0.0 }] },
            Barrier { dim: 3, terms: vec![BarrierTerm::PowerLog { coef: 1.0, power: -1.0, log_power: -0.3 }] },
            Barrier { dim: 4, terms: vec![BarrierTerm::PowerLog { coef: 2.0, power: -1.3, log_power: 1.7 }] },
            Barrier { dim: 2, terms: vec![BarrierTerm::PowerLog { coef: 1.0, power: 0.0, log_power: 0.5 }] },
            Barrier { dim: 3, terms: vec![BarrierTerm::Yukawa { coef: 1.0, mu: 2.0 }] },
        ];
        for b in &cases {
            for &r in &[0.05, 0.3, 0.9] {
                let a = b.neg_laplacian(r);
                let f = fd_neg_laplacian(b, r);
                assert!((a - f).abs() < 1e-5 * (a.abs() + b.eval(r) / (r * r)), "{b:?} r {r}: {a} vs {f}");
            }
        }
    }

    #[test]
    fn critical_profile_laplacian_closed_form() {
        // -Delta(r^{2-N} l^{-s}) = s r^{-N} l^{-s-1} (N - 2 - (s+1)/l)
        let s = 0.3;
        let b = Barrier { dim: 3, terms: vec![BarrierTerm::PowerLog { coef: 1.0, power: -1.0, log_power: -s }] };
        for &r in &[0.01, 0.5] {
            let l = log_weight(r);
            let want = s * r.powi(-3) * l.powf(-s - 1.0) * (1.0 - (s + 1.0) / l);
            assert!((b.neg_laplacian(r) - want).abs() < 1e-12 * want.abs());
        }
    }

    #[test]
    fn recipes_follow_the_classifier() {
        let a = build_subsuper(&query(3, 1.0, 0.0, 1.0, 1.0, Potential::Constant(1.0), LambdaMode::Small), 0.1, 0.01)
            .unwrap();
        assert_eq!(a.recipe, Recipe::CaseA);
        assert!((a.params.k.unwrap() - 0.5).abs() < 1e-15);
        assert!((a.sub.eval(0.25) - 0.4).abs() < 1e-14);

        let crit = query(3, 1.0, -2.0, 2.5, 2.5, Potential::Constant(1.0), LambdaMode::Small);
        let c = build_subsuper(&crit, 0.1, 0.01).unwrap();
        assert!((c.params.sigma.unwrap() - 0.5 * std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(c.sup.sing_exp(), (1.0, 0.0));

        let b = build_subsuper(&query(3, 1.0, 0.0, 0.3, 0.4, Potential::Constant(2.0), LambdaMode::Small), 1.0, 0.5)
            .unwrap();
        assert_eq!(b.recipe, Recipe::CaseB);
        assert_eq!(b.params.mu, Some(1.0));
        assert!(b.min_order_ratio() >= 1.1);

        let n2 = build_subsuper(&query(2, 1.0, 0.0, 1.0, 2.0, Potential::LogLog, LambdaMode::Small), 0.1, 0.01).unwrap();
        assert_eq!(n2.recipe, Recipe::N2Log);
        let r: f64 = 0.01;
        assert!(n2.sub.eval(r) <= n2.sup.eval(r));

        let refused = query(3, 1.0, 0.0, 2.5, 2.5, Potential::Constant(1.0), LambdaMode::Small);
        assert!(matches!(build_subsuper(&refused, 0.1, 0.01), Err(Error::RecipeUnavailable(_))));
    }

    #[test]
    fn rescaling_is_linear() {
        let q = query(3, 1.0, 0.0, 1.0, 1.0, Potential::Constant(1.0), LambdaMode::Small);
        let a = build_subsuper(&q, 0.2, 0.01).unwrap();
        let b = a.rescaled(0.5);
        assert_eq!(b.params.scale, 0.1);
        assert!((b.sup.eval(0.3) - 0.5 * a.sup.eval(0.3)).abs() < 1e-15);
    }
}
