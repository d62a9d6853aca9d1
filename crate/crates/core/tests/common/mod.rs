//! Reference predicates written directly from the stated conditions, without
//! going through the library's classifier.

#![allow(dead_code)]

const EPS: f64 = 1e-12;

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() < EPS
}

fn lt(a: f64, b: f64) -> bool {
    a < b && !eq(a, b)
}

/// `V = c r^{-gamma} log^tau(e/r)` near the origin.
#[derive(Debug, Clone, Copy)]
pub struct PowerLogV {
    pub gamma: f64,
    pub tau: f64,
}

/// `int_0^1 s V(s) ds < inf`, with the extra `log(1/s)` factor when `N = 2`.
pub fn dini(dim: usize, v: PowerLogV) -> bool {
    // s^{1-gamma} log^{tau + [N=2]}: integrable iff gamma < 2, or gamma = 2
    // with the total log exponent below -1
    let log_exp = if dim == 2 { v.tau + 1.0 } else { v.tau };
    if eq(v.gamma, 2.0) {
        lt(log_exp, -1.0)
    } else {
        v.gamma < 2.0
    }
}

/// Growth restriction on `V` in dimension `N >= 3`.
pub fn growth(dim: usize, q: f64, v: PowerLogV) -> bool {
    let n = dim as f64;
    if q > 1.0 && !eq(q, 1.0) {
        // little-o of r^{-(q-1)(N-2)}
        let t = (q - 1.0) * (n - 2.0);
        lt(v.gamma, t) || (eq(v.gamma, t) && v.tau < 0.0)
    } else {
        // bounded
        lt(v.gamma, 0.0) || (eq(v.gamma, 0.0) && v.tau <= 0.0)
    }
}

/// Strict subcritical window.
pub fn subcritical(dim: usize, alpha: f64, p: f64, q: f64) -> bool {
    let n = dim as f64;
    lt(p.max(q), n / (n - 2.0)) && lt(p + q, (2.0 * n - alpha) / (n - 2.0))
}

/// Critical sum rescued by a decaying kernel logarithm.
pub fn critical(dim: usize, alpha: f64, beta: f64, p: f64, q: f64) -> bool {
    let n = dim as f64;
    lt(p.max(q), n / (n - 2.0)) && eq(p + q, (2.0 * n - alpha) / (n - 2.0)) && lt(beta, -1.0)
}

/// Existence of a solution comparable to `r^{2-N}` for some `lambda`, `N >= 3`.
pub fn exists(dim: usize, alpha: f64, beta: f64, p: f64, q: f64, v: PowerLogV) -> bool {
    growth(dim, q, v) && (subcritical(dim, alpha, p, q) || critical(dim, alpha, beta, p, q))
}
