use std::cell::RefCell;

use statrs::function::gamma::ln_gamma;

use super::{integrate_adaptive, Integral, QuadratureConfig, RadialDensity, SingularEnds};
use crate::error::{domain, Error, Result};
use crate::special::{surface_area, KernelParams};

const BAND: f64 = 1e-2;

/// `int_0^pi sin^{N-2}(theta) d theta`
fn angular_norm(dim: usize) -> f64 {
    let n = dim as f64;
    (std::f64::consts::PI.ln() / 2.0 + ln_gamma((n - 1.0) / 2.0) - ln_gamma(n / 2.0)).exp()
}

fn inner_cfg(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: (cfg.rel_tol * 0.1).max(1e-13),
        abs_tol: f64::MIN_POSITIVE,
        max_subdivisions: cfg.max_subdivisions,
    }
}

/// Mean over the unit sphere of `k(|r e - s w|)`, with `diff = |r - s|`
/// supplied separately so that nearly coincident radii keep full precision.
pub(crate) fn angular_mean_diff(
    dim: usize,
    r: f64,
    s: f64,
    diff: f64,
    k: &dyn Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let m = dim as i32 - 2;
    let chord = 2.0 * (r * s).sqrt();
    let integrand = |theta: f64| {
        let d = diff.hypot(chord * (0.5 * theta).sin());
        let w = if m == 0 { 1.0 } else { theta.sin().powi(m) };
        k(d) * w
    };
    let v = integrate_adaptive(integrand, 0.0, std::f64::consts::PI, SingularEnds::LO, cfg)?;
    Ok(v.value / angular_norm(dim))
}

/// Mean over unit directions `w` of `k(|r e - s w|)` in R^N.
///
/// The polar angle is integrated with weight `sin^{N-2}`; the end where the
/// distance can vanish is handled by the singular map.
pub fn angular_mean(
    dim: usize,
    r: f64,
    s: f64,
    k: impl Fn(f64) -> f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    if dim < 2 {
        return Err(domain(format!("dimension {dim} < 2")));
    }
    if !(r > 0.0 && s > 0.0) {
        return Err(domain("radii must be positive"));
    }
    angular_mean_diff(dim, r, s, (r - s).abs(), &k, cfg)
}

/// `int_{rho<|y|<1} K(x - y) f(|y|) dy` at `|x| = r`.
pub fn convolve_radial<D: RadialDensity + ?Sized>(
    params: &KernelParams,
    f: &D,
    r: f64,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    convolve_radial_integral(params, f, r, rho, cfg).map(|i| i.value)
}

/// [`convolve_radial`] with the accumulated error estimate.
pub fn convolve_radial_integral<D: RadialDensity + ?Sized>(
    params: &KernelParams,
    f: &D,
    r: f64,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<Integral> {
    let dim = params.dim;
    let n = dim as f64;
    if !(r > 0.0 && r <= 1.0) {
        return Err(domain(format!("evaluation radius {r} outside (0, 1]")));
    }
    if !(rho >= 0.0 && rho < 1.0) {
        return Err(domain(format!("inner cutoff {rho} outside [0, 1)")));
    }
    let (a, _) = f.sing_exp();
    if a >= n {
        return Err(Error::DivergentIntegrand { exponent: a, dim });
    }
    let sigma = surface_area(dim);
    let icfg = inner_cfg(cfg);
    let kernel = |d: f64| params.eval_unchecked(d);
    let inner_err: RefCell<Option<Error>> = RefCell::new(None);
    let radial = |s: f64, diff: f64| -> f64 {
        let fs = f.eval(s);
        // density and kernel may overflow on nodes packed against 0 or r;
        // the skipped mass is of order eps^{N-a} and eps^{N-alpha}
        if fs == 0.0 || (!fs.is_finite() && s < 1e-100) || diff < 1e-50 * r {
            return 0.0;
        }
        match angular_mean_diff(dim, r, s, diff, &kernel, &icfg) {
            Ok(m) => sigma * s.powi(dim as i32 - 1) * fs * m,
            Err(e) => {
                inner_err.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let surface = |res: Result<Integral>| -> Result<Integral> {
        match (res, inner_err.borrow_mut().take()) {
            (_, Some(e)) => Err(e),
            (res, None) => res,
        }
    };

    let mut total = Integral { value: 0.0, err_est: 0.0, subdivisions: 0 };
    let mut add = |i: Integral| {
        total.value += i.value;
        total.err_est += i.err_est;
        total.subdivisions += i.subdivisions;
    };
    let band_lo = rho.max(r * (1.0 - BAND));
    let band_hi = (r * (1.0 + BAND)).min(1.0);
    if r > rho {
        if band_lo > rho {
            let ends = if rho == 0.0 { SingularEnds::BOTH } else { SingularEnds::HI };
            add(surface(integrate_adaptive(|s| radial(s, r - s), rho, band_lo, ends, cfg))?);
        }
        add(surface(integrate_adaptive(|t| radial(r - t, t), 0.0, r - band_lo, SingularEnds::LO, cfg))?);
    }
    if r < 1.0 {
        if r >= rho {
            add(surface(integrate_adaptive(|t| radial(r + t, t), 0.0, band_hi - r, SingularEnds::LO, cfg))?);
            if band_hi < 1.0 {
                add(surface(integrate_adaptive(|s| radial(s, s - r), band_hi, 1.0, SingularEnds::LO, cfg))?);
            }
        } else {
            add(surface(integrate_adaptive(|s| radial(s, s - r), rho, 1.0, SingularEnds::LO, cfg))?);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::PowerLogDensity;
    use crate::special::laplace_unchecked;
    use std::f64::consts::PI;

    #[test]
    fn mean_value_examples() {
        let cfg = QuadratureConfig::default();
        let e = |d: f64| laplace_unchecked(3, d);
        let want = 1.0 / (2.0 * PI);
        assert!((angular_mean(3, 0.5, 0.25, e, &cfg).unwrap() - want).abs() < 1e-10);
        assert!((angular_mean(3, 0.25, 0.5, e, &cfg).unwrap() - want).abs() < 1e-10);
        for dim in 2..6 {
            assert!((angular_mean(dim, 0.3, 0.7, |_| 1.0, &cfg).unwrap() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_kernel_gives_ball_volume() {
        let p = KernelParams::new(3, 0.0, 0.0).unwrap();
        let one = PowerLogDensity::power(0.0);
        for &r in &[0.01, 0.3, 0.99] {
            let v = convolve_radial(&p, &one, r, 0.0, &Default::default()).unwrap();
            assert!((v - 4.0 * PI / 3.0).abs() < 1e-9, "r {r}: {v}");
        }
        let v = convolve_radial(&p, &one, 0.3, 0.5, &Default::default()).unwrap();
        assert!((v - 4.0 * PI / 3.0 * (1.0 - 0.125)).abs() < 1e-9);
    }

    #[test]
    fn divergence_guard() {
        let p = KernelParams::new(3, 1.0, 0.0).unwrap();
        let f = PowerLogDensity::power(3.0);
        assert!(matches!(
            convolve_radial(&p, &f, 0.5, 0.0, &Default::default()),
            Err(Error::DivergentIntegrand { .. })
        ));
    }

    #[test]
    fn newtonian_potential_of_unit_ball() {
        // E * 1_B at |x| = r equals (3 - r^2)/6 in R^3
        let p = KernelParams::new(3, 1.0, 0.0).unwrap();
        let one = PowerLogDensity::power(0.0);
        for &r in &[1e-3, 0.2, 0.5, 1.0] {
            let v = convolve_radial(&p, &one, r, 0.0, &Default::default()).unwrap() / (4.0 * PI);
            let want = (3.0 - r * r) / 6.0;
            assert!((v - want).abs() < 1e-9 * want, "r {r}: {v} vs {want}");
        }
    }
}
