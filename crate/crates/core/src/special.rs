//! Kernel, fundamental solutions and the Bessel function they rest on.

use std::f64::consts::{LN_2, PI};

use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};

/// `log(2e/r)`, the slowly varying weight used throughout.
#[inline]
pub fn log_weight(r: f64) -> f64 {
    1.0 + LN_2 - r.ln()
}

/// Parameters of the kernel `d^{-alpha} log^beta(2e/d)` in dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl KernelParams {
    pub fn new(dim: usize, alpha: f64, beta: f64) -> Result<Self> {
        if dim < 2 {
            return Err(domain(format!("dimension {dim} < 2")));
        }
        if !(alpha >= 0.0 && alpha < dim as f64) {
            return Err(domain(format!("alpha = {alpha} outside [0, {dim})")));
        }
        if !beta.is_finite() {
            return Err(domain("beta must be finite"));
        }
        Ok(Self { dim, alpha, beta })
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    /// Kernel value without the domain check. Callers guarantee `0 < d <= 2`.
    #[inline]
    pub(crate) fn eval_unchecked(&self, d: f64) -> f64 {
        let mut v = if self.alpha == 0.0 { 1.0 } else { d.powf(-self.alpha) };
        if self.beta != 0.0 {
            v *= log_weight(d).powf(self.beta);
        }
        v
    }
}

/// `d^{-alpha} log^beta(2e/d)` for a chord length `0 < d <= 2`.
pub fn kernel_eval(params: &KernelParams, d: f64) -> Result<f64> {
    // tolerate the rounding of |x - y| for antipodal boundary points
    if !(d > 0.0 && d <= 2.0 * (1.0 + 1e-12)) {
        return Err(domain(format!("kernel distance {d} outside (0, 2]")));
    }
    Ok(params.eval_unchecked(d.min(2.0)))
}

/// Area of the unit sphere in R^N.
pub fn surface_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// Laplace fundamental solution normalised so that `-Delta E = delta_0`.
///
/// For `N = 2` the additive constant is fixed by `E(1) = 1/(2 pi)`.
pub fn fundamental_laplace(dim: usize, r: f64) -> Result<f64> {
    if dim < 2 {
        return Err(domain(format!("dimension {dim} < 2")));
    }
    if !(r > 0.0) {
        return Err(domain(format!("radius {r} must be positive")));
    }
    Ok(laplace_unchecked(dim, r))
}

#[inline]
pub(crate) fn laplace_unchecked(dim: usize, r: f64) -> f64 {
    if dim == 2 {
        (1.0 - r.ln()) / (2.0 * PI)
    } else {
        let n = dim as f64;
        r.powf(2.0 - n) / ((n - 2.0) * surface_area(dim))
    }
}

/// Which fundamental solution to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FundamentalSolutionKind {
    Laplace,
    Schrodinger { mu: f64 },
}

impl FundamentalSolutionKind {
    pub fn eval(&self, dim: usize, r: f64) -> Result<f64> {
        match *self {
            Self::Laplace => fundamental_laplace(dim, r),
            Self::Schrodinger { mu } => fundamental_schrodinger(dim, mu, r),
        }
    }
}

/// Fundamental solution of `-Delta + mu` in R^N, `N >= 3`.
pub fn fundamental_schrodinger(dim: usize, mu: f64, r: f64) -> Result<f64> {
    if dim < 3 {
        return Err(domain(format!("dimension {dim} < 3")));
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(domain(format!("mu = {mu} must be positive")));
    }
    if !(r > 0.0) {
        return Err(domain(format!("radius {r} must be positive")));
    }
    let n = dim as f64;
    let nu = (n - 2.0) / 2.0;
    let z = mu.sqrt() * r;
    let scaled = bessel_k(nu, z)? * z.powf(nu);
    Ok(r.powf(2.0 - n) * (2.0 * PI).powf(-n / 2.0) * scaled)
}

// Taylor coefficients of 1/Gamma(1+x) about x = 0.
const RGAM: [f64; 29] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
];

/// Returns `(gam1, gam2, 1/Gamma(1+x), 1/Gamma(1-x))` for `|x| <= 1/2`.
fn temme_gammas(x: f64) -> (f64, f64, f64, f64) {
    let mut odd = 0.0;
    let mut even = 0.0;
    for j in (0..RGAM.len()).rev() {
        if j % 2 == 1 {
            odd = odd * x * x + RGAM[j];
        } else {
            even = even * x * x + RGAM[j];
        }
    }
    // odd part of 1/Gamma(1+x) is x * odd
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, gam2 - x * gam1, gam2 + x * gam1)
}

/// Modified Bessel function of the second kind `K_nu(z)` for real `nu`, `z > 0`.
///
/// Half-integer orders use the terminating closed form. Other orders use
/// Temme's series for `z < 2`, Steed's continued fraction otherwise, and
/// forward recurrence in the order.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(domain(format!("bessel_k argument {z} must be positive and finite")));
    }
    if !nu.is_finite() {
        return Err(domain("bessel_k order must be finite"));
    }
    let nu = nu.abs();
    let twice = 2.0 * nu;
    let v = if (twice - twice.round()).abs() < 1e-14 && (twice.round() as i64) % 2 == 1 {
        half_integer_k(((twice.round() as i64 - 1) / 2) as usize, z)
    } else {
        temme_k(nu, z)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("K_{nu}({z}) is not representable")))
    }
}

fn half_integer_k(n: usize, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let inv = 1.0 / (2.0 * z);
    for k in 0..n {
        let kf = k as f64;
        let nf = n as f64;
        term *= (nf + kf + 1.0) * (nf - kf) / (kf + 1.0) * inv;
        sum += term;
    }
    (PI / (2.0 * z)).sqrt() * (-z).exp() * sum
}

fn temme_k(nu: f64, x: f64) -> f64 {
    const EPS: f64 = 1e-16;
    let nl = (nu + 0.5).floor() as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let (mut rkmu, mut rk1);
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        let mut i = 1.0;
        loop {
            ff = (i * ff + p + q) / (i * i - xmu2);
            c *= dd / i;
            p /= i - xmu;
            q /= i + xmu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - i * ff);
            if del.abs() < sum.abs() * EPS || i > 500.0 {
                break;
            }
            i += 1.0;
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut i = 2.0;
        loop {
            a -= 2.0 * (i - 1.0);
            c = -a * c / i;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS || i > 10_000.0 {
                break;
            }
            i += 1.0;
        }
        h *= a1;
        rkmu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    for i in 1..=nl {
        let next = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = next;
    }
    rkmu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn kernel_examples() {
        let k = KernelParams::new(3, 0.0, 0.0).unwrap();
        assert_eq!(kernel_eval(&k, 1.0).unwrap(), 1.0);
        let k = KernelParams::new(3, 1.0, 2.0).unwrap();
        assert!(rel(kernel_eval(&k, 0.5).unwrap(), 11.388_801_555_825_173_87) < 1e-14);
        let k = KernelParams::new(3, 0.0, 1.0).unwrap();
        assert!(rel(kernel_eval(&k, 2.0).unwrap(), 1.0) < 1e-15);
        assert!(kernel_eval(&k, 0.0).is_err());
        assert!(kernel_eval(&k, 2.5).is_err());
        assert!(KernelParams::new(3, 3.0, 0.0).is_err());
        assert!(KernelParams::new(1, 0.0, 0.0).is_err());
    }

    #[test]
    fn laplace_examples() {
        let c = 1.0 / (2.0 * PI);
        assert!(rel(fundamental_laplace(2, 1.0).unwrap(), c) < 1e-15);
        assert!(rel(fundamental_laplace(3, 0.5).unwrap(), c) < 1e-14);
        assert!(fundamental_laplace(2, std::f64::consts::E).unwrap().abs() < 1e-16);
        assert!(fundamental_laplace(3, 0.0).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!(rel(surface_area(2), 2.0 * PI) < 1e-14);
        assert!(rel(surface_area(3), 4.0 * PI) < 1e-14);
        assert!(rel(surface_area(4), 2.0 * PI * PI) < 1e-14);
    }

    #[test]
    fn bessel_reference_values() {
        // arbitrary-precision reference values
        let cases = [
            (0.5, 1.0, 0.461_068_504_447_894_558_44),
            (1.5, 2.0, 0.179_906_657_952_092_171_05),
            (1.0, 1e-6, 999_999.999_992_784_278_96),
            (2.0, 50.0, 3.547_931_838_858_197_738e-23),
            (4.0, 0.01, 4_799_960_000.249_997_517_1),
        ];
        for (nu, z, want) in cases {
            let got = bessel_k(nu, z).unwrap();
            assert!(rel(got, want) < 1e-12, "K_{nu}({z}) = {got}, want {want}");
        }
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(matches!(bessel_k(300.0, 1e-3), Err(Error::Overflow(_))));
    }

    #[test]
    fn temme_matches_half_integer_form() {
        // the generic path near a half-integer order against the closed form
        for &z in &[1e-3, 0.3, 1.9, 2.1, 7.0, 30.0] {
            for n in 0..4 {
                let nu = n as f64 + 0.5;
                let closed = half_integer_k(n, z);
                let generic = temme_k(nu, z);
                assert!(rel(generic, closed) < 1e-12, "nu {nu} z {z}");
            }
        }
    }

    #[test]
    fn yukawa_examples() {
        let e1 = (-1.0f64).exp();
        assert!(rel(fundamental_schrodinger(3, 1.0, 1.0).unwrap(), e1 / (4.0 * PI)) < 1e-14);
        assert!(rel(fundamental_schrodinger(3, 4.0, 0.5).unwrap(), e1 / (2.0 * PI)) < 1e-14);
        let ratio = fundamental_schrodinger(3, 1.0, 1e-3).unwrap()
            / fundamental_laplace(3, 1e-3).unwrap();
        assert!((ratio - (-1e-3f64).exp()).abs() < 1e-13);
        assert!(fundamental_schrodinger(2, 1.0, 1.0).is_err());
    }
}
