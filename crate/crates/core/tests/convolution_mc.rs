//! Monte Carlo check of the radial convolution against direct sampling in the ball.

use std::f64::consts::PI;

use choquard_lab::quadrature::{convolve_radial, PowerLogDensity, QuadratureConfig};
use choquard_lab::special::KernelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn radial_convolution_matches_sampling() {
    let (alpha, beta, r) = (1.0, 1.0, 0.1);
    let params = KernelParams::new(3, alpha, beta).unwrap();
    let quad = convolve_radial(&params, &PowerLogDensity::power(1.0), r, 0.0, &QuadratureConfig::relative(1e-9)).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let n = 1_000_000;
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut taken = 0;
    while taken < n {
        let y = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0f64..1.0)];
        let s2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
        if s2 >= 1.0 {
            continue;
        }
        taken += 1;
        let d = ((y[0] - r).powi(2) + y[1] * y[1] + y[2] * y[2]).sqrt();
        let v = d.powf(-alpha) * (2.0 * std::f64::consts::E / d).ln().powf(beta) / s2.sqrt();
        sum += v;
        sq += v * v;
    }
    let vol = 4.0 * PI / 3.0;
    let mean = sum / n as f64;
    let std = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
    let mc = vol * mean;
    let tol = 5.0 * vol * std;
    assert!((mc - quad).abs() < tol, "quadrature {quad}, sampled {mc} +- {tol}");
    assert!(tol < 0.05 * quad, "{tol} vs {quad}");
}
