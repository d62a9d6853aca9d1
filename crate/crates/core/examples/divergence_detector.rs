//! Dyadic-annulus test for local integrability of radial functions.

use choquard_lab::classification::l1loc_divergence_test;
use choquard_lab::quadrature::PowerLogDensity;

fn main() {
    for dim in [2usize, 3, 4] {
        for sigma in [dim as f64 - 1.0, dim as f64 - 0.1, dim as f64, dim as f64 + 0.5] {
            let v = l1loc_divergence_test(&PowerLogDensity::power(sigma), dim);
            println!("N {dim}  r^-{sigma:<4}: {v:?}");
        }
        let borderline = PowerLogDensity { coef: 1.0, a: dim as f64, b: -2.0 };
        println!("N {dim}  r^-N log^-2: {:?}", l1loc_divergence_test(&borderline, dim));
    }
}
