//! Spherical means of E over |y| = s equal E(max(r, s)).

use choquard_lab::cli::meanvalue_cases;
use choquard_lab::quadrature::{angular_mean, QuadratureConfig};
use choquard_lab::special::fundamental_laplace;

fn main() -> choquard_lab::Result<()> {
    let cfg = QuadratureConfig::relative(1e-11);
    let mut worst = 0.0f64;
    for (i, (dim, r, s)) in meanvalue_cases(100, 20240917).into_iter().enumerate() {
        let mean = angular_mean(dim, r, s, |d| fundamental_laplace(dim, d).unwrap_or(f64::NAN), &cfg)?;
        let exact = fundamental_laplace(dim, r.max(s))?;
        let err = ((mean - exact) / exact).abs();
        worst = worst.max(err);
        if i < 8 {
            println!("N {dim} r {r:.3e} s {s:.3e}: mean {mean:.12e} exact {exact:.12e} err {err:.1e}");
        }
    }
    println!("max relative error over 100 cases: {worst:.2e}");
    Ok(())
}
