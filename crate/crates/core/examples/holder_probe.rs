//! Modulus of continuity of the Riesz-log potential of an L^2 density.

use choquard_lab::estimates::holder_modulus_probe;
use choquard_lab::quadrature::{PowerLogDensity, QuadratureConfig};
use choquard_lab::special::KernelParams;

fn main() -> choquard_lab::Result<()> {
    let cfg = QuadratureConfig::relative(1e-8);
    for beta in [0.0, 1.0, -1.0] {
        let params = KernelParams::new(3, 1.0, beta)?;
        // |y|^-1 lies in L^2(B_1) in three dimensions
        let probe = holder_modulus_probe(&params, &PowerLogDensity::power(1.0), 2.0, 16, &cfg)?;
        println!(
            "beta {beta}: exponent {:.3}, sup ratio {:.4e}, tail growth {:.3}, stable {}",
            probe.exponent,
            probe.sup_ratio,
            probe.tail_growth,
            probe.stable()
        );
        for s in &probe.samples {
            println!("    x {:.2} h {:.3e}  |dI| {:.4e}  ratio {:.4e}", s.base, s.separation, s.difference, s.ratio);
        }
    }
    Ok(())
}
