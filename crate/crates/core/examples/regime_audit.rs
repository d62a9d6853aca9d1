//! Two-sided audit of I(r) = int K(x-y)|y|^-gamma dy against the regime
//! envelope, plus a deliberately wrong envelope for contrast.

use choquard_lab::estimates::{audit_regime, Envelope};
use choquard_lab::quadrature::QuadratureConfig;

fn main() -> choquard_lab::Result<()> {
    let cfg = QuadratureConfig::relative(1e-8);
    let radii = [1e-1, 1e-2, 1e-3, 1e-4];
    let sets = [(2.0, 0.0, 2.0), (1.0, 0.5, 2.0), (1.0, -1.0, 2.0), (1.0, -3.0, 2.0), (1.0, 0.0, 1.0)];
    for (alpha, beta, gamma) in sets {
        let audit = audit_regime(3, alpha, beta, gamma, &radii, None, &cfg)?;
        let wrong = Envelope { power: audit.envelope.power + 1.5, ..audit.envelope };
        let off = audit_regime(3, alpha, beta, gamma, &radii, Some(wrong), &cfg)?;
        println!(
            "alpha {alpha} beta {beta} gamma {gamma}: {} envelope {} spread {:.3} (shifted envelope {:.2e})",
            audit.regime, audit.envelope, audit.summary.spread, off.summary.spread
        );
        for row in &audit.rows {
            println!("    r {:.0e}  I {:.6e}  I/env {:.4}", row.r, row.i_value, row.ratio);
        }
    }
    Ok(())
}
