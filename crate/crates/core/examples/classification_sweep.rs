//! Verdict map over (p, q) for a few kernels, printed as a character grid.

use choquard_lab::classification::{sweep_pq, LambdaMode, Potential};
use choquard_lab::special::KernelParams;

fn main() -> choquard_lab::Result<()> {
    let n = 16;
    for (dim, alpha, beta) in [(3, 1.0, 0.0), (3, 1.0, -2.0), (4, 0.0, 0.0), (2, 1.0, 0.0)] {
        let rows = sweep_pq(KernelParams::new(dim, alpha, beta)?, &Potential::Constant(1.0), LambdaMode::Small, 4.0, 4.0, n, n)?;
        println!("N {dim} alpha {alpha} beta {beta}  (rows q descending, columns p ascending; E exists, . refused, o other)");
        for j in (0..n).rev() {
            let line: String = (0..n)
                .map(|i| match rows[i * n + j].verdict.as_str() {
                    "SingularProfileExists" => 'E',
                    "NoSingularSolution" => '.',
                    _ => 'o',
                })
                .collect();
            println!("  q {:5.2} {line}", rows[j].q);
        }
    }
    Ok(())
}
