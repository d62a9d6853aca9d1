//! Laplace and Schrodinger fundamental solutions and their ratio near the origin.

use choquard_lab::special::{fundamental_laplace, fundamental_schrodinger};

fn main() -> choquard_lab::Result<()> {
    for dim in [3usize, 4, 5] {
        println!("N = {dim}");
        for mu in [0.5, 2.0] {
            for e in 1..=4 {
                let r = 10f64.powi(-e);
                let g = fundamental_schrodinger(dim, mu, r)?;
                let e0 = fundamental_laplace(dim, r)?;
                println!("  mu {mu:4}  r {r:.0e}  G {g:.6e}  E {e0:.6e}  G/E {:.6}", g / e0);
            }
        }
    }
    println!("N = 2: E(r) = log(e/r)/(2 pi)");
    for e in 0..=4 {
        let r = 10f64.powi(-e);
        println!("  r {r:.0e}  E {:.6e}", fundamental_laplace(2, r)?);
    }
    Ok(())
}
