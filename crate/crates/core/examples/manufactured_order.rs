//! Grid refinement study for the radial operator with a singular exact solution.

use choquard_lab::classification::Potential;
use choquard_lab::quadrature::RadialProfile;
use choquard_lab::solver::{linear_bvp_solve, RadialGrid};

fn main() -> choquard_lab::Result<()> {
    // v = r^{-1/2} solves -v'' - (2/r) v' + v = r^{-5/2}/4 + r^{-1/2}
    let exact = |r: f64| r.powf(-0.5);
    let inner = 1.0 / 16.0;
    let mut prev: Option<f64> = None;
    for npo in [4, 8, 16, 32, 64] {
        let grid = RadialGrid::geometric(inner, npo)?;
        let rhs = RadialProfile::from_fn(grid.nodes().to_vec(), |r| 0.25 * r.powf(-2.5) + r.powf(-0.5), (2.5, 0.0))?;
        let v = linear_bvp_solve(3, 1.0, &Potential::Constant(1.0), &rhs, inner, (exact(inner), 1.0))?;
        let err = v.nodes().iter().zip(v.values()).map(|(&r, &u)| ((u - exact(r)) / exact(r)).abs()).fold(0.0, f64::max);
        let ratio = prev.map(|p| format!("{:.3}", p / err)).unwrap_or_else(|| "-".into());
        println!("npo {npo:3}  nodes {:4}  max rel err {err:.3e}  ratio {ratio}", grid.len());
        prev = Some(err);
    }
    Ok(())
}
