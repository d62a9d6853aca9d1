//! Constructive run for N = 3, alpha = 1, beta = 0, p = q = 1, V = 1.

use std::time::Instant;

use choquard_lab::classification::{ExistenceQuery, LambdaMode, Potential};
use choquard_lab::solver::{solve, SolverConfig};
use choquard_lab::special::KernelParams;

fn main() -> choquard_lab::Result<()> {
    let query = ExistenceQuery::new(KernelParams::new(3, 1.0, 0.0)?, 1.0, 1.0, Potential::Constant(1.0), LambdaMode::Small)?;
    let scale: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1e-3);
    let cfg = SolverConfig { initial_scale: scale, ..SolverConfig::default() };
    let t = Instant::now();
    let report = solve(&query, &cfg)?;
    let cal = &report.calibration;
    for line in &cal.log {
        println!("  {line}");
    }
    println!("recipe {} m = {:.4e} lambda = {:.4e}", cal.pair.recipe, cal.pair.params.scale, cal.lambda);
    for step in &report.steps {
        let ru = step
            .solution
            .nodes()
            .iter()
            .zip(step.solution.values())
            .map(|(r, u)| r * u / cal.pair.params.scale);
        let (lo, hi) = ru.fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
        println!(
            "inner {:.5}: {} iterations, r u / m in [{lo:.6}, {hi:.6}], change {:?}",
            step.inner, step.state.iterate_index, step.change
        );
    }
    println!("mass {:?}", report.mass);
    println!("elapsed {:.2?}", t.elapsed());
    Ok(())
}
