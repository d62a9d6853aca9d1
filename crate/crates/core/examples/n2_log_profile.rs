//! Planar run: p = 1, q = 2, V = log log(2e/r). The solution grows like
//! m log(2e/r) at the puncture.

use choquard_lab::classification::{ExistenceQuery, LambdaMode, Potential};
use choquard_lab::solver::{solve, SolverConfig};
use choquard_lab::special::{log_weight, KernelParams};

fn main() -> choquard_lab::Result<()> {
    let query = ExistenceQuery::new(KernelParams::new(2, 1.0, 0.0)?, 1.0, 2.0, Potential::LogLog, LambdaMode::Small)?;
    let cfg = SolverConfig { initial_scale: 0.1, inner_schedule: vec![32, 64], ..SolverConfig::default() };
    let report = solve(&query, &cfg)?;
    let cal = &report.calibration;
    let m = cal.pair.params.scale;
    println!("recipe {} m = {m:.4e} lambda = {:.4e}", cal.pair.recipe, cal.lambda);
    let fine = &report.finest().solution;
    let window = 10.0 * fine.nodes()[0];
    let (lo, hi) = fine
        .nodes()
        .iter()
        .zip(fine.values())
        .filter(|(r, _)| **r <= window)
        .map(|(&r, &u)| u / log_weight(r) / m)
        .fold((f64::INFINITY, 0.0f64), |(a, b), x| (a.min(x), b.max(x)));
    println!("u / (m log(2e/r)) on the innermost decade: [{lo:.6}, {hi:.6}]");
    println!("mass {:?}", report.mass);
    for step in &report.steps {
        println!("inner {:.5}: {} iterations, change {:?}", step.inner, step.state.iterate_index, step.change);
    }
    Ok(())
}
