//! On the critical line p + q = (2N - alpha)/(N - 2) the log exponent of the
//! kernel decides: beta = 0 is refused, beta = -2 admits a singular solution.

use choquard_lab::classification::{classify, l1loc_divergence_test, ExistenceQuery, LambdaMode, Potential};
use choquard_lab::estimates::psi_profile;
use choquard_lab::solver::{solve, SolverConfig};
use choquard_lab::special::KernelParams;

fn main() -> choquard_lab::Result<()> {
    let (p, q) = (2.5, 2.5);
    for beta in [0.0, -2.0] {
        let query = ExistenceQuery::new(KernelParams::new(3, 1.0, beta)?, p, q, Potential::Constant(1.0), LambdaMode::Small)?;
        let verdict = classify(&query)?;
        let psi = psi_profile(3, 1.0, beta, p, q)?;
        let density = (|r: f64| psi.eval(r), (-psi.power, psi.log_power));
        let l1 = l1loc_divergence_test(&density, 3);
        println!("beta = {beta}: verdict {verdict:?}");
        println!("  Psi = {psi}, L1 test {l1:?}");
        if verdict.recipe.is_some() {
            let cfg = SolverConfig { initial_scale: 0.1, ..SolverConfig::default() };
            let report = solve(&query, &cfg)?;
            let cal = &report.calibration;
            println!(
                "  recipe {} sigma = {:?} m = {:.4e} lambda = {:.4e}",
                cal.pair.recipe, cal.pair.params.sigma, cal.pair.params.scale, cal.lambda
            );
            for step in &report.steps {
                println!(
                    "  inner {:.5}: {} iterations, monotone {} sandwich {}, change {:?}",
                    step.inner, step.state.iterate_index, step.state.monotone_ok, step.state.sandwich_ok, step.change
                );
            }
        }
    }
    Ok(())
}
