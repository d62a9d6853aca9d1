//! Command line front end. Every command reads one JSON config and writes
//! its artifacts under `--out`.

mod config;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::json;

pub use config::{AuditConfig, MeanValueConfig, ParamSet, PotentialSpec, QueryConfig, SolveConfig, SweepConfig};

use crate::classification::{classify, sweep_pq};
use crate::error::{Error, Result};
use crate::estimates::audit_regime;
use crate::quadrature::{angular_mean, QuadratureConfig};
use crate::solver::solve;
use crate::special::{fundamental_laplace, laplace_unchecked, KernelParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_MONOTONICITY: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;
pub const EXIT_SELFTEST: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "choquard-lab", version, about = "Singular radial solutions of Choquard type equations")]
struct Cli {
    /// JSON config for the command
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// directory for the artifacts
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// worker threads (defaults to the number of cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide whether a singular solution exists
    Classify,
    /// Compare convolution integrals with their regime envelopes
    AuditEstimates,
    /// Construct a solution by monotone iteration
    Solve,
    /// Classify a grid of (p, q)
    Sweep,
    /// Check the spherical mean of the fundamental solution
    SelftestMeanvalue,
}

/// `{:.16e}`: 17 significant digits, round-trip exact.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) => EXIT_INCONCLUSIVE,
        Error::MonotonicityViolation { .. } => EXIT_MONOTONICITY,
        Error::IterationNonConvergence { .. } | Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    fs::create_dir_all(&cli.out)?;
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Classify => cmd_classify(&read_config(cfg)?, base_dir(cfg), &cli.out),
        Command::AuditEstimates => {
            let c = match cfg {
                Some(p) => read_json(p)?,
                None => AuditConfig::default(),
            };
            cmd_audit_estimates(&c, &cli.out)
        }
        Command::Solve => cmd_solve(&read_config(cfg)?, base_dir(cfg), &cli.out),
        Command::Sweep => cmd_sweep(&read_config(cfg)?, base_dir(cfg), &cli.out),
        Command::SelftestMeanvalue => {
            let c = match cfg {
                Some(p) => read_json(p)?,
                None => MeanValueConfig::default(),
            };
            cmd_selftest_meanvalue(&c, &cli.out)
        }
    }
}

fn base_dir(cfg: Option<&Path>) -> &Path {
    cfg.and_then(Path::parent).unwrap_or(Path::new("."))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn read_config<T: DeserializeOwned>(path: Option<&Path>) -> Result<T> {
    match path {
        Some(p) => read_json(p),
        None => Err(crate::error::domain("this command needs --config")),
    }
}

pub fn cmd_classify(cfg: &QueryConfig, base: &Path, out: &Path) -> Result<i32> {
    let query = cfg.query(base)?;
    let verdict = classify(&query)?;
    let text = serde_json::to_string(&verdict)?;
    println!("{text}");
    fs::write(out.join("verdict.json"), text + "\n")?;
    Ok(EXIT_OK)
}

pub fn cmd_audit_estimates(cfg: &AuditConfig, out: &Path) -> Result<i32> {
    let quad = QuadratureConfig::relative(cfg.rel_tol);
    let radii = cfg.radii();
    let mut rows = csv::Writer::from_path(out.join("audit.csv"))?;
    rows.write_record(["alpha", "beta", "gamma", "r", "I_value", "envelope", "ratio"])?;
    let mut summary = csv::Writer::from_path(out.join("audit_summary.csv"))?;
    summary.write_record(["alpha", "beta", "gamma", "regime", "min_ratio", "max_ratio", "spread", "verdict"])?;
    for set in cfg.parameter_sets() {
        let audit = audit_regime(cfg.dim, set.alpha, set.beta, set.gamma, &radii, None, &quad)?;
        for row in &audit.rows {
            rows.write_record([
                fmt_float(row.alpha),
                fmt_float(row.beta),
                fmt_float(row.gamma),
                fmt_float(row.r),
                fmt_float(row.i_value),
                fmt_float(row.envelope),
                fmt_float(row.ratio),
            ])?;
        }
        let s = &audit.summary;
        let verdict = if s.bounded(50.0) { "bounded" } else { "unbounded" };
        summary.write_record([
            fmt_float(set.alpha),
            fmt_float(set.beta),
            fmt_float(set.gamma),
            format!("{:?}", audit.regime),
            fmt_float(s.min_ratio),
            fmt_float(s.max_ratio),
            fmt_float(s.spread),
            verdict.to_string(),
        ])?;
    }
    rows.flush()?;
    summary.flush()?;
    Ok(EXIT_OK)
}

pub fn cmd_solve(cfg: &SolveConfig, base: &Path, out: &Path) -> Result<i32> {
    let query = cfg.query().query(base)?;
    let solver = cfg.solver()?;
    let report = solve(&query, &solver)?;
    let dim = query.dim();
    let fine = report.finest();

    let mut w = csv::Writer::from_path(out.join("solution.csv"))?;
    w.write_record(["r", "u", "ratio_to_E"])?;
    for (&r, &u) in fine.solution.nodes().iter().zip(fine.solution.values()) {
        w.write_record([fmt_float(r), fmt_float(u), fmt_float(u / fundamental_laplace(dim, r)?)])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(out.join("iterations.csv"))?;
    w.write_record(["iter", "residual", "min_gap_sub", "min_gap_super"])?;
    for rec in &fine.state.log {
        w.write_record([rec.iter.to_string(), fmt_float(rec.residual), fmt_float(rec.min_gap_sub), fmt_float(rec.min_gap_super)])?;
    }
    w.flush()?;

    let cal = &report.calibration;
    let mass = &report.mass;
    let steps: Vec<_> = report
        .steps
        .iter()
        .map(|s| {
            json!({
                "inner": s.inner,
                "iterations": s.state.iterate_index,
                "monotone_ok": s.state.monotone_ok,
                "sandwich_ok": s.state.sandwich_ok,
                "change": s.change,
            })
        })
        .collect();
    let doc = json!({
        "m_est": mass.m_est,
        "fit_window": [mass.fit_window.0, mass.fit_window.1],
        "fit_spread": mass.fit_spread,
        "profile_coefficient": mass.profile_coefficient,
        "recipe": cal.pair.recipe,
        "scale": cal.pair.params.scale,
        "lambda": cal.lambda,
        "params": cal.pair.params,
        "gates": cal.gates,
        "continuation": steps,
    });
    fs::write(out.join("mass.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    let ok = report.steps.iter().all(|s| s.state.monotone_ok && s.state.sandwich_ok);
    Ok(if ok { EXIT_OK } else { EXIT_MONOTONICITY })
}

pub fn cmd_sweep(cfg: &SweepConfig, base: &Path, out: &Path) -> Result<i32> {
    let kernel = KernelParams::new(cfg.dim, cfg.alpha, cfg.beta)?;
    let potential = cfg.potential.resolve(base)?;
    let rows = sweep_pq(kernel, &potential, cfg.lambda_mode, cfg.p_max, cfg.q_max, cfg.n_p, cfg.n_q)?;
    let mut w = csv::Writer::from_path(out.join("sweep.csv"))?;
    w.write_record(["N", "alpha", "beta", "p", "q", "verdict", "witness"])?;
    for row in rows {
        w.write_record([
            row.dim.to_string(),
            fmt_float(row.alpha),
            fmt_float(row.beta),
            fmt_float(row.p),
            fmt_float(row.q),
            row.verdict,
            row.witness,
        ])?;
    }
    w.flush()?;
    Ok(EXIT_OK)
}

/// Random `(N, r, s)` with `N` in `2..=5`, `r, s` log-uniform in `[1e-3, 1]`.
pub fn meanvalue_cases(cases: usize, seed: u64) -> Vec<(usize, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|_| {
            let dim = rng.random_range(2..=5usize);
            let r = 10f64.powf(rng.random_range(-3.0..0.0));
            let s = 10f64.powf(rng.random_range(-3.0..0.0));
            (dim, r, s)
        })
        .collect()
}

pub fn cmd_selftest_meanvalue(cfg: &MeanValueConfig, out: &Path) -> Result<i32> {
    let quad = QuadratureConfig::relative(1e-11);
    let mut w = csv::Writer::from_path(out.join("meanvalue.csv"))?;
    w.write_record(["N", "r", "s", "computed", "exact", "rel_err"])?;
    let mut worst = 0.0f64;
    for (dim, r, s) in meanvalue_cases(cfg.cases, cfg.seed) {
        let computed = angular_mean(dim, r, s, |d| laplace_unchecked(dim, d), &quad)?;
        let exact = fundamental_laplace(dim, r.max(s))?;
        let err = ((computed - exact) / exact).abs();
        worst = worst.max(err);
        w.write_record([
            dim.to_string(),
            fmt_float(r),
            fmt_float(s),
            fmt_float(computed),
            fmt_float(exact),
            fmt_float(err),
        ])?;
    }
    w.flush()?;
    println!("{}", json!({ "cases": cfg.cases, "max_rel_err": worst, "pass": worst < 1e-8 }));
    Ok(if worst < 1e-8 { EXIT_OK } else { EXIT_SELFTEST })
}
