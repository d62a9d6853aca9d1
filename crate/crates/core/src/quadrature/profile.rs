use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::log_weight;

/// A radial function on `(0, 1]` that convolutions can consume.
///
/// `sing_exp = (a, b)` describes the behaviour `~ r^{-a} log^b(2e/r)` at the
/// origin; it drives the divergence guard.
pub trait RadialDensity: Sync {
    fn eval(&self, r: f64) -> f64;
    fn sing_exp(&self) -> (f64, f64);
}

/// `coef * r^{-a} * log^b(2e/r)`, exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogDensity {
    pub coef: f64,
    pub a: f64,
    pub b: f64,
}

impl PowerLogDensity {
    pub fn power(a: f64) -> Self {
        Self { coef: 1.0, a, b: 0.0 }
    }
}

impl RadialDensity for PowerLogDensity {
    fn eval(&self, r: f64) -> f64 {
        let mut v = self.coef;
        if self.a != 0.0 {
            v *= r.powf(-self.a);
        }
        if self.b != 0.0 {
            v *= log_weight(r).powf(self.b);
        }
        v
    }
    fn sing_exp(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

impl<F: Fn(f64) -> f64 + Sync> RadialDensity for (F, (f64, f64)) {
    fn eval(&self, r: f64) -> f64 {
        (self.0)(r)
    }
    fn sing_exp(&self) -> (f64, f64) {
        self.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interp {
    /// piecewise linear in `(log r, log value)`
    LogLog,
    /// piecewise linear in `(log r, value)`
    LogLinear,
}

/// Grid samples of a radial function plus its leading singularity.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    sing_exp: (f64, f64),
    log_nodes: Vec<f64>,
    log_values: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    sing_exp: [f64; 2],
    #[serde(default)]
    interp: Option<Interp>,
}

impl RadialProfile {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, sing_exp: (f64, f64)) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(Error::InvalidProfile(format!(
                "{} nodes vs {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
            return Err(Error::InvalidProfile("nodes must lie in (0, 1]".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidProfile("nodes must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("values must be finite".into()));
        }
        if !(sing_exp.0.is_finite() && sing_exp.1.is_finite()) {
            return Err(Error::InvalidProfile("sing_exp must be finite".into()));
        }
        let log_nodes = nodes.iter().map(|r| r.ln()).collect();
        let log_values = values
            .iter()
            .all(|&v| v > 0.0)
            .then(|| values.iter().map(|v| v.ln()).collect());
        Ok(Self { nodes, values, sing_exp, log_nodes, log_values })
    }

    pub fn from_fn(nodes: Vec<f64>, f: impl Fn(f64) -> f64, sing_exp: (f64, f64)) -> Result<Self> {
        let values = nodes.iter().map(|&r| f(r)).collect();
        Self::new(nodes, values, sing_exp)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interp(&self) -> Interp {
        if self.log_values.is_some() {
            Interp::LogLog
        } else {
            Interp::LogLinear
        }
    }

    /// Pointwise power, with the singularity exponents scaled to match.
    pub fn powf(&self, p: f64) -> Result<Self> {
        let values = self.values.iter().map(|v| v.powf(p)).collect();
        Self::new(self.nodes.clone(), values, (p * self.sing_exp.0, p * self.sing_exp.1))
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.nodes.len();
        let r0 = self.nodes[0];
        if r <= r0 {
            if r == r0 {
                return self.values[0];
            }
            let (a, b) = self.sing_exp;
            let mut v = self.values[0];
            if a != 0.0 {
                v *= (r / r0).powf(-a);
            }
            if b != 0.0 {
                v *= (log_weight(r) / log_weight(r0)).powf(b);
            }
            return v;
        }
        if n == 1 {
            return self.values[0];
        }
        let i = self.nodes.partition_point(|&x| x <= r);
        if i <= n && self.nodes[i - 1] == r {
            return self.values[i - 1];
        }
        // segment i-1..i, the last segment when extrapolating outward
        let i = i.min(n - 1);
        let (x0, x1) = (self.log_nodes[i - 1], self.log_nodes[i]);
        let t = (r.ln() - x0) / (x1 - x0);
        match &self.log_values {
            Some(lv) => (lv[i - 1] + t * (lv[i] - lv[i - 1])).exp(),
            None => self.values[i - 1] + t * (self.values[i] - self.values[i - 1]),
        }
    }

    fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("json")
    }

    /// Writes `r,value` CSV at `path` and the metadata sidecar next to it.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "value"])?;
        for (r, v) in self.nodes.iter().zip(&self.values) {
            w.write_record([format!("{r:.16e}"), format!("{v:.16e}")])?;
        }
        w.flush()?;
        let meta = Sidecar { sing_exp: [self.sing_exp.0, self.sing_exp.1], interp: Some(self.interp()) };
        fs::write(Self::sidecar_path(path), serde_json::to_string_pretty(&meta)?)?;
        Ok(())
    }

    /// Reads a profile written by [`RadialProfile::write`]. A missing
    /// sidecar means a bounded profile, `sing_exp = (0, 0)`.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "value" {
            return Err(Error::InvalidProfile("expected header r,value".into()));
        }
        let mut nodes = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidProfile(format!("bad number {s:?}")))
            };
            nodes.push(parse(&rec[0])?);
            values.push(parse(&rec[1])?);
        }
        let side = Self::sidecar_path(path);
        let sing_exp = if side.exists() {
            let meta: Sidecar = serde_json::from_str(&fs::read_to_string(side)?)?;
            (meta.sing_exp[0], meta.sing_exp[1])
        } else {
            (0.0, 0.0)
        };
        Self::new(nodes, values, sing_exp)
    }
}

impl RadialDensity for RadialProfile {
    fn eval(&self, r: f64) -> f64 {
        RadialProfile::eval(self, r)
    }
    fn sing_exp(&self) -> (f64, f64) {
        self.sing_exp
    }
}
