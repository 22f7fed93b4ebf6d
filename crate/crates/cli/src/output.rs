//! Report and CSV writers. Every float is written with 17 significant digits.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use negf::observables::{spectral, transmission};
use negf::{Config, CurrentResult, JunctionSpec, ScbaResult};
use serde::Serialize;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Serialize)]
pub struct Convergence {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    pub residual_history: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub solve_seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub config: serde_json::Value,
    pub current: CurrentResult,
    pub occupations: Vec<f64>,
    pub convergence: Convergence,
    pub timing: Timing,
}

impl RunReport {
    pub fn new(
        cfg: &Config,
        r: &ScbaResult,
        current: CurrentResult,
        occupations: Vec<f64>,
        seconds: f64,
    ) -> Self {
        Self {
            config: cfg.to_json_value(),
            current,
            occupations,
            convergence: Convergence {
                converged: r.converged,
                iterations: r.iterations,
                final_residual: r.final_residual(),
                residual_history: r.residual_history.clone(),
            },
            timing: Timing {
                solve_seconds: seconds,
            },
        }
    }
}

pub fn write_report(path: &Path, report: &RunReport) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(f), report)
        .with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

/// `omega, A_11..A_NN, T`.
pub fn write_spectral(path: &Path, spec: &JunctionSpec, r: &ScbaResult) -> Result<()> {
    let n = spec.n_levels;
    let a = spectral(&r.g);
    let t = transmission(&r.g, &spec.lead_a.gamma, &spec.lead_b.gamma);
    let mut w = csv_writer(path)?;
    let mut header = vec!["omega".to_string()];
    header.extend((1..=n).map(|i| format!("A_{i}{i}")));
    header.push("T".into());
    w.write_record(&header)?;
    for (k, omega) in r.g.grid().points().enumerate() {
        let mut rec = vec![num(omega)];
        rec.extend((0..n).map(|i| num(a.at(k)[(i, i)].re)));
        rec.push(num(t.scalar(k).re));
        w.write_record(&rec)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

/// `omega` then real and imaginary part of each diagonal entry of `Σ_r`.
pub fn write_selfenergy(path: &Path, r: &ScbaResult) -> Result<()> {
    let n = r.sigma.dim();
    let sigma = r.sigma.retarded();
    let mut w = csv_writer(path)?;
    let mut header = vec!["omega".to_string()];
    for i in 1..=n {
        header.push(format!("Re_Sigma_{i}{i}"));
        header.push(format!("Im_Sigma_{i}{i}"));
    }
    w.write_record(&header)?;
    for (k, omega) in sigma.grid().points().enumerate() {
        let mut rec = vec![num(omega)];
        for i in 0..n {
            let z = sigma.at(k)[(i, i)];
            rec.push(num(z.re));
            rec.push(num(z.im));
        }
        w.write_record(&rec)?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}

pub struct IvRow {
    pub v: f64,
    pub current: CurrentResult,
    pub converged: bool,
    pub iterations: usize,
}

pub fn write_iv(path: &Path, rows: &[IvRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "V",
        "I_a",
        "I_b",
        "I_net",
        "conservation_residual",
        "converged",
        "iterations",
    ])?;
    for r in rows {
        let c = &r.current;
        w.write_record([
            num(r.v),
            num(c.current_a),
            num(c.current_b),
            num(c.net),
            num(c.conservation_residual),
            r.converged.to_string(),
            r.iterations.to_string(),
        ])?;
    }
    w.flush()
        .with_context(|| format!("writing {}", path.display()))
}
