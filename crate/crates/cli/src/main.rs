//! `negf`: steady-state transport through a vibrating molecular junction.

mod output;
mod overrides;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use negf::observables::{currents, currents_real_part, occupation, raw_occupation};
use negf::JunctionSpec;
use negf::{apply_bias, scba_loop, scba_loop_from, Config, CurrentResult, ScbaResult};
use rayon::prelude::*;

use crate::output::{IvRow, RunReport};

#[derive(Parser)]
#[command(
    name = "negf",
    version,
    about = "Steady-state NEGF solver for molecular junctions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one bias point and write report.json, spectral.csv and selfenergy.csv.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Solve a uniform list of biases and write iv.csv.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Solve bias points concurrently.
        #[arg(long)]
        parallel: bool,
        /// Start each point from the solution at the previous bias.
        #[arg(long, conflicts_with = "parallel")]
        warm_start: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Override a configuration field, e.g. `--set solver.mixing=0.3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

/// Exit code for a finished computation.
fn status(converged: bool) -> ExitCode {
    if converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn load(args: &CommonArgs) -> Result<Config> {
    let text = fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", args.config.display()))?;
    for o in &args.overrides {
        overrides::apply(&mut value, o)?;
    }
    Config::from_value(value).context("config")
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn run(args: &CommonArgs) -> Result<ExitCode> {
    let cfg = load(args)?;
    prepare_out(&args.out)?;
    let spec = cfg.biased_spec().context("bias")?;
    let start = Instant::now();
    let result = scba_loop(&spec, &cfg.options).context("solver")?;
    let current = observed_currents(&spec, &result).context("current")?;
    let occupations = if result.converged {
        occupation(&result.g, result.g.grid())
    } else {
        raw_occupation(&result.g)
    }
    .context("occupation")?;
    let seconds = start.elapsed().as_secs_f64();

    let report = RunReport::new(&cfg, &result, current, occupations, seconds);
    output::write_report(&args.out.join("report.json"), &report)?;
    output::write_spectral(&args.out.join("spectral.csv"), &spec, &result)?;
    output::write_selfenergy(&args.out.join("selfenergy.csv"), &result)?;

    eprintln!(
        "I_net = {:.6e}, converged = {} after {} iterations",
        current.net, result.converged, result.iterations
    );
    Ok(status(result.converged))
}

/// Non-converged iterates are reported as they are, without the consistency
/// checks a solution has to pass.
fn observed_currents(
    spec: &JunctionSpec,
    r: &ScbaResult,
) -> Result<CurrentResult, negf::SolverError> {
    if r.converged {
        currents(spec, &r.g)
    } else {
        currents_real_part(spec, &r.g)
    }
}

fn biases(from: f64, to: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        bail!("sweep: --steps must be at least 2, got {steps}");
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        bail!("sweep: need finite --from < --to, got {from} and {to}");
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| {
            if k + 1 == steps {
                to
            } else {
                from + h * k as f64
            }
        })
        .collect())
}

fn solve_point(
    cfg: &Config,
    v: f64,
    seed: Option<&ScbaResult>,
) -> Result<(ScbaResult, CurrentResult)> {
    let spec = apply_bias(&cfg.spec, v, &cfg.profile()).context("bias")?;
    let r =
        scba_loop_from(&spec, &cfg.options, seed).with_context(|| format!("solver at V = {v}"))?;
    let c = observed_currents(&spec, &r).with_context(|| format!("current at V = {v}"))?;
    Ok((r, c))
}

fn row(v: f64, r: &ScbaResult, c: CurrentResult) -> IvRow {
    IvRow {
        v,
        current: c,
        converged: r.converged,
        iterations: r.iterations,
    }
}

fn sweep(
    args: &CommonArgs,
    from: f64,
    to: f64,
    steps: usize,
    parallel: bool,
    warm: bool,
) -> Result<ExitCode> {
    let vs = biases(from, to, steps)?;
    let cfg = load(args)?;
    prepare_out(&args.out)?;
    let rows: Vec<IvRow> = if parallel {
        vs.par_iter()
            .map(|&v| solve_point(&cfg, v, None).map(|(r, c)| row(v, &r, c)))
            .collect::<Result<_>>()?
    } else {
        let mut prev: Option<ScbaResult> = None;
        let mut rows = Vec::with_capacity(vs.len());
        for &v in &vs {
            let seed = if warm { prev.as_ref() } else { None };
            let (r, c) = solve_point(&cfg, v, seed)?;
            rows.push(row(v, &r, c));
            prev = Some(r);
        }
        rows
    };
    output::write_iv(&args.out.join("iv.csv"), &rows)?;
    let failed = rows.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        eprintln!("{failed} of {} bias points did not converge", rows.len());
    }
    Ok(status(failed == 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { common } => run(common),
        Command::Sweep {
            common,
            from,
            to,
            steps,
            parallel,
            warm_start,
        } => sweep(common, *from, *to, *steps, *parallel, *warm_start),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
