//! `evolve`: time integration of a stored field or of a built-in benchmark.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;
use solwave_core::evolve::{run_with_reference, traveling_wave_test, DriftReference};
use solwave_core::groundstate::GridSpec;
use solwave_core::{io, make_grid, Error, EvolutionTrace, EvolveConfig, Field};

use crate::args::{GridArgs, ParamArgs};
use crate::exit::{CliError, FAILURE};
use crate::layers::Layers;
use crate::manifest::{ensure_dir, write_json, write_text, Clock, Parameters, RunManifest};

pub const TRACE_FILE: &str = "trace.csv";
pub const REPORT_FILE: &str = "evolve.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Benchmark {
    /// sech traveling wave of the cubic equation: b=2, omega=-1.25, c=1, L=8 pi, n=256, T=5.
    CubicSoliton,
}

#[derive(Args, Clone, Debug, Default)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Built-in initial condition; its parameters act as defaults below flags and config.
    #[arg(long, conflicts_with = "field", required_unless_present = "field")]
    pub benchmark: Option<Benchmark>,
    /// Initial condition as a CSV (`x,re,im`); the grid is read from the file.
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Final time [default: 1, or 5 for the benchmark].
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Time step [default: 0.4 / max k^2].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Record every this many steps [default: 1].
    #[arg(long)]
    pub stride: Option<usize>,
}

impl EvolveArgs {
    pub fn apply(&self, l: &mut Layers) {
        self.params.apply(l);
        self.grid.apply(l);
        l.flag("t_final", &self.t_final);
        l.flag("dt", &self.dt);
        l.flag("stride", &self.stride);
    }
}

/// Defaults of a benchmark, lowest precedence.
pub fn benchmark_defaults(b: Benchmark) -> Vec<(&'static str, String)> {
    match b {
        Benchmark::CubicSoliton => vec![
            ("b", "2".into()),
            ("omega", "-1.25".into()),
            ("c", "1".into()),
            ("n", "256".into()),
            ("L", (8.0 * std::f64::consts::PI).to_string()),
            ("t_final", "5".into()),
        ],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EvolveReport {
    pub source: String,
    pub steps: usize,
    pub dt: f64,
    pub t_final: f64,
    pub mass_drift: f64,
    pub momentum_drift: f64,
    pub hamiltonian_drift: Option<f64>,
    pub final_drift: f64,
    pub blowup_time: Option<f64>,
}

/// `sqrt(2 nu / A) sech(sqrt(-nu) x)`, the profile of the cubic equation.
fn cubic_profile(l: &Layers, parameters: &Parameters) -> Result<Field, CliError> {
    let r = parameters.reduced;
    if !(r.frequency < 0.0 && r.cubic < 0.0 && r.quintic == 0.0 && parameters.physical.gamma == 0.0) {
        return Err(CliError::usage("the cubic-soliton benchmark needs nu < 0, A < 0, B = 0, gamma = 0"));
    }
    let (n, half_length) = l.grid(256, 8.0 * std::f64::consts::PI)?;
    let amp = (2.0 * r.frequency / r.cubic).sqrt();
    let k = (-r.frequency).sqrt();
    Ok(Field::from_fn(make_grid(n, half_length)?, |x| amp / (k * x).cosh())?)
}

pub fn run(args: &EvolveArgs, l: &Layers, dir: &Path, config_file_hash: Option<String>) -> Result<(), CliError> {
    let clock = Clock::start();
    let physical = l.physical()?;
    let parameters = Parameters { physical, reduced: l.reduced(&physical)? };
    let t_final = l.number("t_final")?.unwrap_or(1.0);
    let cfg = EvolveConfig {
        dt: l.number("dt")?,
        stride: l.parsed("stride")?.unwrap_or(1),
        ..EvolveConfig::new(physical, t_final)
    };
    let (source, initial) = match (&args.benchmark, &args.field) {
        (Some(b), _) => {
            (format!("benchmark:{}", b.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()), None)
        }
        (None, Some(path)) => {
            let u0 = io::read_field(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            (format!("field:{}", path.display()), Some(u0))
        }
        (None, None) => return Err(CliError::usage("pass --benchmark or --field")),
    };
    let profile = match &initial {
        Some(u0) => u0.clone(),
        None => cubic_profile(l, &parameters)?,
    };
    let grid = profile.grid().clone();
    let (steps, dt) = cfg.schedule(&grid)?;
    ensure_dir(dir)?;
    let inputs =
        serde_json::json!({ "source": &source, "t_final": t_final, "dt": dt, "steps": steps, "stride": cfg.stride });
    let mut manifest = RunManifest::new(
        "evolve",
        parameters,
        GridSpec { n: grid.n(), half_length: grid.half_length() },
        inputs,
        config_file_hash,
    );
    let outcome = match &initial {
        None => traveling_wave_test(&profile, &cfg),
        Some(u0) => run_with_reference(u0, &cfg, DriftReference::BestShift).map(|(t, _)| t),
    };
    let (trace, result): (EvolutionTrace, Result<(), CliError>) = match outcome {
        Ok(t) => (t, Ok(())),
        Err(Error::NonFinite { time, partial }) => {
            (*partial, Err(CliError::new(FAILURE, format!("solution became non-finite at t = {time}"))))
        }
        Err(e) => return Err(e.into()),
    };
    let report = EvolveReport {
        source,
        steps,
        dt,
        t_final,
        mass_drift: trace.mass_drift(),
        momentum_drift: trace.momentum_drift(),
        hamiltonian_drift: trace.hamiltonian_drift(),
        final_drift: trace.final_drift(),
        blowup_time: trace.blowup_time,
    };
    write_text(&dir.join(TRACE_FILE), &io::trace_to_csv(&trace))?;
    write_json(&dir.join(REPORT_FILE), &report)?;
    manifest.outputs = vec![TRACE_FILE.to_string(), REPORT_FILE.to_string()];
    println!(
        "steps={} dt={:.3e} mass_drift={:.3e} momentum_drift={:.3e} final_drift={:.3e}",
        steps, dt, report.mass_drift, report.momentum_drift, report.final_drift
    );
    manifest.finish(&clock, &result);
    manifest.write(dir)?;
    result
}
