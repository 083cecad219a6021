//! `solve`: regime guard, solver dispatch, and output of one ground state.

use std::path::Path;

use clap::Args;
use serde::Serialize;
use solwave_core::groundstate::{
    petviashvili_solve, solve_fixed_meanflow, solve_fixed_quartic, solve_nehari_critical, solve_nehari_subcritical,
    GridSpec,
};
use solwave_core::{classify, io, GroundState, InitialGuess, Problem, ReducedParams, RegimeTag, SolveConfig};

use crate::args::{GridArgs, ParamArgs};
use crate::exit::{CliError, BLOCKED};
use crate::layers::{summary_line, Layers, DEFAULT_L, DEFAULT_N};
use crate::manifest::{ensure_dir, write_json, Clock, Parameters, RunManifest};

pub const SUMMARY_FILE: &str = "ground_state.json";
pub const FIELD_FILE: &str = "field.csv";

#[derive(Args, Clone, Debug, Default)]
pub struct SolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// auto, subcritical, critical, meanflow, quartic or petviashvili [default: auto].
    #[arg(long)]
    pub problem: Option<String>,
    /// Constraint level for the meanflow and quartic problems.
    #[arg(long)]
    pub q: Option<f64>,
    /// Weight of the nonlocal part of the mean-flow constraint [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha1: Option<f64>,
    /// Weight of the quartic part of the mean-flow constraint [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub alpha2: Option<f64>,
    /// Initial profile: sech, gaussian or algebraic [default: sech].
    #[arg(long)]
    pub guess: Option<String>,
    /// Width of the initial profile [default: 1].
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Bound on the normalized residual [default: 1e-9].
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative amplitude of a seeded random perturbation of the guess [default: 0].
    #[arg(long)]
    pub perturbation: Option<f64>,
    /// Run even when the parameters fall in a regime without solutions.
    #[arg(long)]
    pub force: bool,
}

impl SolveArgs {
    pub fn apply(&self, l: &mut Layers) {
        self.params.apply(l);
        self.grid.apply(l);
        l.flag("problem", &self.problem);
        l.flag("q", &self.q);
        l.flag("alpha1", &self.alpha1);
        l.flag("alpha2", &self.alpha2);
        l.flag("guess", &self.guess);
        l.flag("width", &self.width);
        l.flag("max_iters", &self.max_iters);
        l.flag("tol", &self.tol);
        l.flag("seed", &self.seed);
        l.flag("perturbation", &self.perturbation);
    }
}

/// Everything a solve depends on besides the equation parameters.
#[derive(Clone, Debug, Serialize)]
pub struct SolveInputs {
    pub problem: Problem,
    pub requested: String,
    pub level: Option<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub config: SolveConfig,
}

fn problem_from_name(name: &str) -> Result<Option<Problem>, CliError> {
    Ok(Some(match name {
        "auto" => return Ok(None),
        "subcritical" => Problem::Subcritical,
        "critical" => Problem::Critical,
        "meanflow" => Problem::Meanflow,
        "quartic" => Problem::Quartic,
        "petviashvili" => Problem::Petviashvili,
        other => return Err(CliError::usage(format!("unknown problem `{other}`"))),
    }))
}

fn blocked_error(r: &ReducedParams) -> CliError {
    let regime = classify(r);
    CliError::new(
        BLOCKED,
        format!(
            "blocked: parameters are in the {} regime, where no nontrivial solution exists ({}); pass --force to run anyway",
            regime.primary(),
            regime.reason
        ),
    )
}

/// Picks the solver and applies the regime guard.
fn choose_problem(requested: Option<Problem>, r: &ReducedParams, force: bool) -> Result<Problem, CliError> {
    let regime = classify(r);
    let guarded = !matches!(requested, Some(Problem::Meanflow | Problem::Quartic));
    if guarded && regime.is_blocked() && !force {
        return Err(blocked_error(r));
    }
    if let Some(p) = requested {
        return Ok(p);
    }
    regime
        .tags
        .iter()
        .find_map(|t| match t {
            RegimeTag::SubcriticalNehari => Some(Problem::Subcritical),
            RegimeTag::CriticalNehari => Some(Problem::Critical),
            _ => None,
        })
        .ok_or_else(|| {
            CliError::usage(format!("no Nehari problem applies in the {} regime; pass --problem", regime.primary()))
        })
}

pub fn resolve(l: &Layers) -> Result<(Parameters, SolveInputs), CliError> {
    let physical = l.physical()?;
    let reduced = l.reduced(&physical)?;
    let force = l.raw("force") == Some("true");
    let requested = l.raw("problem").unwrap_or("auto").to_string();
    let problem = choose_problem(problem_from_name(&requested)?, &reduced, force)?;
    let (n, half_length) = l.grid(DEFAULT_N, DEFAULT_L)?;
    let width = l.number("width")?.unwrap_or(1.0);
    if !(width > 0.0) {
        return Err(CliError::usage("width must be positive"));
    }
    let guess = match l.raw("guess").unwrap_or("sech") {
        "sech" => InitialGuess::Sech { width },
        "gaussian" => InitialGuess::Gaussian { width },
        "algebraic" => InitialGuess::Algebraic { a: width },
        other => return Err(CliError::usage(format!("unknown guess `{other}`"))),
    };
    let defaults = SolveConfig::default();
    let config = SolveConfig {
        n,
        half_length,
        guess,
        max_iters: l.parsed("max_iters")?.unwrap_or(defaults.max_iters),
        tol_residual: l.number("tol")?.unwrap_or(defaults.tol_residual),
        seed: l.parsed("seed")?.unwrap_or(defaults.seed),
        perturbation: l.number("perturbation")?.unwrap_or(defaults.perturbation),
        force,
        ..defaults
    };
    let inputs = SolveInputs {
        problem,
        requested,
        level: l.number("q")?,
        alpha1: l.number("alpha1")?.unwrap_or(1.0),
        alpha2: l.number("alpha2")?.unwrap_or(1.0),
        config,
    };
    Ok((Parameters { physical, reduced }, inputs))
}

fn level(inputs: &SolveInputs) -> Result<f64, CliError> {
    inputs.level.ok_or_else(|| CliError::usage("this problem needs --q"))
}

pub fn dispatch(r: &ReducedParams, inputs: &SolveInputs) -> Result<GroundState, CliError> {
    let cfg = &inputs.config;
    let gs = match inputs.problem {
        Problem::Subcritical => solve_nehari_subcritical(r, cfg)?,
        Problem::Critical => solve_nehari_critical(r, cfg)?,
        Problem::Petviashvili => petviashvili_solve(r, cfg)?,
        Problem::Meanflow => {
            if r.quintic != 0.0 && !cfg.force {
                return Err(CliError::usage(format!("the mean-flow problem needs B = 0, got B = {}", r.quintic)));
            }
            solve_fixed_meanflow(level(inputs)?, inputs.alpha1, inputs.alpha2, r.frequency, cfg)?
        }
        Problem::Quartic => {
            if !r.frequency_is_zero() && !cfg.force {
                return Err(CliError::usage(format!("the quartic problem needs nu = 0, got nu = {}", r.frequency)));
            }
            solve_fixed_quartic(level(inputs)?, r.quintic, r.nonlocal, cfg)?
        }
    };
    Ok(gs)
}

/// Resolves, solves, and writes the summary, the profile and a manifest into `dir`.
/// The manifest is written on failure too, when the inputs could be resolved.
pub fn run(l: &Layers, dir: &Path, config_file_hash: Option<String>, quiet: bool) -> Result<RunManifest, CliError> {
    let clock = Clock::start();
    let physical = l.physical()?;
    let reduced = l.reduced(&physical)?;
    let resolved = resolve(l);
    let (params, grid, inputs_json) = match &resolved {
        Ok((p, inputs)) => (
            p.clone(),
            GridSpec { n: inputs.config.n, half_length: inputs.config.half_length },
            serde_json::to_value(inputs).unwrap_or_default(),
        ),
        Err(_) => {
            let (n, half_length) = l.grid(DEFAULT_N, DEFAULT_L).unwrap_or((DEFAULT_N, DEFAULT_L));
            (Parameters { physical, reduced }, GridSpec { n, half_length }, serde_json::Value::Null)
        }
    };
    ensure_dir(dir)?;
    let mut manifest = RunManifest::new("solve", params, grid, inputs_json, config_file_hash);
    let result = resolved.and_then(|(p, inputs)| {
        let gs = dispatch(&p.reduced, &inputs)?;
        let summary = gs.summary(Some(FIELD_FILE.to_string()));
        io::write_field(&dir.join(FIELD_FILE), &gs.psi)?;
        write_json(&dir.join(SUMMARY_FILE), &summary)?;
        manifest.outputs = vec![SUMMARY_FILE.to_string(), FIELD_FILE.to_string()];
        if !quiet {
            println!("{}", summary_line(&summary));
        }
        Ok(())
    });
    manifest.finish(&clock, &result);
    manifest.write(dir)?;
    result.map(|_| manifest)
}
