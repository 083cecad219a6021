//! Ground states of the profile equation: Nehari minimization (subcritical and
//! critical), minimization at a fixed mean-flow or quartic constraint level, and a
//! Petviashvili fixed-point solver for cross-validation.

mod descent;
mod petviashvili;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{FunctionalReport, MeanFlowWeights, NehariConvention};
use crate::params::{classify, ReducedParams, RegimeTag};
use crate::spectral::{make_grid, Field, Grid};
use crate::verify::{el_residual, Residual};

use descent::{minimize, DescentSettings, LevelSet, NehariSet};

pub use petviashvili::petviashvili_solve;

/// Starting profile, centered at `x = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialGuess {
    Gaussian {
        width: f64,
    },
    Sech {
        width: f64,
    },
    Algebraic {
        a: f64,
    },
    /// Samples on the solve grid.
    Custom {
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub n: usize,
    pub half_length: f64,
    pub guess: InitialGuess,
    /// First trial step of the line search.
    pub step: f64,
    pub max_iters: usize,
    /// Bound on the normalized Euler-Lagrange residual.
    pub tol_residual: f64,
    /// Relative objective change below which 50 consecutive iterations count as a stall.
    pub tol_change: f64,
    /// Relative width at which the Nehari bisection stops.
    pub bisection_tol: f64,
    pub seed: u64,
    /// Relative amplitude of the seeded multiplicative perturbation of the guess.
    pub perturbation: f64,
    /// Number of stored correction pairs.
    pub memory: usize,
    /// Apply the decreasing rearrangement every this many iterations (0 = never).
    pub rearrange_every: usize,
    /// Skip the sign preconditions of each problem.
    pub force: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            n: 1 << 14,
            half_length: 128.0 * std::f64::consts::PI,
            guess: InitialGuess::Sech { width: 1.0 },
            step: 1.0,
            max_iters: 5000,
            tol_residual: 1e-9,
            tol_change: 1e-16,
            bisection_tol: 1e-15,
            seed: 0,
            perturbation: 0.0,
            memory: 8,
            rearrange_every: 0,
            force: false,
        }
    }
}

impl SolveConfig {
    pub fn with_grid(n: usize, half_length: f64) -> SolveConfig {
        SolveConfig { n, half_length, ..SolveConfig::default() }
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.step) && positive(self.tol_residual) && positive(self.bisection_tol)) {
            return Err(Error::Precondition("step and tolerances must be positive".into()));
        }
        if !(self.tol_change >= 0.0) || self.max_iters == 0 || self.memory == 0 {
            return Err(Error::Precondition("max_iters and memory must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<Grid>> {
        make_grid(self.n, self.half_length)
    }

    /// Samples the initial guess, perturbed when requested.
    pub fn initial_profile(&self, grid: &Arc<Grid>) -> Result<Vec<f64>> {
        let mut v: Vec<f64> = match &self.guess {
            InitialGuess::Gaussian { width } => grid.x().iter().map(|x| (-(x / width).powi(2)).exp()).collect(),
            InitialGuess::Sech { width } => grid.x().iter().map(|x| 1.0 / (x / width).cosh()).collect(),
            InitialGuess::Algebraic { a } => grid.x().iter().map(|x| 1.0 / (a * a + x * x).sqrt()).collect(),
            InitialGuess::Custom { values } => {
                if values.len() != grid.n() {
                    return Err(Error::InvalidField("custom guess length differs from grid".into()));
                }
                values.clone()
            }
        };
        if self.perturbation != 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            for s in v.iter_mut() {
                *s *= 1.0 + self.perturbation * rng.random_range(-1.0..1.0);
            }
        }
        if v.iter().any(|s| !s.is_finite()) || v.iter().all(|&s| s == 0.0) {
            return Err(Error::InvalidField("initial guess must be finite and nonzero".into()));
        }
        Ok(v)
    }
}

/// Coefficients of the profile equation recovered from the multiplier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    #[serde(rename = "A")]
    pub cubic: Option<f64>,
    #[serde(rename = "gamma")]
    pub nonlocal: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Subcritical,
    Critical,
    Meanflow,
    Quartic,
    Petviashvili,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundState {
    pub psi: Field,
    pub problem: Problem,
    pub multiplier: f64,
    pub report: FunctionalReport,
    pub residual: Residual,
    pub iterations: usize,
    pub regime: RegimeTag,
    pub derived: Derived,
    /// Parameters of the equation the profile solves, multiplier included.
    pub target: ReducedParams,
    /// Parameters as given to the solver.
    pub input: ReducedParams,
    /// Constraint level for the fixed-level problems.
    pub level: Option<f64>,
    pub weights: Option<MeanFlowWeights>,
    /// Objective after each accepted iteration.
    pub history: Vec<f64>,
}

/// Serializable view of a [`GroundState`], with the profile stored elsewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundStateSummary {
    pub problem: Problem,
    pub regime: RegimeTag,
    pub input: ReducedParams,
    pub target: ReducedParams,
    pub level: Option<f64>,
    pub weights: Option<MeanFlowWeights>,
    pub multiplier: f64,
    pub derived: Derived,
    pub functionals: FunctionalReport,
    pub residual: Residual,
    pub iterations: usize,
    pub grid: GridSpec,
    pub field_csv: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(rename = "L")]
    pub half_length: f64,
}

impl GroundState {
    pub fn summary(&self, field_csv: Option<String>) -> GroundStateSummary {
        GroundStateSummary {
            problem: self.problem,
            regime: self.regime,
            input: self.input,
            target: self.target,
            level: self.level,
            weights: self.weights,
            multiplier: self.multiplier,
            derived: self.derived,
            functionals: self.report.clone(),
            residual: self.residual,
            iterations: self.iterations,
            grid: GridSpec { n: self.psi.grid().n(), half_length: self.psi.grid().half_length() },
            field_csv,
        }
    }
}

/// Decreasing rearrangement about the center index `n/2`: largest magnitude at `n/2`, then
/// alternately `n/2 + 1, n/2 - 1, n/2 + 2, ...`, with index `0` filled last.
pub(crate) fn canonical_order(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let mut mags: Vec<f64> = v.iter().map(|s| s.abs()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let mut out = vec![0.0; n];
    let c = n / 2;
    let mut slots = Vec::with_capacity(n);
    slots.push(c);
    for m in 1..c {
        slots.push(c + m);
        slots.push(c - m);
    }
    slots.push(0);
    for (slot, val) in slots.into_iter().zip(mags) {
        out[slot] = val;
    }
    out
}

/// Nonnegative, even, nonincreasing rearrangement of the samples about `x = 0`.
pub fn canonicalize(psi: &Field) -> Field {
    let v = canonical_order(&psi.abs());
    real_field(psi.grid(), v)
}

fn peak_index(mags: &[f64]) -> usize {
    mags.iter().enumerate().fold(0, |best, (j, &s)| if s > mags[best] { j } else { best })
}

/// Moves the peak to `x = 0` by a spectral translation and keeps the even part, with the
/// sign chosen so the peak is positive. Unlike [`canonicalize`] this keeps a smooth
/// profile smooth, so a converged iterate stays close to a critical point.
pub(crate) fn center_and_symmetrize(grid: &Arc<Grid>, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let m = peak_index(&v.iter().map(|s| s.abs()).collect::<Vec<_>>());
    let sign = if v[m] < 0.0 { -1.0 } else { 1.0 };
    let mags: Vec<f64> = v.iter().map(|s| sign * s).collect();
    let (lo, mid, hi) = (mags[(m + n - 1) % n], mags[m], mags[(m + 1) % n]);
    let curvature = lo - 2.0 * mid + hi;
    let offset = if curvature < 0.0 { (0.5 * (lo - hi) / curvature).clamp(-0.5, 0.5) } else { 0.0 };
    let peak = grid.x()[m] + offset * grid.dx();
    let f = real_field(grid, mags);
    let moved = if peak == 0.0 { f } else { crate::spectral::shift(&f, -peak) };
    let u = moved.re();
    (0..n).map(|j| 0.5 * (u[j] + u[(n - j) % n])).collect()
}

/// Share of the peak below which the smallest modulus must fall for a profile to count as
/// localized. Algebraic tails stay far below this on any box that resolves them.
const LOCALIZATION_FLOOR: f64 = 0.25;

/// Rejects profiles that fill the box, such as the constant states the periodic
/// truncation admits.
pub(crate) fn ensure_localized(psi: &[f64]) -> Result<()> {
    let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = psi.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if peak > 0.0 && floor > LOCALIZATION_FLOOR * peak {
        return Err(Error::NotLocalized { floor_ratio: floor / peak });
    }
    Ok(())
}

fn real_field(grid: &Arc<Grid>, v: Vec<f64>) -> Field {
    Field::from_parts(grid.clone(), v.into_iter().map(|s| Complex64::new(s, 0.0)).collect())
}

fn preconditioner_shift(r: &ReducedParams, grid: &Grid, force: bool) -> f64 {
    let base = (std::f64::consts::PI / grid.half_length()).powi(2);
    if force {
        r.frequency.abs() + base
    } else if r.frequency_negative() {
        -r.frequency
    } else {
        base
    }
}

fn descent_settings(cfg: &SolveConfig, shift: f64) -> DescentSettings {
    DescentSettings {
        step: cfg.step,
        max_iters: cfg.max_iters,
        tol_residual: cfg.tol_residual,
        tol_change: cfg.tol_change,
        memory: cfg.memory,
        shift,
        rearrange_every: cfg.rearrange_every,
    }
}

struct Polished {
    psi: Vec<f64>,
    multiplier: f64,
    iterations: usize,
    history: Vec<f64>,
    converged: bool,
}

/// Runs the descent, centers and symmetrizes, and polishes once more from the
/// symmetrized profile if that disturbed the residual.
fn run_canonical<S: descent::ConstraintSet>(
    set: &S,
    grid: &Arc<Grid>,
    start: Vec<f64>,
    settings: &DescentSettings,
) -> Result<Polished> {
    let mut start = start;
    let mut iterations = 0;
    let mut history = Vec::new();
    for round in 0..3 {
        let out = minimize(set, grid, start, settings)?;
        iterations += out.iterations;
        history.extend(out.history.iter().copied());
        if !out.converged {
            let (psi, multiplier) = (out.point.psi, out.point.multiplier);
            return Ok(Polished { psi, multiplier, iterations, history, converged: false });
        }
        let arranged = center_and_symmetrize(grid, &out.point.psi);
        let projected = set.project(&arranged)?.ok_or(Error::InfeasibleStart)?;
        let p = set.evaluate(projected);
        let res = el_scale_residual(grid, &p.grad, &p.psi);
        if res <= settings.tol_residual || round == 2 {
            let converged = res <= settings.tol_residual;
            return Ok(Polished { psi: p.psi, multiplier: p.multiplier, iterations, history, converged });
        }
        start = p.psi;
    }
    unreachable!()
}

fn el_scale_residual(grid: &Arc<Grid>, grad: &[f64], psi: &[f64]) -> f64 {
    let f = real_field(grid, psi.to_vec());
    let t = crate::functionals::Terms::of(&f);
    let raw = (grad.iter().map(|g| g * g).sum::<f64>() * grid.dx()).sqrt();
    let s = (t.kinetic + t.mass).sqrt();
    if s > 0.0 {
        raw / s
    } else {
        0.0
    }
}

fn nehari_solve(r: &ReducedParams, cfg: &SolveConfig, convention: NehariConvention) -> Result<GroundState> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let start = cfg.initial_profile(&grid)?;
    let set = NehariSet { grid: grid.clone(), params: *r, bisection_tol: cfg.bisection_tol };
    let settings = descent_settings(cfg, preconditioner_shift(r, &grid, cfg.force));
    let Polished { psi, multiplier: mu, iterations, history, converged } =
        run_canonical(&set, &grid, start, &settings)?;
    if converged {
        ensure_localized(&psi)?;
    }
    let psi = real_field(&grid, psi);
    let residual = el_residual(&psi, r);
    if !converged {
        return Err(Error::NoConvergence { iterations, residual: residual.normalized });
    }
    let (problem, regime) = match convention {
        NehariConvention::Subcritical => (Problem::Subcritical, RegimeTag::SubcriticalNehari),
        NehariConvention::Critical => (Problem::Critical, RegimeTag::CriticalNehari),
    };
    Ok(GroundState {
        report: FunctionalReport::evaluate(&psi, r, convention, None),
        psi,
        problem,
        multiplier: mu,
        residual,
        iterations,
        regime: if cfg.force { classify(r).primary() } else { regime },
        derived: Derived::default(),
        target: *r,
        input: *r,
        level: None,
        weights: None,
        history,
    })
}

/// Minimizes the action over the Nehari set with `nu < 0, B <= 0, gamma >= 0`.
pub fn solve_nehari_subcritical(r: &ReducedParams, cfg: &SolveConfig) -> Result<GroundState> {
    if !cfg.force && !(r.frequency_negative() && r.quintic <= 0.0 && r.nonlocal >= 0.0) {
        return Err(Error::Precondition("subcritical Nehari problem needs nu < 0, B <= 0, gamma >= 0".into()));
    }
    nehari_solve(r, cfg, NehariConvention::Subcritical)
}

/// Minimizes the action over the Nehari set with `nu = 0, A > 0, B < 0, gamma >= 0`.
pub fn solve_nehari_critical(r: &ReducedParams, cfg: &SolveConfig) -> Result<GroundState> {
    if !cfg.force && !(r.frequency_is_zero() && r.cubic > 0.0 && r.quintic < 0.0 && r.nonlocal >= 0.0) {
        return Err(Error::Precondition("critical Nehari problem needs nu = 0, A > 0, B < 0, gamma >= 0".into()));
    }
    let r = ReducedParams { frequency: if cfg.force { r.frequency } else { 0.0 }, ..*r };
    nehari_solve(&r, cfg, NehariConvention::Critical)
}

/// Minimizes `1/2 int |psi'|^2 - nu |psi|^2` at `Q_meanflow = q`. The multiplier
/// `mu = E/(2Q)` yields `gamma = -alpha1^2 mu` and `A = -alpha2^2 mu`.
pub fn solve_fixed_meanflow(q: f64, alpha1: f64, alpha2: f64, nu: f64, cfg: &SolveConfig) -> Result<GroundState> {
    cfg.validate()?;
    let weights = MeanFlowWeights::new(alpha1, alpha2)?;
    if !(q > 0.0) {
        return Err(Error::Precondition(format!("constraint level must be positive, got {q}")));
    }
    if !cfg.force && !(nu < -crate::params::FREQUENCY_ZERO_BAND) {
        return Err(Error::Precondition(format!("fixed mean-flow problem needs nu < 0, got {nu}")));
    }
    let grid = cfg.grid()?;
    let start = cfg.initial_profile(&grid)?;
    let objective = ReducedParams::new(nu, 0.0, 0.0, 0.0);
    let set = LevelSet { grid: grid.clone(), params: objective, weights: (alpha2 * alpha2, alpha1 * alpha1), level: q };
    let settings = descent_settings(cfg, preconditioner_shift(&objective, &grid, cfg.force));
    let Polished { psi, multiplier: mu, iterations, history, converged } =
        run_canonical(&set, &grid, start, &settings)?;
    if converged {
        ensure_localized(&psi)?;
    }
    let psi = real_field(&grid, psi);
    let target = ReducedParams::new(nu, -alpha2 * alpha2 * mu, 0.0, -alpha1 * alpha1 * mu);
    let residual = el_residual(&psi, &target);
    if !converged {
        return Err(Error::NoConvergence { iterations, residual: residual.normalized });
    }
    Ok(GroundState {
        report: FunctionalReport::evaluate(&psi, &objective, NehariConvention::Subcritical, Some(weights)),
        psi,
        problem: Problem::Meanflow,
        multiplier: mu,
        residual,
        iterations,
        regime: RegimeTag::FixedMeanFlow,
        derived: Derived { cubic: Some(target.cubic), nonlocal: Some(target.nonlocal) },
        target,
        input: objective,
        level: Some(q),
        weights: Some(weights),
        history,
    })
}

/// Minimizes `int 1/2 |psi'|^2 + B/6 |psi|^6 + gamma/4 rho |D| rho` at `1/4 int |psi|^4 = q`
/// with `nu = 0`. The multiplier gives `A = -mu`.
pub fn solve_fixed_quartic(q: f64, quintic: f64, nonlocal: f64, cfg: &SolveConfig) -> Result<GroundState> {
    cfg.validate()?;
    if !(q > 0.0) {
        return Err(Error::Precondition(format!("constraint level must be positive, got {q}")));
    }
    if !cfg.force && !(quintic < 0.0 && nonlocal >= 0.0) {
        return Err(Error::Precondition("fixed quartic problem needs B < 0, gamma >= 0".into()));
    }
    let grid = cfg.grid()?;
    let start = cfg.initial_profile(&grid)?;
    let objective = ReducedParams::new(0.0, 0.0, quintic, nonlocal);
    let set = LevelSet { grid: grid.clone(), params: objective, weights: (1.0, 0.0), level: q };
    let settings = descent_settings(cfg, preconditioner_shift(&objective, &grid, cfg.force));
    let Polished { psi, multiplier: mu, iterations, history, converged } =
        run_canonical(&set, &grid, start, &settings)?;
    if converged {
        ensure_localized(&psi)?;
    }
    let psi = real_field(&grid, psi);
    let report = FunctionalReport::evaluate(&psi, &objective, NehariConvention::Critical, None);
    let target = ReducedParams::new(0.0, -mu, quintic, nonlocal);
    let residual = el_residual(&psi, &target);
    if !(history.iter().any(|&e| e < 0.0)) {
        return Err(Error::PositiveEnergyStall);
    }
    if !converged {
        return Err(Error::NoConvergence { iterations, residual: residual.normalized });
    }
    if report.action >= 0.0 {
        return Err(Error::PositiveEnergyStall);
    }
    Ok(GroundState {
        report,
        psi,
        problem: Problem::Quartic,
        multiplier: mu,
        residual,
        iterations,
        regime: RegimeTag::FixedQuartic,
        derived: Derived { cubic: Some(target.cubic), nonlocal: None },
        target,
        input: objective,
        level: Some(q),
        weights: None,
        history,
    })
}
