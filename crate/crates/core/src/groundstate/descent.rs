//! Preconditioned limited-memory descent on a constraint set.
//!
//! Iterates stay on the set (Nehari set or a constraint level) by an exact
//! rescaling after every trial step, so the objective is a function of the
//! direction only and its gradient is tangential.

use std::collections::VecDeque;
use std::sync::Arc;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::{combined_gradient, Terms};
use crate::params::ReducedParams;
use crate::spectral::{Field, Grid};

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
const STALL_WINDOW: usize = 50;

/// A point on the constraint set together with what the descent needs there.
pub(crate) struct Point {
    pub psi: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    /// Lagrange multiplier of the constraint at this point.
    pub multiplier: f64,
}

pub(crate) trait ConstraintSet {
    /// Rescales an arbitrary nonzero profile onto the set; `None` when no scaling reaches it.
    fn project(&self, psi: &[f64]) -> Result<Option<Vec<f64>>>;
    /// Evaluates objective, tangential gradient and multiplier at a point already on the set.
    fn evaluate(&self, psi: Vec<f64>) -> Point;
}

fn to_field(grid: &Arc<Grid>, v: &[f64]) -> Field {
    Field::from_parts(grid.clone(), v.iter().map(|&x| Complex64::new(x, 0.0)).collect())
}

fn re(f: Field) -> Vec<f64> {
    f.into_values().into_iter().map(|z| z.re).collect()
}

/// `K(lambda psi) = lambda^2 quad + lambda^4 quart + lambda^6 sext`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NehariPolynomial {
    pub quad: f64,
    pub quart: f64,
    pub sext: f64,
}

impl NehariPolynomial {
    pub fn of(t: &Terms, r: &ReducedParams) -> NehariPolynomial {
        NehariPolynomial {
            quad: t.kinetic - r.frequency * t.mass,
            quart: r.cubic * t.quartic + r.nonlocal * t.nonlocal,
            sext: r.quintic * t.sextic,
        }
    }

    pub fn eval(&self, l: f64) -> f64 {
        let l2 = l * l;
        l2 * (self.quad + l2 * (self.quart + l2 * self.sext))
    }

    /// Positive root by bisection on `[1e-6, lambda_hi]`, with `lambda_hi` doubled until
    /// `K` turns non-positive or reaches `2^60`.
    pub fn root(&self, rel_tol: f64) -> Option<f64> {
        let mut lo = 1e-6;
        if !(self.eval(lo) > 0.0) {
            return None;
        }
        let mut hi = 1.0;
        while self.eval(hi) > 0.0 {
            hi *= 2.0;
            if hi > 2f64.powi(60) {
                return None;
            }
        }
        if hi <= lo {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= rel_tol * hi {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

/// The Nehari set `{K = 0}`; objective `E`, which equals `W` there.
pub(crate) struct NehariSet {
    pub grid: Arc<Grid>,
    pub params: ReducedParams,
    pub bisection_tol: f64,
}

impl ConstraintSet for NehariSet {
    fn project(&self, psi: &[f64]) -> Result<Option<Vec<f64>>> {
        let t = Terms::of(&to_field(&self.grid, psi));
        let poly = NehariPolynomial::of(&t, &self.params);
        Ok(poly.root(self.bisection_tol).map(|l| psi.iter().map(|v| v * l).collect()))
    }

    fn evaluate(&self, psi: Vec<f64>) -> Point {
        let f = to_field(&self.grid, &psi);
        let value = Terms::of(&f).action(&self.params);
        let r = &self.params;
        let ge = re(combined_gradient(&f, [1.0, -r.frequency, r.cubic, r.quintic, r.nonlocal]));
        let gk = re(combined_gradient(&f, [2.0, -2.0 * r.frequency, 4.0 * r.cubic, 6.0 * r.quintic, 4.0 * r.nonlocal]));
        let kk = dot(&gk, &gk);
        let multiplier = if kk > 0.0 { dot(&ge, &gk) / kk } else { 0.0 };
        Point { psi, value, grad: ge, multiplier }
    }
}

/// A level set `{Q = q}` of a quartic-homogeneous constraint, objective `E`.
pub(crate) struct LevelSet {
    pub grid: Arc<Grid>,
    /// Coefficients of the objective `E`.
    pub params: ReducedParams,
    /// `(quartic, nonlocal)` weights of `Q = 1/4 int (quartic |psi|^4 + nonlocal rho |D| rho)`.
    pub weights: (f64, f64),
    pub level: f64,
}

impl LevelSet {
    pub fn value_of(&self, t: &Terms) -> f64 {
        0.25 * (self.weights.0 * t.quartic + self.weights.1 * t.nonlocal)
    }
}

impl ConstraintSet for LevelSet {
    fn project(&self, psi: &[f64]) -> Result<Option<Vec<f64>>> {
        let t = Terms::of(&to_field(&self.grid, psi));
        let q = self.value_of(&t);
        if !(q.is_finite()) {
            return Ok(None);
        }
        if q < 1e-300 {
            return Err(Error::DegenerateConstraint);
        }
        let s = (self.level / q).powf(0.25);
        Ok(Some(psi.iter().map(|v| v * s).collect()))
    }

    fn evaluate(&self, psi: Vec<f64>) -> Point {
        let f = to_field(&self.grid, &psi);
        let r = &self.params;
        let value = Terms::of(&f).action(r);
        let ge = re(combined_gradient(&f, [1.0, -r.frequency, r.cubic, r.quintic, r.nonlocal]));
        let gq = re(combined_gradient(&f, [0.0, 0.0, self.weights.0, 0.0, self.weights.1]));
        let multiplier = dot(&ge, &psi) / dot(&gq, &psi);
        let grad = ge.iter().zip(&gq).map(|(a, b)| a - multiplier * b).collect();
        Point { psi, value, grad, multiplier }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn roll(v: &mut [f64], by: usize) {
    if by != 0 {
        v.rotate_right(by);
    }
}

/// Index shift that puts the leftmost maximum of `|v|` at `n/2`.
pub(crate) fn centering_shift(v: &[f64]) -> usize {
    let n = v.len();
    let mut best = 0;
    for j in 1..n {
        if v[j].abs() > v[best].abs() {
            best = j;
        }
    }
    (n / 2 + n - best) % n
}

pub(crate) struct DescentSettings {
    pub step: f64,
    pub max_iters: usize,
    pub tol_residual: f64,
    pub tol_change: f64,
    pub memory: usize,
    /// Shift of the preconditioner `(-d^2 + shift)^{-1}`.
    pub shift: f64,
    pub rearrange_every: usize,
}

pub(crate) struct DescentOutcome {
    pub point: Point,
    pub iterations: usize,
    pub history: Vec<f64>,
    pub converged: bool,
}

fn scale_of(grid: &Arc<Grid>, psi: &[f64]) -> f64 {
    let t = Terms::of(&to_field(grid, psi));
    (t.kinetic + t.mass).sqrt()
}

/// `||grad|| / sqrt(int psi'^2 + psi^2)`.
fn residual_of(grid: &Arc<Grid>, p: &Point) -> f64 {
    let raw = (dot(&p.grad, &p.grad) * grid.dx()).sqrt();
    let s = scale_of(grid, &p.psi);
    if s > 0.0 {
        raw / s
    } else {
        0.0
    }
}

fn precondition(grid: &Arc<Grid>, v: &[f64], shift: f64) -> Vec<f64> {
    let nyq = grid.nyquist();
    let out = grid.multiply(&v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>(), |j, k| {
        if j == nyq {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / (k * k + shift), 0.0)
        }
    });
    out.into_iter().map(|z| z.re).collect()
}

pub(crate) fn minimize<S: ConstraintSet>(
    set: &S,
    grid: &Arc<Grid>,
    start: Vec<f64>,
    settings: &DescentSettings,
) -> Result<DescentOutcome> {
    let mut start = set.project(&start)?.ok_or(Error::InfeasibleStart)?;
    let by = centering_shift(&start);
    roll(&mut start, by);
    let mut cur = set.evaluate(start);
    let mut history = vec![cur.value];
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>)> = VecDeque::new();
    let mut residual = residual_of(grid, &cur);
    let mut stalled = 0usize;

    for it in 0..settings.max_iters {
        if residual <= settings.tol_residual {
            return Ok(DescentOutcome { point: cur, iterations: it, history, converged: true });
        }

        let mut dir = two_loop(grid, &cur.grad, &mem, settings.shift);
        let mut slope = dot(&dir, &cur.grad);
        if !(slope < 0.0) {
            mem.clear();
            dir = precondition(grid, &cur.grad, settings.shift).iter().map(|v| -v).collect();
            slope = dot(&dir, &cur.grad);
        }
        let mut t = if mem.is_empty() { settings.step } else { 1.0 };
        let grad_norm = dot(&cur.grad, &cur.grad);
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial: Vec<f64> = cur.psi.iter().zip(&dir).map(|(p, d)| p + t * d).collect();
            if let Some(proj) = set.project(&trial)? {
                let cand = set.evaluate(proj);
                let armijo = cand.value <= cur.value + ARMIJO * t * slope * grid.dx();
                let flat = (cand.value - cur.value).abs() <= 1e-14 * cur.value.abs().max(1e-300)
                    && dot(&cand.grad, &cand.grad) < grad_norm;
                if cand.value.is_finite() && (armijo || flat) {
                    accepted = Some(cand);
                    break;
                }
            }
            t *= 0.5;
        }
        let Some(mut next) = accepted else {
            if mem.is_empty() {
                break;
            }
            mem.clear();
            continue;
        };

        let change = (next.value - cur.value).abs() / cur.value.abs().max(1e-300);
        stalled = if change < settings.tol_change { stalled + 1 } else { 0 };

        let mut s: Vec<f64> = next.psi.iter().zip(&cur.psi).map(|(a, b)| a - b).collect();
        let mut y: Vec<f64> = next.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();
        let by = centering_shift(&next.psi);
        if by != 0 {
            roll(&mut next.psi, by);
            roll(&mut next.grad, by);
            roll(&mut s, by);
            roll(&mut y, by);
            for (ms, my) in mem.iter_mut() {
                roll(ms, by);
                roll(my, by);
            }
        }
        if dot(&s, &y) > 0.0 {
            mem.push_back((s, y));
            if mem.len() > settings.memory {
                mem.pop_front();
            }
        }
        cur = next;
        if settings.rearrange_every > 0 && (it + 1) % settings.rearrange_every == 0 {
            let arranged = super::canonical_order(&cur.psi);
            if let Some(p) = set.project(&arranged)? {
                let cand = set.evaluate(p);
                if cand.value <= cur.value {
                    cur = cand;
                    mem.clear();
                }
            }
        }
        history.push(cur.value);
        residual = residual_of(grid, &cur);
        if stalled >= STALL_WINDOW {
            return Ok(DescentOutcome {
                point: cur,
                iterations: it + 1,
                history,
                converged: residual <= settings.tol_residual,
            });
        }
    }
    let converged = residual <= settings.tol_residual;
    let iterations = history.len() - 1;
    Ok(DescentOutcome { point: cur, iterations, history, converged })
}

fn two_loop(grid: &Arc<Grid>, g: &[f64], mem: &VecDeque<(Vec<f64>, Vec<f64>)>, shift: f64) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(mem.len());
    for (s, y) in mem.iter().rev() {
        let rho = 1.0 / dot(y, s);
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    let scale = match mem.back() {
        Some((s, y)) => {
            let py = precondition(grid, y, shift);
            dot(s, y) / dot(y, &py)
        }
        None => 1.0,
    };
    let mut r: Vec<f64> = precondition(grid, &q, shift).into_iter().map(|v| v * scale).collect();
    for ((s, y), a) in mem.iter().zip(alphas.iter().rev()) {
        let rho = 1.0 / dot(y, s);
        let b = rho * dot(y, &r);
        for (ri, si) in r.iter_mut().zip(s) {
            *ri += si * (a - b);
        }
    }
    r.iter().map(|v| -v).collect()
}
