//! Integrating-factor RK4 for the full evolution equation
//! `i u_t - u_xx - b|u|^2 u + i alpha |u|^2 u_x + i beta u^2 conj(u)_x + gamma u |D|(|u|^2) = 0`,
//! written as `u_t = -i u_xx + N(u)`; the linear part is integrated exactly in Fourier space.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::conserved_quantities;
use crate::gauge::{reconstruct_traveling_wave, ReconstructionMode};
use crate::params::PhysicalParams;
use crate::spectral::{Field, Grid};

/// Largest admissible `dt * max k^2`.
pub const STABILITY_LIMIT: f64 = 4.0 * PI;
/// Default `dt * max k^2`.
pub const DEFAULT_DT_FACTOR: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    Ifrk4,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    /// Time step; `None` picks `0.4 / max k^2`.
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Record every `stride` steps (the final time is always recorded).
    pub stride: usize,
    pub integrator: Integrator,
    pub params: PhysicalParams,
}

impl EvolveConfig {
    pub fn new(params: PhysicalParams, t_final: f64) -> EvolveConfig {
        EvolveConfig { dt: None, t_final, stride: 1, integrator: Integrator::Ifrk4, params }
    }

    /// Step count and the step actually used (adjusted so that the steps land on `t_final`).
    pub fn schedule(&self, grid: &Grid) -> Result<(usize, f64)> {
        let k2 = grid.k_max().powi(2);
        let dt = self.dt.unwrap_or(DEFAULT_DT_FACTOR / k2);
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Precondition(format!("time step must be positive, got {dt}")));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::Precondition(format!("final time must be non-negative, got {}", self.t_final)));
        }
        if self.stride == 0 {
            return Err(Error::Precondition("stride must be at least 1".into()));
        }
        let steps = (self.t_final / dt).ceil() as usize;
        let dt = if steps == 0 { dt } else { self.t_final / steps as f64 };
        if dt * k2 > STABILITY_LIMIT {
            return Err(Error::Precondition(format!(
                "dt * max k^2 = {:.3} exceeds the stability limit {:.3}",
                dt * k2,
                STABILITY_LIMIT
            )));
        }
        Ok((steps, dt))
    }
}

/// Time series of the conserved quantities and the profile drift.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    #[serde(rename = "M")]
    pub mass: Vec<f64>,
    #[serde(rename = "P")]
    pub momentum: Vec<f64>,
    #[serde(rename = "Eaction")]
    pub action: Vec<f64>,
    /// `-Eaction` evaluated with `beta = 0`; present only when `beta = 0`.
    pub hamiltonian: Option<Vec<f64>>,
    pub drift: Vec<f64>,
    /// Time of the first non-finite state, if any.
    pub blowup_time: Option<f64>,
}

impl EvolutionTrace {
    fn max_rel_change(v: &[f64]) -> f64 {
        let Some(&first) = v.first() else { return 0.0 };
        Self::max_change_over(v, first.abs())
    }

    fn max_change_over(v: &[f64], scale: f64) -> f64 {
        let Some(&first) = v.first() else { return 0.0 };
        let scale = scale.max(f64::MIN_POSITIVE);
        v.iter().fold(0.0, |m, &x| m.max((x - first).abs() / scale))
    }

    pub fn mass_drift(&self) -> f64 {
        Self::max_rel_change(&self.mass)
    }

    /// Change of `P` relative to `max(|P(0)|, M(0))`; real profiles start with `P = 0`.
    pub fn momentum_drift(&self) -> f64 {
        let p0 = self.momentum.first().map_or(0.0, |p| p.abs());
        let m0 = self.mass.first().copied().unwrap_or(0.0);
        Self::max_change_over(&self.momentum, p0.max(m0))
    }

    pub fn hamiltonian_drift(&self) -> Option<f64> {
        self.hamiltonian.as_deref().map(Self::max_rel_change)
    }

    pub fn final_drift(&self) -> f64 {
        self.drift.last().copied().unwrap_or(0.0)
    }
}

/// Reference against which the drift is measured.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DriftReference {
    /// Best translate of the initial modulus.
    BestShift,
    /// Initial modulus translated by `c t`.
    Speed(f64),
}

struct Stepper<'a> {
    grid: &'a Grid,
    p: PhysicalParams,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    dt: f64,
}

impl<'a> Stepper<'a> {
    fn new(grid: &'a Grid, p: PhysicalParams, dt: f64) -> Stepper<'a> {
        let full = grid.k().iter().map(|k| Complex64::from_polar(1.0, k * k * dt)).collect();
        let half = grid.k().iter().map(|k| Complex64::from_polar(1.0, 0.5 * k * k * dt)).collect();
        Stepper { grid, p, full, half, dt }
    }

    /// Dealiased spectrum of `-i b |u|^2 u - alpha |u|^2 u_x - beta u^2 conj(u_x) + i gamma u |D|(|u|^2)`.
    fn nonlinear(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let g = self.grid;
        let u = g.inverse(spec.to_vec());
        let nyq = g.nyquist();
        let mut ux_spec = spec.to_vec();
        for (j, v) in ux_spec.iter_mut().enumerate() {
            *v *= if j == nyq { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, g.k()[j]) };
        }
        let ux = g.inverse(ux_spec);
        let rho: Vec<Complex64> = u.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        let drho = if self.p.gamma != 0.0 { Some(g.abs_derivative_raw(&rho)) } else { None };
        let i = Complex64::new(0.0, 1.0);
        let out: Vec<Complex64> = (0..u.len())
            .map(|j| {
                let r = rho[j].re;
                let mut v =
                    -i * self.p.b * r * u[j] - self.p.alpha * r * ux[j] - self.p.beta * u[j] * u[j] * ux[j].conj();
                if let Some(d) = &drho {
                    v += i * self.p.gamma * d[j].re * u[j];
                }
                v
            })
            .collect();
        let mut s = g.forward(&out);
        for (v, &keep) in s.iter_mut().zip(g.dealias_mask()) {
            if !keep {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        s
    }

    fn step(&self, u: &[Complex64]) -> Vec<Complex64> {
        let h = self.dt;
        let (e, e2) = (&self.full, &self.half);
        let a = self.nonlinear(u);
        let u1: Vec<Complex64> = (0..u.len()).map(|j| e2[j] * (u[j] + 0.5 * h * a[j])).collect();
        let b = self.nonlinear(&u1);
        let u2: Vec<Complex64> = (0..u.len()).map(|j| e2[j] * u[j] + 0.5 * h * b[j]).collect();
        let c = self.nonlinear(&u2);
        let u3: Vec<Complex64> = (0..u.len()).map(|j| e[j] * u[j] + h * e2[j] * c[j]).collect();
        let d = self.nonlinear(&u3);
        (0..u.len()).map(|j| e[j] * u[j] + h / 6.0 * (e[j] * a[j] + 2.0 * e2[j] * (b[j] + c[j]) + d[j])).collect()
    }
}

/// One integrating-factor RK4 step; a negative `dt` steps backward.
pub fn step(u: &Field, p: &PhysicalParams, dt: f64) -> Result<Field> {
    let g = u.grid();
    let stepper = Stepper::new(g, *p, dt);
    let spec = stepper.step(&g.forward(u.values()));
    let out = g.inverse(spec);
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { time: dt, partial: Box::default() });
    }
    Ok(Field::from_parts(g.clone(), out))
}

/// `min_s || |u| - |u0|(. - s) ||_2 / ||u0||_2`.
pub fn best_shift_drift(u: &Field, u0: &Field) -> f64 {
    let g = u.grid();
    let a: Vec<Complex64> = u.values().iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    let b: Vec<Complex64> = u0.values().iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    let norm0 = g.inner_raw(&b, &b).re;
    if norm0 == 0.0 {
        return g.inner_raw(&a, &a).re.sqrt();
    }
    let fa = g.forward(&a);
    let fb = g.forward(&b);
    let cross: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y.conj()).collect();
    let n = g.n();
    // correlation at integer shifts
    let corr = g.inverse(cross.clone());
    let mut best = 0;
    for j in 1..n {
        if corr[j].re > corr[best].re {
            best = j;
        }
    }
    let mut s = if best <= n / 2 { best as f64 } else { best as f64 - n as f64 } * g.dx();
    // refine with Newton on the trigonometric correlation C(s) = Re sum cross_k e^{iks}
    let ks = g.k();
    let nyq = g.nyquist();
    for _ in 0..20 {
        let (mut d1, mut d2) = (0.0, 0.0);
        for j in 0..n {
            if j == nyq {
                continue;
            }
            let w = cross[j] * Complex64::from_polar(1.0, ks[j] * s);
            d1 += (w * Complex64::new(0.0, ks[j])).re;
            d2 -= (w * ks[j] * ks[j]).re;
        }
        if d2 >= 0.0 {
            break;
        }
        let delta = -d1 / d2;
        s += delta.clamp(-g.dx(), g.dx());
        if delta.abs() < 1e-14 * g.half_length() {
            break;
        }
    }
    let moved = crate::spectral::shift(&Field::from_parts(g.clone(), b), s);
    let diff: Vec<Complex64> = a.iter().zip(moved.values()).map(|(x, y)| x - y).collect();
    (g.inner_raw(&diff, &diff).re / norm0).sqrt()
}

fn speed_drift(u: &Field, u0_abs: &Field, shift_by: f64) -> f64 {
    let g = u.grid();
    let moved = crate::spectral::shift(u0_abs, shift_by);
    let norm0 = g.inner_raw(u0_abs.values(), u0_abs.values()).re;
    let diff: Vec<Complex64> =
        u.values().iter().zip(moved.values()).map(|(x, y)| Complex64::new(x.norm() - y.re, 0.0)).collect();
    if norm0 == 0.0 {
        return g.inner_raw(&diff, &diff).re.sqrt();
    }
    (g.inner_raw(&diff, &diff).re / norm0).sqrt()
}

fn hamiltonian(u: &Field, p: &PhysicalParams) -> f64 {
    -conserved_quantities(u, &PhysicalParams { beta: 0.0, ..*p }).action
}

/// Runs the evolution and records the trace; also returns the final state.
pub fn run_with_reference(
    u0: &Field,
    cfg: &EvolveConfig,
    reference: DriftReference,
) -> Result<(EvolutionTrace, Field)> {
    let g = u0.grid();
    let (steps, dt) = cfg.schedule(g)?;
    let p = cfg.params;
    let stepper = Stepper::new(g, p, dt);
    let track_h = p.beta == 0.0;
    let u0_abs = u0.map(|z| Complex64::new(z.norm(), 0.0));
    let mut trace =
        EvolutionTrace { hamiltonian: if track_h { Some(Vec::new()) } else { None }, ..EvolutionTrace::default() };
    let record = |trace: &mut EvolutionTrace, u: &Field, t: f64| {
        let c = conserved_quantities(u, &p);
        trace.times.push(t);
        trace.mass.push(c.mass);
        trace.momentum.push(c.momentum);
        trace.action.push(c.action);
        if let Some(h) = trace.hamiltonian.as_mut() {
            h.push(hamiltonian(u, &p));
        }
        let d = match reference {
            DriftReference::BestShift => best_shift_drift(u, u0),
            DriftReference::Speed(c) => speed_drift(u, &u0_abs, c * t),
        };
        trace.drift.push(d);
    };
    record(&mut trace, u0, 0.0);
    let mut spec = g.forward(u0.values());
    let mut current = u0.clone();
    for i in 1..=steps {
        spec = stepper.step(&spec);
        let t = i as f64 * dt;
        if spec.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            trace.blowup_time = Some(t);
            return Err(Error::NonFinite { time: t, partial: Box::new(trace) });
        }
        if i % cfg.stride == 0 || i == steps {
            current = Field::from_parts(g.clone(), g.inverse(spec.clone()));
            record(&mut trace, &current, t);
        }
    }
    Ok((trace, current))
}

/// Evolution with drift measured against the best translate of the initial modulus.
pub fn run(u0: &Field, cfg: &EvolveConfig) -> Result<EvolutionTrace> {
    run_with_reference(u0, cfg, DriftReference::BestShift).map(|(t, _)| t)
}

/// Reconstructs the traveling wave from a profile and evolves it; the drift column
/// compares `|u(t)|` with the profile translated by `c t`.
pub fn traveling_wave_test(psi: &Field, cfg: &EvolveConfig) -> Result<EvolutionTrace> {
    let u0 = reconstruct_traveling_wave(psi, &cfg.params, 0.0, ReconstructionMode::Strict)?.field;
    run_with_reference(&u0, cfg, DriftReference::Speed(cfg.params.c)).map(|(t, _)| t)
}

/// Share of spectral energy in the modes removed by dealiasing.
pub fn top_third_energy_fraction(u: &Field) -> f64 {
    let s = u.spectrum();
    let mask = u.grid().dealias_mask();
    let total: f64 = s.iter().map(|z| z.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    s.iter().zip(mask).filter(|(_, &keep)| !keep).map(|(z, _)| z.norm_sqr()).sum::<f64>() / total
}
