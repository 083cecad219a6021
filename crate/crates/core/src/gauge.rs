//! Gauge transformation, phase rotation, and traveling-wave reconstruction.
//!
//! `integral_{-inf}^x` is replaced by a cumulative trapezoid anchored at the left
//! edge of the box; on the torus any other anchor only changes a constant phase.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::PhysicalParams;
use crate::spectral::{shift, Field};

const PERIODICITY_TOL: f64 = 1e-9;

/// Parameters of the gauge map. The cumulative integral is always anchored at `x = -L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeContext {
    pub params: PhysicalParams,
}

impl GaugeContext {
    pub fn new(params: PhysicalParams) -> GaugeContext {
        GaugeContext { params }
    }

    fn rate(&self) -> f64 {
        (self.params.alpha + self.params.beta) / 4.0
    }
}

/// `int_{-L}^{x_j} |f|^2` by the trapezoid rule, starting from zero at the left edge.
pub fn cumulative_density(f: &Field) -> Vec<f64> {
    let dx = f.grid().dx();
    let mut out = Vec::with_capacity(f.values().len());
    let mut acc = 0.0;
    let mut prev = None;
    for z in f.values() {
        let r = z.norm_sqr();
        if let Some(p) = prev {
            acc += 0.5 * dx * (p + r);
        }
        out.push(acc);
        prev = Some(r);
    }
    out
}

fn apply_phase(f: &Field, phase: impl Fn(usize) -> f64) -> Field {
    f.map_indexed(|j, z| z * Complex64::from_polar(1.0, phase(j)))
}

/// `phi = u exp(-i (alpha+beta)/4 int |u|^2)`.
pub fn gauge_forward(u: &Field, ctx: &GaugeContext) -> Field {
    let rate = ctx.rate();
    if rate == 0.0 {
        return u.clone();
    }
    let cum = cumulative_density(u);
    apply_phase(u, |j| -rate * cum[j])
}

/// Inverse of [`gauge_forward`]; the modulus is unchanged, so the exponent is known from `phi`.
pub fn gauge_inverse(phi: &Field, ctx: &GaugeContext) -> Field {
    let rate = ctx.rate();
    if rate == 0.0 {
        return phi.clone();
    }
    let cum = cumulative_density(phi);
    apply_phase(phi, |j| rate * cum[j])
}

/// Speed closest to `c` for which `exp(-icx/2)` is periodic on the box.
pub fn nearest_admissible_speed(c: f64, half_length: f64) -> f64 {
    (c * half_length / (2.0 * PI)).round() * 2.0 * PI / half_length
}

pub fn speed_is_admissible(c: f64, half_length: f64) -> bool {
    let w = c * half_length / (2.0 * PI);
    (w - w.round()).abs() <= PERIODICITY_TOL
}

fn check_speed(c: f64, half_length: f64) -> Result<()> {
    if speed_is_admissible(c, half_length) {
        Ok(())
    } else {
        Err(Error::PhaseWrap { nearest_c: nearest_admissible_speed(c, half_length) })
    }
}

/// `phi = exp(-icx/2) psi`.
pub fn phase_rotate(psi: &Field, c: f64) -> Result<Field> {
    check_speed(c, psi.grid().half_length())?;
    let x = psi.grid().x();
    Ok(apply_phase(psi, |j| -0.5 * c * x[j]))
}

/// `psi = exp(icx/2) phi`.
pub fn phase_unrotate(phi: &Field, c: f64) -> Result<Field> {
    check_speed(c, phi.grid().half_length())?;
    let x = phi.grid().x();
    Ok(apply_phase(phi, |j| 0.5 * c * x[j]))
}

/// Pointwise `Im(psi' conj(psi))`; identically zero for real profiles.
pub fn current_density(psi: &Field) -> Vec<f64> {
    let d = psi.grid().derivative_raw(psi.values());
    d.iter().zip(psi.values()).map(|(a, b)| (a * b.conj()).im).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconstructionMode {
    /// Refuse speeds whose phase does not fit the box.
    Strict,
    /// Produce the field anyway on the same grid and flag it.
    Diagnostic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub field: Field,
    /// False when the total phase is not periodic on the box.
    pub periodic: bool,
    /// `|u(-L) - u(L^-) extrapolated|`: size of the wrap-around mismatch from the phase winding.
    pub boundary_jump: f64,
    /// Estimate of the density left outside the box, `rho(edge) * L`.
    pub tail_estimate: f64,
}

/// `u(x,t) = psi(x-ct) exp(i omega t - i c/2 (x-ct) + i (alpha+beta)/4 int_{-inf}^{x-ct} |psi|^2)`.
pub fn reconstruct_traveling_wave(
    psi: &Field,
    p: &PhysicalParams,
    t: f64,
    mode: ReconstructionMode,
) -> Result<Reconstruction> {
    let grid = psi.grid();
    let l = grid.half_length();
    let speed_ok = speed_is_admissible(p.c, l);
    if !speed_ok && mode == ReconstructionMode::Strict {
        return Err(Error::PhaseWrap { nearest_c: nearest_admissible_speed(p.c, l) });
    }
    let ct = p.c * t;
    let moved = if ct == 0.0 { psi.clone() } else { shift(psi, ct) };
    let cum = cumulative_density(&moved);
    let rate = (p.alpha + p.beta) / 4.0;
    let x = grid.x();
    let field = apply_phase(&moved, |j| p.omega * t - 0.5 * p.c * (x[j] - ct) + rate * cum[j]);

    let total = cum.last().copied().unwrap_or(0.0)
        + 0.5 * grid.dx() * (moved.values()[0].norm_sqr() + moved.values()[grid.n() - 1].norm_sqr());
    let winding = rate * total - 0.5 * p.c * 2.0 * l;
    let edge = moved.values()[0].norm();
    let boundary_jump = edge * (Complex64::from_polar(1.0, winding) - 1.0).norm();
    let winding_ok = ((winding / (2.0 * PI)) - (winding / (2.0 * PI)).round()).abs() <= PERIODICITY_TOL;
    let rho_edge = moved.values()[0].norm_sqr().max(moved.values()[grid.n() - 1].norm_sqr());
    Ok(Reconstruction { field, periodic: speed_ok && winding_ok, boundary_jump, tail_estimate: rho_edge * l })
}
