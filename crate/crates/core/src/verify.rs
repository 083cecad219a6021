//! Exact algebraic solutions, Euler-Lagrange residuals, integral identities and the
//! sign screen for parameter regimes without nontrivial solutions.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{grad_e, Terms};
use crate::params::ReducedParams;
use crate::spectral::{line_hilbert, Field, Grid};

/// Algebraic profile `sqrt(2a/-gamma) / sqrt(a^2 + (x-x0)^2)` solving the profile
/// equation with `nu = A = 0` and `B = gamma^2/4`.
pub fn exact_solution(grid: &Arc<Grid>, a: f64, x0: f64, gamma: f64) -> Result<(Field, ReducedParams)> {
    if !(a > 0.0) {
        return Err(Error::Precondition(format!("width parameter must be positive, got {a}")));
    }
    if !(gamma < 0.0) {
        return Err(Error::Precondition(format!("nonlocal coefficient must be negative, got {gamma}")));
    }
    let amp = (2.0 * a / -gamma).sqrt();
    let psi = Field::from_fn(grid.clone(), |x| amp / (a * a + (x - x0) * (x - x0)).sqrt())?;
    let r = ReducedParams { cubic: 0.0, quintic: gamma * gamma / 4.0, current: 0.0, frequency: 0.0, nonlocal: gamma };
    Ok((psi, r))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    /// `|| -psi'' - nu psi + ... ||_2`
    pub raw: f64,
    /// `raw / sqrt(int |psi'|^2 + |psi|^2)`
    pub normalized: f64,
}

pub fn el_residual(psi: &Field, r: &ReducedParams) -> Residual {
    let raw = grad_e(psi, r).norm_l2();
    let t = Terms::of(psi);
    let scale = (t.kinetic + t.mass).sqrt();
    let normalized = if scale > 0.0 { raw / scale } else { 0.0 };
    Residual { raw, normalized }
}

/// Outcome of the sign screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Screen {
    /// `B >= 0, A >= 0, gamma > 0`
    BlockedCase1,
    /// `B <= 0, A <= 0, nu >= 0`
    BlockedCase2,
    Admissible,
}

impl Screen {
    pub fn is_blocked(self) -> bool {
        self != Screen::Admissible
    }
}

pub fn nonexistence_screen(r: &ReducedParams) -> Screen {
    let (a, b, g) = (r.cubic, r.quintic, r.nonlocal);
    if b >= 0.0 && a >= 0.0 && g > 0.0 {
        Screen::BlockedCase1
    } else if b <= 0.0 && a <= 0.0 && r.frequency_nonnegative() {
        Screen::BlockedCase2
    } else {
        Screen::Admissible
    }
}

/// `|K(psi)|`.
pub fn nehari_zero_check(psi: &Field, r: &ReducedParams) -> f64 {
    Terms::of(psi).nehari(r).abs()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Identity {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs - rhs|`
    pub residual: f64,
    /// `residual` divided by the sum of the absolute values of all terms.
    pub relative: f64,
}

impl Identity {
    fn new(lhs: f64, rhs: f64, scale: f64) -> Identity {
        let residual = (lhs - rhs).abs();
        Identity { lhs, rhs, residual, relative: if scale > 0.0 { residual / scale } else { 0.0 } }
    }
}

/// Sign bookkeeping behind the nonexistence screen. Combining both identities gives
/// `int |psi'|^2 = case1_value = case2_value`, while the sign patterns force the
/// respective value to be non-positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Obstruction {
    pub screen: Screen,
    /// `-gamma/2 int rho |D| rho - A/4 int |psi|^4 - B/3 int |psi|^6`
    pub case1_value: f64,
    /// `-nu int |psi|^2 + A/2 int |psi|^4 + B/3 int |psi|^6`
    pub case2_value: f64,
    pub kinetic: f64,
    /// True when a blocked regime meets a nonzero profile satisfying both identities.
    pub contradiction: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    /// `max |x psi|` over the outer 10% of the box
    pub max_x_psi: f64,
    /// `max |x psi'|` over the outer 10% of the box
    pub max_x_dpsi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    /// Pairing with `psi`: `int |psi'|^2 = nu int psi^2 - A int psi^4 - B int psi^6 - gamma int rho (H rho)'`.
    pub identity1: Identity,
    /// Pairing with `x psi'`: `int |psi'|^2 + nu int psi^2 - A/2 int psi^4 - B/3 int psi^6 + gamma X = 0`,
    /// where `X` is the periodic cross term.
    pub identity2: Identity,
    /// `int x rho' H(rho')` with the line Hilbert transform; zero for any decaying profile.
    pub cross_term: f64,
    /// Same integral with the periodic Hilbert transform and the sawtooth weight.
    pub cross_term_periodic: f64,
    /// `cross_term_periodic - cross_term`: what the box boundary adds.
    pub boundary_contribution: f64,
    /// Share of the identity integrands carried by the outer 10% of the box.
    pub tail_fraction: f64,
    pub decay: Decay,
    pub obstruction: Obstruction,
}

impl PohozaevReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.identity1.relative <= tol && self.identity2.relative <= tol
    }
}

fn outer_band(n: usize) -> impl Fn(usize) -> bool {
    let band = (n / 20).max(1);
    move |j| j < band || j >= n - band
}

/// Identity threshold used when deciding whether a profile "satisfies" both identities.
const CLAIM_TOL: f64 = 1e-2;

pub fn pohozaev_check(psi: &Field, r: &ReducedParams) -> PohozaevReport {
    let g = psi.grid();
    let n = g.n();
    let x = g.x();
    let dx = g.dx();
    let t = Terms::of(psi);
    let (nu, a, b, gm) = (r.frequency, r.cubic, r.quintic, r.nonlocal);

    let rho: Vec<Complex64> = psi.values().iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
    let drho = g.derivative_raw(&rho);
    let abs_d_rho = g.abs_derivative_raw(&rho);
    let h_drho = line_hilbert(&Field::from_parts(g.clone(), drho.clone()));
    let mut cross = 0.0;
    let mut cross_periodic = 0.0;
    for j in 0..n {
        cross += x[j] * drho[j].re * h_drho.values()[j].re;
        cross_periodic += x[j] * drho[j].re * abs_d_rho[j].re;
    }
    cross *= dx;
    cross_periodic *= dx;

    let scale1 =
        t.kinetic + (nu * t.mass).abs() + (a * t.quartic).abs() + (b * t.sextic).abs() + (gm * t.nonlocal).abs();
    let identity1 = Identity::new(t.kinetic, nu * t.mass - a * t.quartic - b * t.sextic - gm * t.nonlocal, scale1);
    let parts2 = [t.kinetic, nu * t.mass, -a / 2.0 * t.quartic, -b / 3.0 * t.sextic, gm * cross_periodic];
    let scale2: f64 = parts2.iter().map(|v| v.abs()).sum();
    let identity2 = Identity::new(parts2.iter().sum(), 0.0, scale2);

    let dpsi = g.derivative_raw(psi.values());
    let outer = outer_band(n);
    let mut tail = 0.0;
    let mut total = 0.0;
    let mut decay = Decay { max_x_psi: 0.0, max_x_dpsi: 0.0 };
    for j in 0..n {
        let r2 = rho[j].re;
        let w = dpsi[j].norm_sqr() + nu.abs() * r2 + a.abs() * r2 * r2 + b.abs() * r2 * r2 * r2;
        total += w;
        if outer(j) {
            tail += w;
            decay.max_x_psi = decay.max_x_psi.max((x[j] * psi.values()[j]).norm());
            decay.max_x_dpsi = decay.max_x_dpsi.max((x[j] * dpsi[j]).norm());
        }
    }
    let tail_fraction = if total > 0.0 { tail / total } else { 0.0 };

    let screen = nonexistence_screen(r);
    let case1_value = -gm / 2.0 * t.nonlocal - a / 4.0 * t.quartic - b / 3.0 * t.sextic;
    let case2_value = -nu * t.mass + a / 2.0 * t.quartic + b / 3.0 * t.sextic;
    let claims_both = identity1.relative <= CLAIM_TOL && identity2.relative <= CLAIM_TOL;
    let nonzero = t.kinetic > 1e-12 * (t.mass + 1.0);
    let obstruction = Obstruction {
        screen,
        case1_value,
        case2_value,
        kinetic: t.kinetic,
        contradiction: screen.is_blocked() && claims_both && nonzero,
    };

    PohozaevReport {
        identity1,
        identity2,
        cross_term: cross,
        cross_term_periodic: cross_periodic,
        boundary_contribution: cross_periodic - cross,
        tail_fraction,
        decay,
        obstruction,
    }
}
