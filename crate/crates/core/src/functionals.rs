//! Action, Nehari and constraint functionals of the profile equation, their
//! discrete gradients, and the conserved quantities of the evolution.
//!
//! Everything here acts on the rotated profile `psi`, where the momentum term has
//! been absorbed into the frequency offset `nu = omega + c^2/4`.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PhysicalParams, ReducedParams};
use crate::spectral::Field;

/// The five integrals every functional is assembled from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Terms {
    /// `int |psi'|^2`
    pub kinetic: f64,
    /// `int |psi|^2`
    pub mass: f64,
    /// `int |psi|^4`
    pub quartic: f64,
    /// `int |psi|^6`
    pub sextic: f64,
    /// `int |psi|^2 |D|(|psi|^2)`, equivalently `int rho (H rho)'`
    pub nonlocal: f64,
}

impl Terms {
    pub fn of(psi: &Field) -> Terms {
        let g = psi.grid();
        let v = psi.values();
        let dpsi = g.derivative_raw(v);
        let rho: Vec<Complex64> = v.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        let drho = g.abs_derivative_raw(&rho);
        let dx = g.dx();
        let mut t = Terms::default();
        for j in 0..v.len() {
            let r = rho[j].re;
            t.kinetic += dpsi[j].norm_sqr();
            t.mass += r;
            t.quartic += r * r;
            t.sextic += r * r * r;
            t.nonlocal += r * drho[j].re;
        }
        t.kinetic *= dx;
        t.mass *= dx;
        t.quartic *= dx;
        t.sextic *= dx;
        t.nonlocal *= dx;
        t
    }

    pub fn action(&self, r: &ReducedParams) -> f64 {
        0.5 * self.kinetic - 0.5 * r.frequency * self.mass
            + r.cubic / 4.0 * self.quartic
            + r.quintic / 6.0 * self.sextic
            + r.nonlocal / 4.0 * self.nonlocal
    }

    pub fn nehari(&self, r: &ReducedParams) -> f64 {
        self.kinetic - r.frequency * self.mass
            + r.cubic * self.quartic
            + r.quintic * self.sextic
            + r.nonlocal * self.nonlocal
    }

    pub fn nehari_quadratic(&self, r: &ReducedParams, convention: NehariConvention) -> f64 {
        let base = self.kinetic - r.frequency * self.mass;
        match convention {
            NehariConvention::Subcritical => base,
            NehariConvention::Critical => base + r.cubic * self.quartic,
        }
    }

    pub fn mountain(&self, r: &ReducedParams, convention: NehariConvention) -> f64 {
        match convention {
            NehariConvention::Subcritical => {
                0.25 * (self.kinetic - r.frequency * self.mass - r.quintic / 3.0 * self.sextic)
            }
            NehariConvention::Critical => {
                (self.kinetic - r.frequency * self.mass
                    + r.cubic / 4.0 * self.quartic
                    + r.nonlocal / 4.0 * self.nonlocal)
                    / 3.0
            }
        }
    }

    pub fn meanflow(&self, weights: MeanFlowWeights) -> f64 {
        0.25 * (weights.nonlocal_sq() * self.nonlocal + weights.quartic_sq() * self.quartic)
    }
}

/// Which quadratic part the Nehari functional splits off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NehariConvention {
    /// `KQ = int |psi'|^2 - nu |psi|^2`
    Subcritical,
    /// `KQ` additionally carries `A int |psi|^4`
    Critical,
}

/// Weights `(alpha1, alpha2)` of the mean-flow constraint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanFlowWeights {
    pub alpha1: f64,
    pub alpha2: f64,
}

impl MeanFlowWeights {
    pub fn new(alpha1: f64, alpha2: f64) -> Result<MeanFlowWeights> {
        if alpha1 * alpha1 + alpha2 * alpha2 == 0.0 {
            return Err(Error::Precondition("mean-flow weights cannot both vanish".into()));
        }
        Ok(MeanFlowWeights { alpha1, alpha2 })
    }

    fn nonlocal_sq(&self) -> f64 {
        self.alpha1 * self.alpha1
    }

    fn quartic_sq(&self) -> f64 {
        self.alpha2 * self.alpha2
    }
}

pub fn action_e(psi: &Field, r: &ReducedParams) -> f64 {
    Terms::of(psi).action(r)
}

/// `(K, KQ, KN)` with `K = KQ - KN`.
pub fn nehari_k(psi: &Field, r: &ReducedParams, convention: NehariConvention) -> (f64, f64, f64) {
    let t = Terms::of(psi);
    let k = t.nehari(r);
    let kq = t.nehari_quadratic(r, convention);
    (k, kq, kq - k)
}

pub fn mountain_w(psi: &Field, r: &ReducedParams, convention: NehariConvention) -> f64 {
    Terms::of(psi).mountain(r, convention)
}

pub fn q_meanflow(psi: &Field, alpha1: f64, alpha2: f64) -> Result<f64> {
    let w = MeanFlowWeights::new(alpha1, alpha2)?;
    Ok(Terms::of(psi).meanflow(w))
}

pub fn q_quartic(psi: &Field) -> f64 {
    let dx = psi.grid().dx();
    0.25 * dx * psi.values().iter().map(|z| z.norm_sqr() * z.norm_sqr()).sum::<f64>()
}

/// Action with the phase still in place:
/// `int 1/2 |phi'|^2 - omega/2 |phi|^2 + c/2 Im(conj(phi) phi') + A/4 |phi|^4 + B/6 |phi|^6 + gamma/4 rho |D| rho`.
/// Agrees with [`action_e`] of the unrotated profile when `nu = omega + c^2/4`.
pub fn action_e_rotated(phi: &Field, r: &ReducedParams, omega: f64, c: f64) -> f64 {
    let g = phi.grid();
    let v = phi.values();
    let dphi = g.derivative_raw(v);
    let dx = g.dx();
    let mut quad = 0.0;
    for j in 0..v.len() {
        quad += 0.5 * dphi[j].norm_sqr() - 0.5 * omega * v[j].norm_sqr() + 0.5 * c * (v[j].conj() * dphi[j]).im;
    }
    let t = Terms::of(phi);
    quad * dx + r.cubic / 4.0 * t.quartic + r.quintic / 6.0 * t.sextic + r.nonlocal / 4.0 * t.nonlocal
}

/// Linear combination `kin*(-psi'') + mass*psi + P[quartic*|psi|^2 psi + sextic*|psi|^4 psi + nonlocal*psi |D| rho]`
/// with `P` the dealiasing projection.
pub(crate) fn combined_gradient(psi: &Field, coef: [f64; 5]) -> Field {
    let [kin, mass, quartic, sextic, nonlocal] = coef;
    let g = psi.grid();
    let v = psi.values();
    let n = v.len();
    let mut out = if kin != 0.0 {
        let mut lap = g.neg_laplacian_raw(v);
        for z in lap.iter_mut() {
            *z *= kin;
        }
        lap
    } else {
        vec![Complex64::new(0.0, 0.0); n]
    };
    if mass != 0.0 {
        for (o, z) in out.iter_mut().zip(v) {
            *o += z * mass;
        }
    }
    if quartic != 0.0 || sextic != 0.0 || nonlocal != 0.0 {
        let rho: Vec<Complex64> = v.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
        let drho = if nonlocal != 0.0 { Some(g.abs_derivative_raw(&rho)) } else { None };
        let nl: Vec<Complex64> = (0..n)
            .map(|j| {
                let r = rho[j].re;
                let mut f = quartic * r + sextic * r * r;
                if let Some(d) = &drho {
                    f += nonlocal * d[j].re;
                }
                v[j] * f
            })
            .collect();
        let nl = g.dealias_raw(&nl);
        for (o, z) in out.iter_mut().zip(nl) {
            *o += z;
        }
    }
    Field::from_parts(g.clone(), out)
}

/// `-psi'' - nu psi + A|psi|^2 psi + B|psi|^4 psi + gamma psi |D|(|psi|^2)`; zero exactly at solutions.
pub fn grad_e(psi: &Field, r: &ReducedParams) -> Field {
    combined_gradient(psi, [1.0, -r.frequency, r.cubic, r.quintic, r.nonlocal])
}

pub fn grad_k(psi: &Field, r: &ReducedParams) -> Field {
    combined_gradient(psi, [2.0, -2.0 * r.frequency, 4.0 * r.cubic, 6.0 * r.quintic, 4.0 * r.nonlocal])
}

pub fn grad_q_meanflow(psi: &Field, weights: MeanFlowWeights) -> Field {
    combined_gradient(psi, [0.0, 0.0, weights.quartic_sq(), 0.0, weights.nonlocal_sq()])
}

pub fn grad_q_quartic(psi: &Field) -> Field {
    combined_gradient(psi, [0.0, 0.0, 1.0, 0.0, 0.0])
}

/// Gradient of the mountain functional in either convention.
pub fn grad_w(psi: &Field, r: &ReducedParams, convention: NehariConvention) -> Field {
    match convention {
        NehariConvention::Subcritical => combined_gradient(psi, [0.5, -0.5 * r.frequency, 0.0, -0.5 * r.quintic, 0.0]),
        NehariConvention::Critical => {
            combined_gradient(psi, [2.0 / 3.0, -2.0 / 3.0 * r.frequency, r.cubic / 3.0, 0.0, r.nonlocal / 3.0])
        }
    }
}

/// Mass, momentum and action of an evolution snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conserved {
    #[serde(rename = "M")]
    pub mass: f64,
    #[serde(rename = "P")]
    pub momentum: f64,
    #[serde(rename = "Eaction")]
    pub action: f64,
}

/// Evaluated without dealiasing.
pub fn conserved_quantities(u: &Field, p: &PhysicalParams) -> Conserved {
    let g = u.grid();
    let v = u.values();
    let ux = g.derivative_raw(v);
    let rho: Vec<Complex64> = v.iter().map(|z| Complex64::new(z.norm_sqr(), 0.0)).collect();
    let drho = g.abs_derivative_raw(&rho);
    let s = p.alpha + p.beta;
    let (mut m, mut mom, mut act) = (0.0, 0.0, 0.0);
    for j in 0..v.len() {
        let r = rho[j].re;
        let current = (ux[j] * v[j].conj()).im;
        m += r;
        mom += current - 0.5 * p.beta * r * r;
        act += ux[j].norm_sqr() - 0.5 * p.b * r * r + p.beta * s / 6.0 * r * r * r - 0.5 * s * r * current
            + 0.5 * p.gamma * r * drho[j].re;
    }
    let dx = g.dx();
    Conserved { mass: 0.5 * m * dx, momentum: mom * dx, action: act * dx }
}

/// Fixed-key summary of all functionals at one profile. Entries that do not apply are `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    #[serde(rename = "E")]
    pub action: f64,
    #[serde(rename = "K")]
    pub nehari: f64,
    #[serde(rename = "KQ")]
    pub nehari_quadratic: f64,
    #[serde(rename = "KN")]
    pub nehari_nonlinear: f64,
    #[serde(rename = "W")]
    pub mountain: f64,
    #[serde(rename = "Q_meanflow")]
    pub q_meanflow: Option<f64>,
    #[serde(rename = "Q_quartic")]
    pub q_quartic: f64,
    #[serde(rename = "M")]
    pub mass: Option<f64>,
    #[serde(rename = "P")]
    pub momentum: Option<f64>,
    #[serde(rename = "Eaction")]
    pub evolution_action: Option<f64>,
    pub convention: NehariConvention,
    pub terms: Terms,
}

impl FunctionalReport {
    pub fn evaluate(
        psi: &Field,
        r: &ReducedParams,
        convention: NehariConvention,
        weights: Option<MeanFlowWeights>,
    ) -> FunctionalReport {
        let t = Terms::of(psi);
        let k = t.nehari(r);
        let kq = t.nehari_quadratic(r, convention);
        FunctionalReport {
            action: t.action(r),
            nehari: k,
            nehari_quadratic: kq,
            nehari_nonlinear: kq - k,
            mountain: t.mountain(r, convention),
            q_meanflow: weights.map(|w| t.meanflow(w)),
            q_quartic: 0.25 * t.quartic,
            mass: None,
            momentum: None,
            evolution_action: None,
            convention,
            terms: t,
        }
    }

    /// Fills `M`, `P`, `Eaction` from a full wave snapshot.
    pub fn with_conserved(mut self, u: &Field, p: &PhysicalParams) -> FunctionalReport {
        let c = conserved_quantities(u, p);
        self.mass = Some(c.mass);
        self.momentum = Some(c.momentum);
        self.evolution_action = Some(c.action);
        self
    }
}

/// The two steps bounding the sextic term for localized profiles:
/// `int |psi|^6 <= |psi|_inf^2 |psi|_4^4 <= (3/2)^(2/3) |psi'|_2^(2/3) |psi|_4^(16/3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SexticChain {
    pub sextic: f64,
    pub sup_times_quartic: f64,
    pub interpolation: f64,
}

impl SexticChain {
    pub fn first_step_holds(&self) -> bool {
        self.sextic <= self.sup_times_quartic * (1.0 + 1e-12)
    }

    pub fn second_step_holds(&self, slack: f64) -> bool {
        self.sup_times_quartic <= self.interpolation * (1.0 + slack)
    }
}

pub fn sextic_bound_chain(psi: &Field) -> SexticChain {
    let t = Terms::of(psi);
    let sup = psi.max_abs();
    let l4 = t.quartic.powf(0.25);
    SexticChain {
        sextic: t.sextic,
        sup_times_quartic: sup * sup * t.quartic,
        interpolation: 1.5f64.powf(2.0 / 3.0) * t.kinetic.powf(1.0 / 3.0) * l4.powf(16.0 / 3.0),
    }
}
