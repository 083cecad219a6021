//! Stabilized fixed-point iteration `psi <- S^sigma L^{-1} N(psi)` with
//! `L = -d^2 - nu` and `N(psi) = -A psi^3 - B psi^5 - gamma psi |D| rho`.

use rustfft::num_complex::Complex64;

use super::{
    center_and_symmetrize, descent::centering_shift, ensure_localized, real_field, Derived, GroundState, Problem,
    SolveConfig,
};
use crate::error::{Error, Result};
use crate::functionals::{combined_gradient, FunctionalReport, NehariConvention};
use crate::params::{classify, ReducedParams};
use crate::verify::el_residual;

const FACTOR_RANGE: (f64, f64) = (1e-6, 1e6);

pub fn petviashvili_solve(r: &ReducedParams, cfg: &SolveConfig) -> Result<GroundState> {
    cfg.validate()?;
    if !r.frequency_negative() {
        return Err(Error::Precondition(format!(
            "fixed-point iteration needs nu < 0 so that -d^2 - nu is invertible, got nu = {}",
            r.frequency
        )));
    }
    let grid = cfg.grid()?;
    let mut psi = cfg.initial_profile(&grid)?;
    let by = centering_shift(&psi);
    psi.rotate_right(by);
    let nu = r.frequency;
    let dx = grid.dx();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * dx;
    let mut history = Vec::new();

    for it in 0..cfg.max_iters {
        let f = real_field(&grid, psi.clone());
        let cubic: Vec<f64> = re(combined_gradient(&f, [0.0, 0.0, -r.cubic, 0.0, -r.nonlocal]));
        let quintic: Vec<f64> = re(combined_gradient(&f, [0.0, 0.0, 0.0, -r.quintic, 0.0]));
        let lin: Vec<f64> = re(combined_gradient(&f, [1.0, -nu, 0.0, 0.0, 0.0]));
        let c3 = dot(&psi, &cubic);
        let c5 = dot(&psi, &quintic);
        let denom = c3 + c5;
        let numer = dot(&psi, &lin);
        let factor = numer / denom;
        history.push(factor);
        if !(factor.is_finite() && factor >= FACTOR_RANGE.0 && factor <= FACTOR_RANGE.1) {
            return Err(Error::DivergentFactor { factor, iteration: it });
        }

        let residual_raw = {
            let res: Vec<f64> = lin.iter().zip(&cubic).zip(&quintic).map(|((l, a), b)| l - a - b).collect();
            dot(&res, &res).sqrt()
        };
        let t = crate::functionals::Terms::of(&f);
        let residual = residual_raw / (t.kinetic + t.mass).sqrt();
        if residual <= cfg.tol_residual {
            return finish(r, psi, &grid, it, history);
        }

        let weight3 = c3.abs();
        let weight5 = c5.abs();
        let degree = (3.0 * weight3 + 5.0 * weight5) / (weight3 + weight5);
        let sigma = degree / (degree - 1.0);
        let s = factor.powf(sigma);
        let rhs: Vec<Complex64> = cubic.iter().zip(&quintic).map(|(a, b)| Complex64::new(a + b, 0.0)).collect();
        let solved = grid.multiply(&rhs, |_, k| Complex64::new(1.0 / (k * k - nu), 0.0));
        psi = solved.into_iter().map(|z| s * z.re).collect();
        let by = centering_shift(&psi);
        psi.rotate_right(by);
    }
    let f = real_field(&grid, psi);
    Err(Error::NoConvergence { iterations: cfg.max_iters, residual: el_residual(&f, r).normalized })
}

fn re(f: crate::spectral::Field) -> Vec<f64> {
    f.into_values().into_iter().map(|z| z.re).collect()
}

fn finish(
    r: &ReducedParams,
    psi: Vec<f64>,
    grid: &std::sync::Arc<crate::spectral::Grid>,
    iterations: usize,
    history: Vec<f64>,
) -> Result<GroundState> {
    let arranged = center_and_symmetrize(grid, &psi);
    let candidate = real_field(grid, arranged);
    let peak = psi.iter().fold(0.0f64, |m, &v| if v.abs() > m.abs() { v } else { m });
    let sign = if peak < 0.0 { -1.0 } else { 1.0 };
    let plain = real_field(grid, psi.iter().map(|v| sign * v).collect());
    // keep the symmetrized profile unless it is worse than the iterate itself
    let psi = if el_residual(&candidate, r).normalized <= el_residual(&plain, r).normalized * 1.0001 {
        candidate
    } else {
        plain
    };
    ensure_localized(&psi.re())?;
    let residual = el_residual(&psi, r);
    let report = FunctionalReport::evaluate(&psi, r, NehariConvention::Subcritical, None);
    Ok(GroundState {
        report,
        multiplier: 0.0,
        residual,
        iterations,
        regime: classify(r).primary(),
        derived: Derived::default(),
        target: *r,
        input: *r,
        level: None,
        weights: None,
        history,
        psi,
        problem: Problem::Petviashvili,
    })
}
