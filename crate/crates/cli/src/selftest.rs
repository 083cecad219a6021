//! `selftest`: quick end-to-end checks on small grids.

use solwave_core::evolve::traveling_wave_test;
use solwave_core::groundstate::solve_nehari_subcritical;
use solwave_core::spectral::hilbert;
use solwave_core::verify::{el_residual, exact_solution};
use solwave_core::{make_grid, EvolveConfig, Field, PhysicalParams, ReducedParams, SolveConfig};

use crate::exit::{CliError, FAILURE};

type Check = (&'static str, fn() -> Result<f64, CliError>, f64);

fn hilbert_of_cosine() -> Result<f64, CliError> {
    let g = make_grid(64, std::f64::consts::PI)?;
    let f = Field::from_fn(g.clone(), |x| (3.0 * x).cos())?;
    let want = Field::from_fn(g, |x| (3.0 * x).sin())?;
    Ok(hilbert(&f).sub(&want)?.max_abs())
}

fn cubic_ground_state() -> Result<f64, CliError> {
    let cfg = SolveConfig { n: 512, half_length: 32.0, ..SolveConfig::default() };
    let gs = solve_nehari_subcritical(&ReducedParams::new(-1.0, -2.0, 0.0, 0.0), &cfg)?;
    let x = gs.psi.grid().x();
    Ok(gs.psi.values().iter().zip(x).fold(0.0, |m, (v, &x)| m.max((v.re - 1.0 / x.cosh()).abs())))
}

fn exact_residual() -> Result<f64, CliError> {
    let g = make_grid(4096, 64.0 * std::f64::consts::PI)?;
    let (psi, r) = exact_solution(&g, 1.0, 0.0, -1.0)?;
    Ok(el_residual(&psi, &r).normalized)
}

fn soliton_drift() -> Result<f64, CliError> {
    let g = make_grid(256, 8.0 * std::f64::consts::PI)?;
    let psi = Field::from_fn(g, |x| 1.0 / x.cosh())?;
    let p = PhysicalParams { b: 2.0, omega: -1.25, c: 1.0, ..Default::default() };
    let trace = traveling_wave_test(&psi, &EvolveConfig { stride: 100, ..EvolveConfig::new(p, 1.0) })?;
    Ok(trace.final_drift())
}

pub fn run() -> Result<(), CliError> {
    let checks: [Check; 4] = [
        ("hilbert-cosine", hilbert_of_cosine, 1e-12),
        ("cubic-ground-state", cubic_ground_state, 1e-6),
        ("exact-residual", exact_residual, 5e-3),
        ("soliton-drift", soliton_drift, 1e-4),
    ];
    let mut failed = 0;
    for (name, check, tol) in checks {
        match check() {
            Ok(v) if v <= tol => println!("PASS {name} {v:.3e} <= {tol:.0e}"),
            Ok(v) => {
                failed += 1;
                println!("FAIL {name} {v:.3e} > {tol:.0e}");
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {name} {e}");
            }
        }
    }
    if failed > 0 {
        return Err(CliError::new(FAILURE, format!("{failed} self-test check(s) failed")));
    }
    Ok(())
}
