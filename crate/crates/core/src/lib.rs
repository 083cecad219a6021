//! Pseudo-spectral computation, verification and time evolution of solitary waves
//! for a nonlocal derivative nonlinear Schrödinger equation.
//!
//! The line is truncated to a periodic box. Profiles are computed as minimizers of
//! the action on a Nehari set or at a fixed constraint level, checked against exact
//! solutions and integral identities, and evolved with an integrating-factor RK4 scheme.

pub mod error;
pub mod evolve;
pub mod functionals;
pub mod gauge;
pub mod groundstate;
pub mod io;
pub mod params;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use evolve::{EvolutionTrace, EvolveConfig, Integrator};
pub use functionals::{FunctionalReport, MeanFlowWeights, NehariConvention, Terms};
pub use gauge::{GaugeContext, ReconstructionMode};
pub use groundstate::{GroundState, GroundStateSummary, InitialGuess, Problem, SolveConfig};
pub use params::{classify, reduce, PhysicalParams, ReducedParams, Regime, RegimeTag};
pub use rustfft::num_complex::Complex64;
pub use spectral::{make_grid, Field, Grid};
pub use verify::{PohozaevReport, Residual, Screen};
