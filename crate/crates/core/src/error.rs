use thiserror::Error;

use crate::evolve::EvolutionTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("fractional order must be non-negative, got {0}")]
    NegativeOrder(f64),
    #[error("phase e^(-icx/2) is not periodic on the box; nearest admissible speed is c = {nearest_c}")]
    PhaseWrap { nearest_c: f64 },
    #[error("no scaling lambda with K(lambda psi) <= 0 found for the initial guess")]
    InfeasibleStart,
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("profile is not localized: its smallest modulus is {floor_ratio:.3} of the peak")]
    NotLocalized { floor_ratio: f64 },
    #[error("constraint value underflowed; cannot rescale onto the constraint set")]
    DegenerateConstraint,
    #[error("no iterate with negative energy was found")]
    PositiveEnergyStall,
    #[error("stabilizing factor {factor:.3e} left [1e-6, 1e6] at iteration {iteration}")]
    DivergentFactor { factor: f64, iteration: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("non-finite values at t = {time}")]
    NonFinite { time: f64, partial: Box<EvolutionTrace> },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
