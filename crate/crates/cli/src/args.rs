//! Argument groups shared by several subcommands.

use clap::Args;

use crate::layers::Layers;

/// Equation parameters and direct overrides of the reduced coefficients.
#[derive(Args, Clone, Debug, Default)]
pub struct ParamArgs {
    /// Cubic coefficient of the evolution equation.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Coefficient of |u|^2 u_x.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Coefficient of u^2 conj(u)_x.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Nonlocal mean-flow coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Traveling-wave frequency.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
    /// Traveling-wave speed.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Override of nu = omega + c^2/4.
    #[arg(long, allow_negative_numbers = true)]
    pub nu: Option<f64>,
    /// Override of the reduced cubic coefficient.
    #[arg(long = "A", allow_negative_numbers = true)]
    pub cubic: Option<f64>,
    /// Override of the reduced quintic coefficient.
    #[arg(long = "B", allow_negative_numbers = true)]
    pub quintic: Option<f64>,
}

impl ParamArgs {
    pub fn apply(&self, l: &mut Layers) {
        l.flag("b", &self.b);
        l.flag("alpha", &self.alpha);
        l.flag("beta", &self.beta);
        l.flag("gamma", &self.gamma);
        l.flag("omega", &self.omega);
        l.flag("c", &self.c);
        l.flag("nu", &self.nu);
        l.flag("A", &self.cubic);
        l.flag("B", &self.quintic);
    }
}

#[derive(Args, Clone, Debug, Default)]
pub struct GridArgs {
    /// Number of grid points (even) [default: 16384].
    #[arg(long)]
    pub n: Option<usize>,
    /// Half-length of the periodic box [-L, L) [default: 128 pi].
    #[arg(long = "L")]
    pub half_length: Option<f64>,
}

impl GridArgs {
    pub fn apply(&self, l: &mut Layers) {
        l.flag("n", &self.n);
        l.flag("L", &self.half_length);
    }
}
