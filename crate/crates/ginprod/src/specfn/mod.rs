//! Special functions and quadrature primitives used by the rest of the crate:
//! error function, complex log-gamma, Gauss-Legendre rules and an adaptive
//! integrator over the unit interval.
//!
//! Everything here is a pure function of its inputs and safe to call
//! concurrently.

mod erf;
pub(crate) mod gamma;
mod quad;

pub use erf::{erf, erfc};
pub use gamma::ln_gamma_complex;
pub use quad::{gauss_legendre, integrate_unit, QuadratureRule};

/// Errors from the special-function and quadrature layer.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SpecFnError {
    #[error("quadrature order must be >= 1, got {0}")]
    InvalidOrder(usize),
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("log-gamma pole: {0} is a nonpositive integer")]
    GammaPole(f64),
    #[error(
        "adaptive integration did not converge: {panels} panels, \
         error estimate {estimate:e} > tol {tol:e}"
    )]
    NonConvergence {
        panels: usize,
        estimate: f64,
        tol: f64,
    },
}
