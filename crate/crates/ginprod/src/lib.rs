//! Real-eigenvalue statistics of products of real Ginibre matrices.
//!
//! A product of m independent real Gaussian matrices of size N has a random
//! number of real eigenvalues. In the critical regime m = αN this crate
//! computes their statistics three independent ways and cross-checks them:
//!
//! * [`theory`]: closed-form limiting quantities: the real-eigenvalue
//!   fraction c(α), the variance integral s(α), the variance-to-mean ratio
//!   r(α) = 2 − 2s/c, and the limiting rescaled density.
//! * [`exact`]: exact finite-size sums built from the coefficients b_{j,k},
//!   each evaluated by contour quadrature of a gamma-ratio integrand:
//!   expected count, variance, and spectral moments at any (N, m).
//! * [`ginibre`]: Monte Carlo: sample the factor matrices, compute real
//!   spectra through a cyclic Schur reduction of the factor sequence, and
//!   rescale eigenvalues to λ = sign(x)·|x|^(1/m).
//!
//! [`stats`] aggregates simulation output for comparison against the other
//! two routes, and [`specfn`] holds the supporting special functions and
//! quadrature.

pub mod exact;
pub mod ginibre;
pub mod specfn;
pub mod stats;
pub mod theory;
