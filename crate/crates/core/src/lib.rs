//! Spectrum of the Laplacian of an `n`-cycle with one edge of weight `alpha`,
//! and of the corner-perturbed tridiagonal Toeplitz matrix it belongs to.
//!
//! Odd-index eigenvalues are explicit; even-index ones are `2 - 2cos(theta)`
//! where `theta` solves `n x - (j-1) pi = eta_alpha(x)`. The crate solves that
//! equation at arbitrary MPFR precision with certified error bounds.

pub mod asymptotics;
pub mod charpoly;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod solvers;
pub mod spectrum;
pub mod symbolfns;

pub use error::{Error, Result};
pub use numerics::{Angle, Cplx, PrecisionContext, EXPERIMENT_BITS};
pub use symbolfns::AlphaParam;
