//! Special functions: complex arithmetic, Gamma, incomplete Gamma and the
//! Stirling expansion.

pub mod complex;
pub mod gamma;
pub mod incomplete;
pub mod stirling;

pub use complex::ApComplex;
pub use gamma::{gamma, gamma_ratio};
pub use incomplete::{upper_incomplete_gamma, IncompleteGamma};
pub use stirling::{stirling_approx, stirling_coefficients};
