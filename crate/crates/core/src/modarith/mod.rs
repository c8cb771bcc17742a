//! Exact modular arithmetic: reduced phases, inverses, additive
//! reciprocity and Dirichlet characters modulo odd primes.

pub mod character;
pub mod phase;

pub use character::{characters, gauss_orthogonality_residual, gauss_sum, primitive_root, DirichletCharacter};
pub use phase::{additive_reciprocity_check, is_odd_prime, is_prime, mod_inverse, reduce_phase, ReducedPhase};
