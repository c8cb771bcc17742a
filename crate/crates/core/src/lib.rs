pub mod cli;
pub mod error;
pub mod hecke;
pub mod lfun;
pub mod modarith;
pub mod reciprocity;
pub mod special;
pub mod transform;

pub use error::{Error, Result};
pub use hecke::{build_form, HeckeEigenform};
pub use special::ApComplex;
