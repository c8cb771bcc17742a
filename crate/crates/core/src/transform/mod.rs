//! Contour-quadrature checks of the integral transforms behind the
//! reciprocity formula.

pub mod lemmas;
pub mod quadrature;

pub use lemmas::*;
pub use quadrature::{
    circle_integral, decay_exponent, line_integral, vertical_line_integral, ContourSpec, Decay, Integral, IntegrandId,
    IntegrandParams, LowerTail,
};
