//! Lipschitz-Killing curvature measures of stratified sets, computed both from
//! curvature and normal Morse indices and from the volumes of polar images of
//! generic projections, with seeded Monte-Carlo estimates.

pub mod error;
pub mod geomkit;
pub mod plstrata;
pub mod lkmeasure;
pub mod smoothshape;
pub mod polar;
pub mod germ;

pub use error::{Error, Result};
pub use geomkit::{Estimate, RandomSource};
