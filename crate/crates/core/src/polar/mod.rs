//! Polar images of generic projections and the polar lengths `L_q`.

mod checks;
mod crofton;
mod fold;
mod length;
mod pl;
mod sample;
mod slice;
mod smooth;
mod types;

pub use checks::check_genericity;
pub use crofton::{crofton_volume, image_simplices};
pub use length::{polar_constant, polar_length, PlaneRecord, PolarLength};
pub use pl::{pl_alpha, pl_rank_report};
pub use sample::{alpha_index, polar_image_integral, polar_sample, polar_variety};
pub use types::{
    AlphaMode, DegeneracyFlag, DegeneracyKind, DegeneracyReport, PieceKind, PolarOptions, PolarPiece, PolarSample,
};
