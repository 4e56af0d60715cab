//! Constants, frames, random streams and estimates shared by all estimators.

pub mod constants;
pub mod estimate;
pub mod frame;
pub mod random;

pub use constants::{ball_volume, beta_coeff, sphere_volume};
pub use estimate::{compensated_sum, map_samples, Estimate};
pub use frame::{AffineFlat, LinearSubspace};
pub use random::{
    sample_affine_flats_hitting_ball, sample_grassmannian, sample_unit_in, sample_unit_sphere,
    standard_normal_vector, RandomSource,
};
