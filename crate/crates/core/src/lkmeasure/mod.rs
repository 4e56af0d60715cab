//! Lipschitz-Killing measures: curvature densities, the exchange formula,
//! the kinematic slice check and a Steiner-formula oracle.

mod density;
mod exchange;
mod kinematic;
mod shape;
mod steiner;

pub use density::{
    lambda_density, lk_measure, lk_vector, pl_cell_volume_in, pl_lambda_density, pl_mean_normal_index,
    smooth_lambda_density, LkOptions, StratumRef, HALF_CIRCLE_NODES,
};
pub use exchange::{exchange_lambda0, morse_index_sum, ExchangeResult};
pub use kinematic::{kinematic_check, pl_slice_euler, slice_euler, smooth_slice_euler, KinematicResult};
pub use shape::{Geometry, Region, Shape};
pub use steiner::{steiner_oracle, SteinerFit, MAX_CONDITION};
