//! Smooth catalog shapes with exact differential data.

mod critical;
mod forms;
mod quadrature;
mod shape;
mod stratum;

pub use critical::{CriticalPoint, DEGENERACY_TOL};
pub use forms::{elementary_symmetric, SecondFormAt, NORMAL_CIRCLE_POINTS, NORMAL_TOL};
pub use quadrature::axis_rule;
pub use shape::{ShapeTag, SmoothShape};
pub use stratum::{ChartAxis, Conormal, Piece, SmoothStratum};
