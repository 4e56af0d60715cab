//! Embedded simplicial complexes stratified by their open cells.

pub mod catalog;
mod complex;
mod io;
mod morse;

pub use complex::{CellId, StratifiedComplex};
pub use io::{parse_plstrat, write_plstrat};
pub use morse::{NormalLink, DIRECTION_TOL};
