//! Conical germs: densities, polar invariants `sigma_k`, localized polar
//! lengths and the local identities between them.

pub mod cone;
pub mod local;
pub mod sigma;
pub mod verify;

pub use cone::{density, solid_angle_fraction, ConeGerm, GermStratum, Link};
pub use local::{
    germ_polar_decomposition, local_lambda, local_polar_length, GermComponent, GermPolarDecomposition, LocalLambda,
    LocalPolarLength,
};
pub use sigma::{sigma_invariant, slice_chi, stable_slice_chi, SliceOptions};
pub use verify::{agree, verify_local_identities, GermBudget, IdentityCheck, LocalReport, LocalRow};
