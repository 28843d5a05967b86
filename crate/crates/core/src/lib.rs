//! Quaternionic Dolbeault calculus and HKT structures on total spaces of
//! hyperholomorphic bundles, with numerical verification suites.
//!
//! The crate is organized bottom-up: jets and small matrices, the exterior
//! algebra, the flat quaternionic model, pointwise su(2) operators, form
//! fields with exact derivatives, and finally the geometric constructions on
//! total spaces and their Hopf quotients.

pub mod bundle;
pub mod exterior;
pub mod fields;
pub mod hermitian;
pub mod hopf;
pub mod jet;
pub mod linalg;
pub mod pointwise;
pub mod quaternion;
pub mod report;
pub mod total_space;
pub mod suites;
