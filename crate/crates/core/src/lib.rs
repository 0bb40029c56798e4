//! Rotationally invariant bipartite `N ⊗ N` states.
//!
//! The crate builds the parameter-space description of SO(3)-invariant
//! states (the α-vector and the Θ matrix of partial time reversal), a dense
//! matrix oracle for every operator involved, separability criteria, and
//! exact polytopes of the state, PPT and separable regions.

pub mod dense;
pub mod error;
pub mod geometry;
pub mod halfint;
pub mod invariant;
pub mod separability;
pub mod sqrt_rational;
pub mod surd;
pub mod verify;
pub mod wigner;

pub use dense::{DenseOperator, LocalState};
pub use error::{Error, Result};
pub use geometry::{Polytope, ReducedCoords};
pub use halfint::HalfInt;
pub use invariant::{AlphaVector, ThetaMatrix};
pub use separability::{Classification, CriteriaReport};
pub use sqrt_rational::SignedSqrtRational;
pub use surd::Surd;
