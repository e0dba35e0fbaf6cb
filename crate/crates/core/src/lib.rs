//! Classification and integration of geodesic flows on homogeneous spaces.
//!
//! The library works with a Lie algebra given by structure constants, an
//! isotropy subalgebra picking out a homogeneous space, and metrics on that
//! space. It computes the integer invariants of the space (degree of
//! degeneracy, index, dimension and index of the invariant-function algebra,
//! defect), decides integrability of the geodesic flow, integrates
//! Lie-Poisson and geodesic dynamics with conservation monitors, and verifies
//! the canonical-transformation machinery for the two built-in worked
//! examples, including the branch-jumping Casimir of the wild group.

pub mod algebra;
pub mod charts;
pub mod dynamics;
pub mod error;
pub mod homspace;
pub mod io;
pub mod linalg;
pub mod poly;
pub mod realization;
pub mod scalar;
pub mod smooth;

pub use algebra::{LieAlgebra, ValidationReport};
pub use error::HomflowError;
pub use scalar::{Scalar, ScalarMode};
