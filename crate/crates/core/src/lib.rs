//! Exact piecewise-linear interval maps, their radial contour factors, and the
//! lifting, bridging and rewiring constructions built on them.
//!
//! Everything is generic over [`Scalar`]; the aliases below fix the scalar to
//! arbitrary-precision rationals, which is what the CLI and tests use.

pub mod bridging;
pub mod contour;
pub mod error;
pub mod fixtures;
pub mod oracle;
pub mod plmap;
pub mod scalar;
pub mod simplicial;
pub mod systems;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Arbitrary-precision rational.
pub type Q = num_rational::BigRational;
pub type Map = plmap::PlMap<Q>;
pub type Pointed = plmap::PointedMap<Q>;
