//! Contracting geometry, projection complexes and Patterson-Sullivan estimators on
//! free products of free abelian groups with their word metrics.

pub mod error;
pub mod boundary;
pub mod contracting;
pub mod density;
pub mod pcomplex;
pub mod randwalk;
pub mod space;

pub use error::{Error, Result};
pub use space::{AnnulusSpec, GeodesicPath, ModelSpace, Word};
