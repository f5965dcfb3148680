//! Distinguished integers, affine orbits and the periodic power series they act on.

pub mod cyclo;
pub mod distinguished;
pub mod error;
pub mod modnt;
pub mod orbits;
pub mod series;

pub use error::{Error, Result};
