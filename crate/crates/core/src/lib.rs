//! Fourier coefficients of holomorphic Siegel Eisenstein series of degree two
//! with primitive nebentypus, together with the local closed forms they are
//! assembled from and independent oracles that check them.

pub mod arith;
pub mod characters;
pub mod error;
pub mod form;
pub mod fourier;
pub mod localfactors;
pub mod lvalues;
pub mod oracle;
pub mod scalar;
pub mod series;
pub mod tolerances;
pub mod verify;

pub use error::{Error, ErrorKind, Result};
