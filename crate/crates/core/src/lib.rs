pub mod boundary;
pub mod cellmap;
pub mod cli;
mod dense;
pub mod error;
pub mod homogenize;
pub mod kpoly;
pub mod lattice;
pub mod validate;

pub use error::{Error, Result};
