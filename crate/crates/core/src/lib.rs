//! Computations in the category of `theta Z`-equivariant regular-singular
//! differential modules on the punctured complex plane.

pub mod atheta;
pub mod bqtau;
pub mod cli;
pub mod error;
pub mod io;
pub mod laurent;
pub mod numkit;

pub use error::{Error, Result};
