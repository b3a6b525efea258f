pub mod abel;
pub mod error;
pub mod grid;
pub mod io;
pub mod jump;
pub mod moments;
pub mod quad;
pub mod reconstruct;
pub mod series;
pub mod specfun;
pub mod verify;
pub mod cli;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result, Warning, WarningCode};
pub use grid::{CoordKind, GridFunction};
pub use specfun::ComplexDegree;

/// Complex double used throughout.
pub type C64 = num_complex::Complex64;
