//! Two-slit experiments with polarization path markers.
//!
//! [`algebra`] evolves the four-dimensional path ⊗ polarization state in
//! closed form; [`optics`] simulates the apparatus with polarized scalar
//! Fresnel optics on a 1-D grid; [`harness`] runs named scenarios against
//! expected bounds, compares the two levels and samples photon streams;
//! [`cli`] is the `pathmarker` command.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod harness;
pub mod optics;
pub mod polarization;

pub use error::{Error, Result};
