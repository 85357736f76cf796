//! Frolov lattices, smooth hat kernels and fixed-volume discrepancy measurement.

pub mod config;
pub mod discrepancy;
pub mod dispersion;
pub mod error;
pub mod harness;
pub mod io;
pub mod kernels;
pub mod lattice;
pub mod pointsets;
pub mod quadrature;
pub mod rates;
pub mod sum;

pub use error::{Error, Result};
