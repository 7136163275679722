//! Simulation and fitting of infrared Fabry–Pérot microcavities filled with
//! strongly absorbing molecular liquids.
//!
//! Wavenumbers are in cm⁻¹ and lengths in µm unless a name says otherwise.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod cli;
pub mod error;
pub mod fit;
pub mod hopfield;
pub mod materials;
pub mod modes;
pub mod presets;
pub mod spectrum;
pub mod tmm;
pub mod units;

pub use error::{Error, Result};
pub use spectrum::Spectrum;
