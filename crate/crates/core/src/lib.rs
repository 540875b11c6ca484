//! Modal analysis of sectoral cylindrical dielectric resonator antennas.
//!
//! The crate evaluates the closed-form cavity model of a metal-faced
//! cylindrical sector: resonant frequencies of the TE/EH modes, their vector
//! fields, and a finite-difference eigensolver that cross-checks the radial
//! eigenvalues independently of the Bessel routines. A small SAR toolkit turns
//! simulated tissue fields into a regulatory power budget.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod fields;
pub mod modal;
pub mod oracle;
pub mod sar;
pub mod specfun;

pub use error::{Error, Result};
pub use fields::{CylPoint, FieldGrid, FieldModel, FieldSample};
pub use modal::{Family, ModeSpec, SectorGeometry, VSource, Wavenumbers};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Vacuum permeability used by the field expressions, H/m.
pub const MU_0: f64 = 4.0e-7 * std::f64::consts::PI;
