//! Real-order Bessel functions of the first kind, their derivatives and zeros.

mod bessel;
mod gamma;
mod zeros;

pub use bessel::{bessel_j, bessel_j_prime, BesselOrder};
pub use gamma::{gamma, ln_gamma};
pub use zeros::bessel_zero;

pub(crate) use bessel::{j_unchecked, jp_unchecked};
