//! Bogoliubov coefficients, photon spectra and entanglement for a 1+1
//! dimensional scalar field with time-dependent Robin boundaries, compared
//! against Dirichlet mirrors in motion.
//!
//! Units: propagation speed 1, lengths in mm, frequencies and wavenumbers in mm⁻¹.

// `!(x > 0.0)` style guards reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuous;
pub mod drive;
pub mod entanglement;
pub mod error;
pub mod mirror;
pub mod modes;
pub mod quad;
pub mod roots;
pub mod spectra;
pub mod sudden;
pub mod verify;

pub use error::{Error, Result};
pub use nalgebra;
pub use num_complex::Complex64;
