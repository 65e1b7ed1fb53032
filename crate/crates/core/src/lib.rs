//! Spin- and polarization-resolved Compton scattering of a photon on a
//! moving electron.
//!
//! The crate evaluates the tree-level amplitude matrix between photon
//! polarization ⊗ electron spin states and derives the measurable
//! polarization and spin observables from it.
//! Energies and momenta are measured in units of the electron mass
//! throughout; conversions to keV and barn happen in [`units`] and at the
//! command-line boundary.
//!
//! ```
//! use compton_spin::amplitudes::{calibrate_p3, amplitude_matrix, SpinBasis};
//! use compton_spin::kinematics::ScatteringGeometry;
//!
//! let p3 = calibrate_p3(0.02, 0.0).unwrap();
//! let g = ScatteringGeometry::backscatter(0.02, 0.0, p3);
//! let m = amplitude_matrix(&g, SpinBasis::Tilted).unwrap();
//! assert_eq!(m.basis, SpinBasis::Tilted);
//! ```

// Negated comparisons are used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitudes;
pub mod cli;
pub mod dirac;
pub mod error;
pub mod kinematics;
pub mod linalg;
pub mod numerics;
pub mod observables;
pub mod scan;
pub mod units;
pub mod verify;

pub use error::{ComptonError, Result};
