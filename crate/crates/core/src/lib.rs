//! Zeta-regularized determinants, eta invariants, graded determinants and
//! the refined analytic torsion of operators whose spectra are known
//! explicitly, with numerical checks of the identities relating them.
//!
//! The central example is the flat line bundle over the circle with
//! connection `d + ia dx`, whose refined torsion is `1 - e^{2πia}`.

pub mod circle;
pub mod cli;
pub mod complexcut;
pub mod determinant;
pub mod error;
pub mod serde_complex;
pub mod spectrum;
pub mod tolerances;
pub mod zetafun;

pub use complexcut::{in_sector, log_cut, log_cut_with_tolerance, pow_cut, CutAngle, Sector};
pub use error::{Error, Result};
pub use spectrum::{Eigenvalue, GradedSpectrum, Spectrum};
pub use zetafun::ZetaResult;
