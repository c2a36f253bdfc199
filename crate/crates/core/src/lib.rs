//! Numerical workbench for the Fourier-side objects built from Riemann's Xi
//! function: the theta kernel `E0`, its tilted and windowed transforms, the
//! zero set of the real window transform `G_R`, and the check suites that
//! exercise them.

pub mod claims;
pub mod error;
pub mod fourier;
pub mod quad;
pub mod report;
pub mod theta;
pub mod tracker;
pub mod xi;

mod kernel;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use quad::QuadratureResult;
pub use theta::TruncatedSum;
