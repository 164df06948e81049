//! Fundamental solutions of the Dirac equation for an electron in counterpropagating
//! plane electromagnetic waves.
//!
//! The field of standing waves is periodic in all four space-time coordinates, so
//! the wave function is expanded in a four-dimensional Fourier series over an
//! even-sum integer lattice. On a finite model of that lattice the projector
//! onto all solutions of the truncated system is built exactly; the residual of
//! the resulting wave functions under the Dirac operator, minimized over the
//! frequency offset `ξ`, locates the spectral lines of the electron.
//!
//! Module map:
//! - [`gamma`]: Dirac matrix basis and D-set algebra.
//! - [`lattice`]: multi-indices, the 13-shift stencil, finite models.
//! - [`field`]: field amplitudes, wave parameters, coefficient blocks.
//! - [`projector`]: projectors, the merge engine, the banded solver and the dense oracle.
//! - [`evolution`]: evolution operator, inner-product forms, residuals, mean values.
//! - [`spectral`]: scans, line refinement, doublets and spin precession.
//! - [`volkov`]: the closed-form single-wave solution.

pub mod error;
pub mod evolution;
pub mod field;
pub mod gamma;
pub mod lattice;
pub mod projector;
pub mod spectral;
pub mod volkov;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64 as C64;

/// Dense 4×4 complex matrix.
pub type Mat4 = nalgebra::Matrix4<C64>;
/// Four-component complex amplitude.
pub type Bispinor = nalgebra::Vector4<C64>;
