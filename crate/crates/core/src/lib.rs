//! Evaluation and certification of Fourier phase-retrieval stability
//! estimates on uniform grids.
//!
//! * [`grid`]: grids, quadrature, the unitary transform and spectral shifts.
//! * [`geometry`]: the complex-plane inequality and the radial/tangential split.
//! * [`bounds`]: every term of the stability estimate and its variants.
//! * [`families`]: built-in test functions and randomized pairs.
//! * [`experiments`]: scaling sweeps with log-log fits.
//! * [`io`] and [`cli`]: file formats and the command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod families;
pub mod geometry;
pub mod grid;
pub mod io;

pub use error::{Error, Result};
pub use num_complex::Complex64;
