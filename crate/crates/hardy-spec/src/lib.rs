//! Discretized Hardy spaces on the upper half-plane and bidisc, Toeplitz and
//! Fourier-multiplier operator algebra, quasi-parabolic composition operators
//! built from their exponential series, and finite-section spectral tools.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod hardy;
pub mod io;
pub mod numeric;
pub mod operator;
pub mod par;
pub mod quasi_parabolic;
pub mod spectra;
pub mod symbol;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Height above the real axis at which symbols are evaluated as boundary values.
pub const BOUNDARY_HEIGHT: f64 = 1e-8;
