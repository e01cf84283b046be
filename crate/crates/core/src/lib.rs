//! Generalized Borel-Laplace summation of formal power series whose
//! coefficient growth is controlled by a strongly regular sequence.
//!
//! The crate is organised bottom-up:
//!
//! * [`sequences`]: strongly regular sequences, `h_M`, `M(t)`, growth index.
//! * [`kernels`]: summation kernels, moment functions and the companion
//!   entire function `E`.
//! * [`transforms`]: formal and analytic Laplace/Borel transforms together
//!   with growth and asymptotic-expansion fits.
//! * [`summation`]: the end-to-end summation pipeline.
//! * [`mpde`]: formal solutions of moment partial differential equations and
//!   their growth classification.

pub mod envelope;
pub mod error;
pub mod kernels;
pub mod mpde;
pub mod quad;
pub mod sequences;
pub mod special;
pub mod summation;
pub mod transforms;

pub use error::{Error, Result};

pub use kernels::{Kernel, MomentLaw, MomentSequence, SurfacePoint};
pub use num_complex::Complex64;
pub use sequences::{GrowthMaps, SequenceFamily, SequenceTable};
pub use summation::{ContinuationMethod, SummabilityReport};
pub use transforms::{FormalSeries, PathSpec, Sector};
