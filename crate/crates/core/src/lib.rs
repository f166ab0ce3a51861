//! Numerical toolkit for vacuum-fluctuation spectra and probability
//! distributions of smeared field operators.
//!
//! Two halves share the machinery here. The spectral half ([`spectra`],
//! [`abel`]) evaluates the wildly oscillating frequency spectra attached to
//! boundary-modified vacuum energies and recovers the finite energies by
//! exponential damping plus extrapolation of the damping parameter to zero.
//! The distribution half ([`wick`], [`field2d`], [`quadform`], [`stats`])
//! derives the Gaussian law of smeared linear operators from contraction
//! counting, computes the moments of the time-averaged normal-ordered square
//! in the two-dimensional small-mass model, and samples the skewed,
//! lower-bounded distribution of its discretized counterpart.

pub mod abel;
pub mod error;
pub mod field2d;
mod quad;
pub mod quadform;
pub mod spectra;
pub mod stats;
pub mod wick;

pub use error::{Error, Result};
pub use spectra::{CasimirGeometry, CasimirPolderSetup, SpectrumModel};
