//! Passive dilations of Gaussian quantum channels.
//!
//! Decides whether a Gaussian channel `(X, Y)` admits a dilation with a
//! passive (number-preserving) unitary, constructs minimal such dilations
//! explicitly, and factors every passively dilatable channel into the
//! additive-noise normal form passive ∘ multi-mode beamsplitter ∘ passive.
//! All computation happens at the covariance-matrix level.

pub mod cli;
pub mod dilation;
pub mod error;
pub mod gaussian;
pub mod io;
mod jacobi;
pub mod normal_form;
pub mod numerics;
pub mod symplectic;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, RealMatrix, Tolerance};
