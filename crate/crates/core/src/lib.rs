//! Rational-base number systems.
//!
//! Every positive integer `n` has a unique finite expansion
//! `n = (1/b) * sum_k eps_k * (a/b)^k` with digits `eps_k` in `{0, .., a-1}`
//! when `a > b >= 1` are coprime. This crate provides:
//!
//! * [`numeration`]: exact conversion between integers and digit words.
//! * [`patterns`]: digit-pattern counts, sum-of-digits statistics and the
//!   Champernowne-style digit stream built from concatenated expansions.
//! * [`adelic`]: exact arithmetic in `R x prod_{p | b} Q_p` on rational points,
//!   the self-affine tile approximations and their boundary tubes.
//! * [`fourier`]: closed-form Fourier coefficients of the box-averaged tile
//!   indicators, truncated series and the pattern estimator built on them.
//! * [`cli`]: the `ratbase` command-line front end.

pub mod adelic;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod numeration;
pub mod patterns;

pub use error::{Error, Result};
pub use numeration::{Base, Digit, DigitWord};

/// Exact rational numbers used throughout the adelic and Fourier modules.
pub type Q = num_rational::BigRational;
