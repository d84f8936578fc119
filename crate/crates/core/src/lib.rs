//! Bayesian model selection with the Hyvarinen score and with Bayes factors.
//!
//! The crate is organised bottom-up:
//!
//! - [`scoring`]: the Hyvarinen score, its Gaussian closed form, the
//!   prequential accumulator and finite-difference checks;
//! - [`linear`]: Gaussian linear models with proper or flat priors;
//! - [`univariate`] and [`sampling`]: conjugate one-parameter families and
//!   seeded data generators;
//! - [`harness`]: the seeded Monte Carlo studies and their CSV/manifest
//!   outputs;
//! - [`cli`]: the `score-select` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod harness;
pub mod linear;
pub mod sampling;
pub mod scoring;
pub mod univariate;

pub use error::{Error, Result};
