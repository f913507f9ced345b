//! Std companion to `bbargmin-core`: figure and statistics files, Monte Carlo
//! validation of the supporting probability facts, the coupled experiment
//! harness, and the `bbargmin` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brownian;
mod error;
pub mod experiments;
pub mod figures;
pub mod stats;
pub mod validation;

pub use error::{Error, Result};
