//! Online search for the arg-min of a Brownian bridge on the circle.
//!
//! The crate is `no_std` (with `alloc`). It holds the pure algorithmic pieces:
//!
//! * [`dyadic`]: exact dyadic time arithmetic on the unit circle.
//! * [`noise`]: counter-based, key-addressed Gaussian and uniform variates.
//! * [`path`]: the lazily refined Brownian bridge store shared by the online
//!   search and the brute-force oracle.
//! * [`bridge`]: array-level midpoint fill-in and depth-`d` initialization.
//! * [`online`]: the zoom/bisection loop with its window certificate.
//! * [`certificate2`]: exact sampling of sub-interval minima and the second
//!   certificate built on it.
//!
//! IO, file formats, statistics and the command-line tool live in the
//! `bbargmin` companion crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bridge;
pub mod certificate2;
pub mod dyadic;
mod error;
mod math;
pub mod noise;
pub mod online;
pub mod path;

pub use self::{
    bridge::{bbfi, init, NoiseConvention},
    certificate2::{
        interval_min_cdf, run_certificate2, sample_interval_min, Certificate2Outcome,
        IntervalMinSample,
    },
    dyadic::{circle_dist, DyadicTime},
    error::{Error, Result},
    noise::{CounterStream, GaussianSource, KeyedNoise, SeededNoise, UniformSource},
    online::{
        accumulate_estimate, run_coupled, run_standalone, Abort, Certificate, RunParams, RunResult,
        Verdict, ZoomState,
    },
    path::{grid_argmin, LazyBridgePath, DEFAULT_MAX_LEVEL},
};
