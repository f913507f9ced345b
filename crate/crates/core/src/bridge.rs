//! Array-level Brownian bridge fill-in and the depth-`d` initialization.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::noise::GaussianSource;
use crate::path::DEFAULT_MAX_LEVEL;

/// Coefficient used for the midpoint noise of a fill-in over `n` intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum NoiseConvention {
    /// `1 / (2 sqrt(n))`: the conditional standard deviation of a Brownian
    /// midpoint over intervals of width `1/n`.
    #[default]
    VarianceConsistent,
    /// `1 / sqrt(2 n)`: the literal published coefficient. Doubles every
    /// conditional variance.
    PaperLiteral,
}

impl NoiseConvention {
    /// Midpoint standard deviation when refining `intervals` equal intervals
    /// spanning unit time.
    #[inline]
    pub fn midpoint_std(self, intervals: f64) -> f64 {
        match self {
            NoiseConvention::VarianceConsistent => 0.5 / math::sqrt(intervals),
            NoiseConvention::PaperLiteral => math::sqrt(0.5 / intervals),
        }
    }

    /// Midpoint standard deviation for a new point at dyadic level `level`
    /// (its parents are `2^(level-1)` intervals apart on the unit circle).
    #[inline]
    pub fn level_std(self, level: u32) -> f64 {
        debug_assert!(level >= 1);
        self.midpoint_std((1u64 << (level - 1)) as f64)
    }
}

/// Doubles the resolution of a bridge segment.
///
/// `xs` holds `n + 1` values at equally spaced times over unit span. The
/// result has `2n + 1` values: even slots copy `xs`, odd slots are midpoints
/// plus `sigma * G`, consuming exactly `n` Gaussians in index order.
pub fn bbfi<G: GaussianSource + ?Sized>(
    n: usize,
    xs: &[f64],
    noise: &mut G,
    conv: NoiseConvention,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroIntervals);
    }
    if xs.len() != n + 1 {
        return Err(Error::LengthMismatch {
            expected: n + 1,
            got: xs.len(),
        });
    }
    let sigma = conv.midpoint_std(n as f64);
    let mut out = Vec::with_capacity(2 * n + 1);
    out.push(xs[0]);
    for pair in xs.windows(2) {
        let g = noise.next_gaussian();
        out.push(0.5 * (pair[0] + pair[1]) + sigma * g);
        out.push(pair[1]);
    }
    Ok(out)
}

/// Depth-`d` bridge on `[0, 1]`: returns values and times at `k / 2^d`.
///
/// Starts from `[0, 0]` and applies [`bbfi`] `d` times; round `r` refines
/// `2^(r-1)` intervals.
pub fn init<G: GaussianSource + ?Sized>(
    d: u32,
    noise: &mut G,
    conv: NoiseConvention,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if d > DEFAULT_MAX_LEVEL {
        return Err(Error::LevelOverflow {
            level: d,
            max: DEFAULT_MAX_LEVEL,
        });
    }
    let mut xs = alloc::vec![0.0, 0.0];
    for r in 1..=d {
        xs = bbfi(1usize << (r - 1), &xs, noise, conv)?;
    }
    let cells = (1u64 << d) as f64;
    let ts = (0..xs.len()).map(|k| k as f64 / cells).collect();
    Ok((xs, ts))
}
