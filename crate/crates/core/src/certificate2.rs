//! Sub-interval minima by inversion of the reflection-principle law, and the
//! second certificate that uses them.
//!
//! For a Brownian bridge over an interval of width `h` from `x` to `y`,
//!
//! ```text
//! P(min <= z) = 1                              if z >= min(x, y)
//!             = exp(-2 (z - x)(z - y) / h)     otherwise
//! ```

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::online::Verdict;

/// Distribution function of the minimum of a bridge of width `h` from `x`
/// to `y`, evaluated at `z`.
pub fn interval_min_cdf(x: f64, y: f64, z: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveWidth(h));
    }
    if z >= x.min(y) {
        return Ok(1.0);
    }
    Ok(math::exp(-2.0 * (z - x) * (z - y) / h))
}

/// The `u`-quantile of the bridge minimum: `(x+y)/2 - sqrt((x-y)^2/4 - h ln(u)/2)`.
///
/// Evaluated as `min(x,y) - c / (|x-y|/2 + sqrt((x-y)^2/4 + c))` with
/// `c = -h ln(u) / 2`, which is the same number without the cancellation
/// that the direct form suffers when `c` is small.
pub fn sample_interval_min(x: f64, y: f64, h: f64, u: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveWidth(h));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::UniformOutOfRange(u));
    }
    let c = -0.5 * h * math::ln(u);
    let half_gap = 0.5 * (x - y).abs();
    let root = math::sqrt(half_gap * half_gap + c);
    Ok(x.min(y) - c / (half_gap + root))
}

/// One sampled sub-interval minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalMinSample {
    /// Interval index: the interval runs between grid points `k - 1` and `k`.
    pub k: usize,
    /// Left endpoint value.
    pub x: f64,
    /// Right endpoint value.
    pub y: f64,
    /// Uniform variate used.
    pub u: f64,
    /// Sampled minimum.
    pub m: f64,
}

/// Result of one certificate-2 pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate2Outcome {
    /// Green unless some sampled minimum reached the grid minimum.
    pub verdict: Verdict,
    /// Samples drawn, in interval order, up to and including the failing one.
    pub samples: Vec<IntervalMinSample>,
    /// First interval whose minimum reached the grid minimum.
    pub failed_interval: Option<usize>,
}

/// Whether interval `k` (grid points `k-1`, `k`) lies outside the middle
/// half `[2^(d-2), 2^(d-2) + 2^(d-1)]` and is therefore tested.
pub fn is_outer_interval(k: usize, d: u32) -> bool {
    let lo = 1usize << (d - 2);
    let hi = lo + (1usize << (d - 1));
    !(k > lo && k <= hi)
}

/// Samples the minimum over every outer sub-interval of a zoom grid and
/// fails at the first one that reaches `values[argmin]`.
///
/// `uniform(k)` supplies the variate for interval `k`; `values` holds the
/// `2^d + 1` grid values, spaced `2^-d` apart in zoom time.
pub fn run_certificate2<F>(
    values: &[f64],
    argmin: usize,
    d: u32,
    mut uniform: F,
) -> Result<Certificate2Outcome>
where
    F: FnMut(usize) -> f64,
{
    if d < 3 {
        return Err(Error::DepthTooSmall(d));
    }
    let cells = 1usize << d;
    if values.len() != cells + 1 {
        return Err(Error::LengthMismatch {
            expected: cells + 1,
            got: values.len(),
        });
    }
    if argmin > cells {
        return Err(Error::IndexOutOfRange {
            index: argmin,
            max: cells,
        });
    }
    let h = 1.0 / cells as f64;
    let floor = values[argmin];
    let mut samples = Vec::new();
    for k in (1..=cells).filter(|&k| is_outer_interval(k, d)) {
        let (x, y) = (values[k - 1], values[k]);
        let u = uniform(k);
        let m = sample_interval_min(x, y, h, u)?;
        samples.push(IntervalMinSample { k, x, y, u, m });
        if m <= floor {
            return Ok(Certificate2Outcome {
                verdict: Verdict::RedX,
                samples,
                failed_interval: Some(k),
            });
        }
    }
    Ok(Certificate2Outcome {
        verdict: Verdict::Green,
        samples,
        failed_interval: None,
    })
}
