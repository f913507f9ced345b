//! The lazily refined Brownian bridge on the circle.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::bridge::NoiseConvention;
use crate::dyadic::{DyadicTime, MAX_REPRESENTABLE_LEVEL};
use crate::error::{Error, Result};
use crate::noise::{KeyedNoise, SeededNoise};

/// Default ceiling on the dyadic level of any stored value.
pub const DEFAULT_MAX_LEVEL: u32 = 40;

/// Store key: the numerator at the finest representable level. It is unique
/// per time and halves the entry size against keying by `DyadicTime`.
fn key(t: DyadicTime) -> u64 {
    t.num() << (MAX_REPRESENTABLE_LEVEL - t.level())
}

/// Brownian bridge values at dyadic times, sampled on first request.
///
/// A value at level `L > 0` is the mean of its two level-`(L-1)` neighbors
/// plus `sigma_L * G(t)`, where `G(t)` is the keyed Gaussian for the
/// canonical time `t`. Because the Gaussian depends only on `t`, the realized
/// path does not depend on the order in which times are requested.
///
/// Times up to a dense level live in a flat array indexed by numerator.
/// Contiguous runs filled by [`fill_segment`](Self::fill_segment) live in
/// segments, and everything else in a hash map.
#[derive(Debug, Clone)]
pub struct LazyBridgePath<K = SeededNoise> {
    dense: Vec<f64>,
    dense_level: u32,
    segments: Vec<Segment>,
    values: HashMap<u64, f64>,
    noise: K,
    convention: NoiseConvention,
    max_level: u32,
    max_level_touched: u32,
}

impl LazyBridgePath<SeededNoise> {
    /// Path driven by [`SeededNoise`] with the default convention and ceiling.
    pub fn seeded(seed: u64) -> Self {
        Self::new(SeededNoise::new(seed))
    }
}

impl<K: KeyedNoise> LazyBridgePath<K> {
    /// Path over `noise` with the default convention and level ceiling.
    pub fn new(noise: K) -> Self {
        Self::with_config(noise, NoiseConvention::default(), DEFAULT_MAX_LEVEL)
    }

    /// Path with an explicit convention and level ceiling.
    pub fn with_config(noise: K, convention: NoiseConvention, max_level: u32) -> Self {
        Self {
            dense: vec![0.0],
            dense_level: 0,
            segments: Vec::new(),
            values: HashMap::new(),
            noise,
            convention,
            max_level: max_level.min(MAX_REPRESENTABLE_LEVEL),
            max_level_touched: 0,
        }
    }

    /// The noise field.
    pub fn noise(&self) -> &K {
        &self.noise
    }

    /// Midpoint noise convention.
    pub fn convention(&self) -> NoiseConvention {
        self.convention
    }

    /// Level ceiling.
    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// Finest level stored so far.
    pub fn max_level_touched(&self) -> u32 {
        self.max_level_touched
    }

    /// Number of sampled values, including the pinned endpoint.
    pub fn len(&self) -> usize {
        let fresh: usize = self.segments.iter().map(|s| s.fresh).sum();
        self.dense.len() + fresh + self.values.len()
    }

    /// Always false: time zero is stored at construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Samples every time at `level` and coarser into the dense array.
    ///
    /// Values are those [`value_at`](Self::value_at) would give, and values
    /// already stored move over unchanged. A no-op when `level` is already
    /// dense.
    pub fn fill_dense(&mut self, level: u32) -> Result<()> {
        if level <= self.dense_level {
            return Ok(());
        }
        self.dense = self.refine_full(level)?;
        self.dense_level = level;
        self.segments.retain(|s| s.level > level);
        self.values
            .retain(|&k, _| k.trailing_zeros() < MAX_REPRESENTABLE_LEVEL - level);
        self.max_level_touched = self.max_level_touched.max(level);
        Ok(())
    }

    /// Samples the `len` consecutive times `start + k / 2^level` into a
    /// segment.
    ///
    /// Values are those [`value_at`](Self::value_at) would give; each fine
    /// point reads its parents from the run itself where it can.
    pub fn fill_segment(&mut self, start: DyadicTime, level: u32, len: usize) -> Result<()> {
        if level > self.max_level {
            return Err(Error::LevelOverflow {
                level,
                max: self.max_level,
            });
        }
        let first = start.numerator_at(level).ok_or(Error::LevelOverflow {
            level: start.level(),
            max: level,
        })?;
        let time = |k: usize| DyadicTime::new(first.wrapping_add(k as u64), level);
        let fine = |k: usize| (first.wrapping_add(k as u64)) & 1 == 1;
        let mut vals = vec![0.0; len];
        for k in (0..len).filter(|&k| !fine(k)) {
            vals[k] = self.value_at(time(k))?;
        }
        let sigma = self.convention.level_std(level);
        let mut fresh = 0;
        for k in (0..len).filter(|&k| fine(k)) {
            let t = time(k);
            vals[k] = match self.get(t) {
                Some(v) => v,
                None => {
                    let (lt, rt) = t.parents().expect("fine time has parents");
                    let l = if k > 0 {
                        vals[k - 1]
                    } else {
                        self.value_at(lt)?
                    };
                    let r = if k + 1 < len {
                        vals[k + 1]
                    } else {
                        self.value_at(rt)?
                    };
                    fresh += 1;
                    0.5 * (l + r) + sigma * self.noise.gaussian(t)
                }
            };
        }
        self.max_level_touched = self.max_level_touched.max(level);
        self.segments.push(Segment {
            level,
            first,
            vals,
            fresh,
        });
        Ok(())
    }

    fn dense_get(&self, t: DyadicTime) -> Option<f64> {
        (t.level() <= self.dense_level)
            .then(|| self.dense[(t.num() << (self.dense_level - t.level())) as usize])
    }

    /// The stored value at `t`, without sampling.
    pub fn get(&self, t: DyadicTime) -> Option<f64> {
        self.dense_get(t)
            .or_else(|| self.segments.iter().rev().find_map(|s| s.get(t)))
            .or_else(|| self.values.get(&key(t)).copied())
    }

    /// Value of the bridge at `t`, sampling it (and any missing ancestors)
    /// if needed.
    pub fn value_at(&mut self, t: DyadicTime) -> Result<f64> {
        if let Some(v) = self.get(t) {
            return Ok(v);
        }
        if t.level() > self.max_level {
            return Err(Error::LevelOverflow {
                level: t.level(),
                max: self.max_level,
            });
        }
        // Only time zero lacks parents, and it is always stored.
        let (left, right) = t.parents().expect("non-zero time has parents");
        let l = self.value_at(left)?;
        let r = self.value_at(right)?;
        let v = 0.5 * (l + r) + self.convention.level_std(t.level()) * self.noise.gaussian(t);
        self.values.insert(key(t), v);
        self.max_level_touched = self.max_level_touched.max(t.level());
        Ok(v)
    }

    /// Values at every `k / 2^level`, `k = 0 .. 2^level - 1`, in index order.
    ///
    /// Grid values are computed level by level from the keyed noise, which
    /// reproduces [`value_at`](Self::value_at) bit for bit, but they are not
    /// inserted into the store; the fine oracle grids would otherwise
    /// dominate memory.
    pub fn refine_full(&self, level: u32) -> Result<Vec<f64>> {
        if level > self.max_level {
            return Err(Error::LevelOverflow {
                level,
                max: self.max_level,
            });
        }
        let mut grid = vec![0.0];
        for l in 1..=level {
            let sigma = self.convention.level_std(l);
            let half = grid.len();
            let mut next = Vec::with_capacity(2 * half);
            for k in 0..half {
                let left = grid[k];
                let right = grid[(k + 1) % half];
                let t = DyadicTime::new(2 * k as u64 + 1, l);
                next.push(left);
                next.push(0.5 * (left + right) + sigma * self.noise.gaussian(t));
            }
            grid = next;
        }
        Ok(grid)
    }

    /// Index and value of the minimum of [`refine_full`](Self::refine_full)
    /// at `level`, with ties going to the smallest index.
    ///
    /// When the noise field bounds its Gaussians, the search descends the
    /// dyadic tree and skips every interval whose values cannot reach the
    /// best value found so far; the result is identical to a full scan.
    pub fn argmin_at(&self, level: u32) -> Result<(usize, f64)> {
        let Some(g_max) = self.noise.gaussian_bound() else {
            let grid = self.refine_full(level)?;
            let k = grid_argmin(&grid)?;
            return Ok((k, grid[k]));
        };
        if level > self.max_level {
            return Err(Error::LevelOverflow {
                level,
                max: self.max_level,
            });
        }
        // reach[l]: largest possible drop below the chord of a level-l
        // interval, summed over the hats of levels l+1..=level.
        let mut reach = vec![0.0; level as usize + 1];
        for l in (0..level).rev() {
            reach[l as usize] = reach[l as usize + 1] + g_max * self.convention.level_std(l + 1);
        }
        let slack = |r: f64| r * (1.0 + 1e-9) + 1e-12;

        let mut best = (0usize, 0.0f64);
        // (level, index at that level, left value, right value)
        let mut stack = vec![(0u32, 0u64, 0.0f64, 0.0f64)];
        while let Some((l, j, a, b)) = stack.pop() {
            if l == level || a.min(b) - slack(reach[l as usize]) > best.1 {
                continue;
            }
            let t = DyadicTime::new(2 * j + 1, l + 1);
            let m = 0.5 * (a + b) + self.convention.level_std(l + 1) * self.noise.gaussian(t);
            let idx = ((2 * j + 1) << (level - l - 1)) as usize;
            if m < best.1 || (m == best.1 && idx < best.0) {
                best = (idx, m);
            }
            let left = (l + 1, 2 * j, a, m);
            let right = (l + 1, 2 * j + 1, m, b);
            if a <= b {
                stack.push(right);
                stack.push(left);
            } else {
                stack.push(left);
                stack.push(right);
            }
        }
        Ok(best)
    }
}

/// Consecutive values `first + k` at one level.
#[derive(Debug, Clone)]
struct Segment {
    level: u32,
    first: u64,
    vals: Vec<f64>,
    fresh: usize,
}

impl Segment {
    fn get(&self, t: DyadicTime) -> Option<f64> {
        let num = t.numerator_at(self.level)?;
        let mask = (1u64 << self.level) - 1;
        let k = num.wrapping_sub(self.first) & mask;
        self.vals.get(k as usize).copied()
    }
}

/// Index of the smallest value; ties go to the smallest index.
pub fn grid_argmin(xs: &[f64]) -> Result<usize> {
    let (first, rest) = xs.split_first().ok_or(Error::EmptyInput)?;
    let mut best = (0, *first);
    for (i, &x) in rest.iter().enumerate() {
        if x < best.1 {
            best = (i + 1, x);
        }
    }
    Ok(best.0)
}
