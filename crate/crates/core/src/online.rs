//! The online zoom/bisection search.
//!
//! Level 0 samples the bridge on a grid of `2^d` cells and takes the grid
//! arg-min `K(0)`. Each later level keeps the half-window of the previous
//! grid centred on its arg-min, rescales it by Brownian scaling (time ×2,
//! space ×√2), refills it back to `2^d` cells and takes the new arg-min
//! `K(n)`. The window certificate fails as soon as `K(n)` leaves the
//! central quarter `2^(d-1) ± 2^(d-3)`.
//!
//! Two drivers share the loop:
//!
//! * [`run_standalone`] works on arrays with fresh Gaussians from a stream.
//! * [`run_coupled`] reads every value from a [`LazyBridgePath`], so that a
//!   full-resolution oracle can later inspect the very same path.

use alloc::vec::Vec;

use crate::bridge::{bbfi, init, NoiseConvention};
use crate::certificate2::{run_certificate2, IntervalMinSample};
use crate::dyadic::DyadicTime;
use crate::error::{Error, Result};
use crate::noise::{GaussianSource, KeyedNoise, UniformSource};
use crate::path::{grid_argmin, LazyBridgePath};

/// Certificate status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Passed.
    Green,
    /// Failed; the run aborts.
    RedX,
}

/// Which certificate stopped a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// The in-loop window check on `K(n)`.
    Window,
    /// The sub-interval minimum check.
    IntervalMinimum,
}

/// Where and why a run stopped early.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Abort {
    /// Zoom level `n` at which the certificate failed.
    pub level: u32,
    /// The failing certificate.
    pub certificate: Certificate,
}

/// Parameters of one search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunParams {
    /// Grid depth `d`: every level holds `2^d + 1` values.
    pub depth: u32,
    /// Number of zoom levels `N`.
    pub levels: u32,
    /// Midpoint noise convention.
    pub convention: NoiseConvention,
    /// Run the sub-interval minimum certificate after each level.
    pub certificate2: bool,
    /// Keep the per-level window arrays for figure output.
    pub record_levels: bool,
}

impl RunParams {
    /// Depth `depth`, `levels` zoom levels, default convention, certificate 2
    /// off, level arrays recorded.
    pub fn new(depth: u32, levels: u32) -> Self {
        Self {
            depth,
            levels,
            convention: NoiseConvention::default(),
            certificate2: false,
            record_levels: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.depth < 3 {
            return Err(Error::DepthTooSmall(self.depth));
        }
        if self.levels == 0 {
            return Err(Error::NoLevels);
        }
        Ok(())
    }

    fn cells(&self) -> usize {
        1usize << self.depth
    }

    /// Inclusive range of admissible `K(n)` for the window certificate.
    pub fn window(&self) -> (usize, usize) {
        let mid = 1usize << (self.depth - 1);
        let slack = 1usize << (self.depth - 3);
        (mid - slack, mid + slack)
    }
}

/// The search state at one zoom level.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoomState {
    /// Zoom level `n` (0 for the initial grid).
    pub level: u32,
    /// Grid depth `d`.
    pub depth: u32,
    /// The `2^d + 1` grid values in zoom coordinates.
    pub values: Vec<f64>,
    /// Grid arg-min `K(n)`.
    pub argmin: usize,
    /// `K(n) / 2^d`.
    pub t_star: f64,
    /// Spatial factor `2^(n/2)` relative to the global bridge.
    pub scale: f64,
    /// Global time of zoom coordinate 0.
    pub origin: DyadicTime,
    /// Global bridge value subtracted as baseline at this level.
    pub anchor_value: f64,
}

impl ZoomState {
    /// Global circle time of grid point `k`: `origin + k 2^-(d+n)`.
    pub fn zoom_to_global(&self, k: usize) -> Result<DyadicTime> {
        let cells = 1usize << self.depth;
        if k > cells {
            return Err(Error::IndexOutOfRange {
                index: k,
                max: cells,
            });
        }
        Ok(self
            .origin
            .add(DyadicTime::new(k as u64, self.depth + self.level)))
    }
}

/// Transcript of one search.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Grid depth `d`.
    pub depth: u32,
    /// Requested number of levels `N`.
    pub levels: u32,
    /// `t*_0, t*_1, ...`; `N + 1` entries on a green run.
    pub t_stars: Vec<f64>,
    /// Accumulated estimate over the available `t_stars`, exact.
    pub estimate: DyadicTime,
    /// Window certificate.
    pub cert1: Verdict,
    /// Sub-interval minimum certificate, when enabled.
    pub cert2: Option<Verdict>,
    /// Early stop, if any certificate failed.
    pub abort: Option<Abort>,
    /// Window arrays `hatB^(n)` (each `2^(d-1) + 1` values), `n = 1, 2, ...`.
    pub level_arrays: Vec<Vec<f64>>,
    /// Certificate-2 samples per level, `n = 1, 2, ...`.
    pub cert2_samples: Vec<Vec<IntervalMinSample>>,
    /// Gaussians drawn (standalone) or bridge values created (coupled).
    pub gaussians_consumed: u64,
    /// State at the last level reached.
    pub final_state: ZoomState,
}

impl RunResult {
    /// `U_N mod 1` (or the last available `U_n` after an abort).
    pub fn estimate_f64(&self) -> f64 {
        self.estimate.to_f64()
    }

    /// Level of the abort, if any.
    pub fn abort_level(&self) -> Option<u32> {
        self.abort.map(|a| a.level)
    }

    /// Both certificates green.
    pub fn is_green(&self) -> bool {
        self.abort.is_none()
    }
}

/// `U_upto mod 1` where `U_0 = t*_0` and `U_n = U_(n-1) + (t*_n - 1/2) 2^-n`.
pub fn accumulate_estimate(t_stars: &[f64], upto: usize) -> Result<f64> {
    if t_stars.len() < upto + 1 {
        return Err(Error::InsufficientEntries {
            needed: upto + 1,
            got: t_stars.len(),
        });
    }
    let mut u = t_stars[0];
    let mut step = 1.0;
    for t in &t_stars[1..=upto] {
        step *= 0.5;
        u += (t - 0.5) * step;
    }
    u %= 1.0;
    if u < 0.0 {
        u += 1.0;
    }
    Ok(u)
}

/// `2^(n/2)`.
pub fn zoom_scale(level: u32) -> f64 {
    let base = (1u64 << (level / 2)) as f64;
    if level % 2 == 1 {
        base * core::f64::consts::SQRT_2
    } else {
        base
    }
}

/// Supplies grids to the shared zoom loop.
trait LevelFiller {
    /// Level-0 grid of `2^d + 1` values.
    fn initial(&mut self, p: &RunParams) -> Result<Vec<f64>>;

    /// Window array and refilled grid for level `n`.
    fn next(
        &mut self,
        p: &RunParams,
        prev: &ZoomState,
        origin: DyadicTime,
        estimate: DyadicTime,
    ) -> Result<Level>;

    fn uniform(&mut self, level: u32, k: usize) -> f64;

    fn consumed(&self) -> u64;
}

struct Level {
    window: Vec<f64>,
    grid: Vec<f64>,
    scale: f64,
    anchor_value: f64,
}

fn drive<F: LevelFiller>(p: &RunParams, filler: &mut F) -> Result<RunResult> {
    p.validate()?;
    let d = p.depth;
    let cells = p.cells();
    let half = cells / 2;
    let (lo, hi) = p.window();

    let values = filler.initial(p)?;
    let k0 = grid_argmin(&values)?;
    let mut estimate = DyadicTime::new(k0 as u64, d);
    let mut state = ZoomState {
        level: 0,
        depth: d,
        argmin: k0,
        t_star: estimate.to_f64(),
        values,
        scale: 1.0,
        origin: DyadicTime::ZERO,
        anchor_value: 0.0,
    };
    let mut t_stars = alloc::vec![state.t_star];
    let mut level_arrays = Vec::new();
    let mut cert2_samples = Vec::new();
    let mut cert1 = Verdict::Green;
    let mut cert2 = p.certificate2.then_some(Verdict::Green);
    let mut abort = None;

    for n in 1..=p.levels {
        let origin = estimate.sub(DyadicTime::new(1, n + 1));
        let Level {
            window,
            grid,
            scale,
            anchor_value,
        } = filler.next(p, &state, origin, estimate)?;
        debug_assert_eq!(window.len(), half + 1);
        debug_assert_eq!(grid.len(), cells + 1);
        if p.record_levels {
            level_arrays.push(window);
        }
        let k = grid_argmin(&grid)?;
        state = ZoomState {
            level: n,
            depth: d,
            values: grid,
            argmin: k,
            t_star: k as f64 / cells as f64,
            scale,
            origin,
            anchor_value,
        };
        if k < lo || k > hi {
            cert1 = Verdict::RedX;
            abort = Some(Abort {
                level: n,
                certificate: Certificate::Window,
            });
            break;
        }
        t_stars.push(state.t_star);
        estimate = estimate.add(DyadicTime::from_signed(k as i64 - half as i64, d + n));

        if p.certificate2 {
            let outcome = run_certificate2(&state.values, k, d, |i| filler.uniform(n, i))?;
            cert2_samples.push(outcome.samples);
            if outcome.verdict == Verdict::RedX {
                cert2 = Some(Verdict::RedX);
                abort = Some(Abort {
                    level: n,
                    certificate: Certificate::IntervalMinimum,
                });
                break;
            }
        }
    }
    Ok(RunResult {
        depth: d,
        levels: p.levels,
        t_stars,
        estimate,
        cert1,
        cert2,
        abort,
        level_arrays,
        cert2_samples,
        gaussians_consumed: filler.consumed(),
        final_state: state,
    })
}

struct Counting<'a, G: ?Sized> {
    inner: &'a mut G,
    count: u64,
}

impl<G: GaussianSource + ?Sized> GaussianSource for Counting<'_, G> {
    fn next_gaussian(&mut self) -> f64 {
        self.count += 1;
        self.inner.next_gaussian()
    }
}

struct Standalone<'a, G: ?Sized, U: ?Sized> {
    gaussians: Counting<'a, G>,
    uniforms: &'a mut U,
}

impl<G: GaussianSource + ?Sized, U: UniformSource + ?Sized> LevelFiller for Standalone<'_, G, U> {
    fn initial(&mut self, p: &RunParams) -> Result<Vec<f64>> {
        Ok(init(p.depth, &mut self.gaussians, p.convention)?.0)
    }

    fn next(
        &mut self,
        p: &RunParams,
        prev: &ZoomState,
        _origin: DyadicTime,
        _estimate: DyadicTime,
    ) -> Result<Level> {
        let cells = p.cells();
        let half = cells / 2;
        let quarter = cells / 4;
        let k = prev.argmin;
        let base = prev.values[k];
        let sqrt2 = core::f64::consts::SQRT_2;
        // Level 0 lives on the circle, so its window wraps; later grids are
        // bridges whose windows stay inside by the certificate.
        let window: Vec<f64> = if prev.level == 0 {
            (0..=half)
                .map(|j| sqrt2 * (prev.values[(j + k + cells - quarter) % cells] - base))
                .collect()
        } else {
            prev.values[k - quarter..=k + quarter]
                .iter()
                .map(|v| sqrt2 * (v - base))
                .collect()
        };
        let grid = bbfi(half, &window, &mut self.gaussians, p.convention)?;
        let scale = prev.scale * sqrt2;
        Ok(Level {
            window,
            grid,
            scale,
            anchor_value: prev.anchor_value + base / prev.scale,
        })
    }

    fn uniform(&mut self, _level: u32, _k: usize) -> f64 {
        self.uniforms.next_uniform()
    }

    fn consumed(&self) -> u64 {
        self.gaussians.count
    }
}

/// Runs the search on arrays, drawing fresh Gaussians from `gaussians` and
/// certificate-2 uniforms from `uniforms`.
///
/// A green run consumes exactly `(2^d - 1) + N 2^(d-1)` Gaussians.
pub fn run_standalone<G, U>(
    params: &RunParams,
    gaussians: &mut G,
    uniforms: &mut U,
) -> Result<RunResult>
where
    G: GaussianSource + ?Sized,
    U: UniformSource + ?Sized,
{
    let mut filler = Standalone {
        gaussians: Counting {
            inner: gaussians,
            count: 0,
        },
        uniforms,
    };
    drive(params, &mut filler)
}

struct Coupled<'a, K> {
    path: &'a mut LazyBridgePath<K>,
    start_len: usize,
}

impl<K: KeyedNoise> LevelFiller for Coupled<'_, K> {
    fn initial(&mut self, p: &RunParams) -> Result<Vec<f64>> {
        self.path.fill_dense(p.depth)?;
        (0..=p.cells())
            .map(|k| self.path.value_at(DyadicTime::new(k as u64, p.depth)))
            .collect()
    }

    fn next(
        &mut self,
        p: &RunParams,
        prev: &ZoomState,
        origin: DyadicTime,
        estimate: DyadicTime,
    ) -> Result<Level> {
        let level = prev.level + 1;
        let scale = zoom_scale(level);
        let anchor_value = self.path.value_at(estimate)?;
        let fine = p.depth + level;
        self.path.fill_segment(origin, fine, p.cells() + 1)?;
        let grid = (0..=p.cells())
            .map(|k| {
                let t = origin.add(DyadicTime::new(k as u64, fine));
                Ok(scale * (self.path.value_at(t)? - anchor_value))
            })
            .collect::<Result<Vec<f64>>>()?;
        let window = grid.iter().step_by(2).copied().collect();
        Ok(Level {
            window,
            grid,
            scale,
            anchor_value,
        })
    }

    fn uniform(&mut self, level: u32, k: usize) -> f64 {
        self.path.noise().uniform(level, k as u64)
    }

    fn consumed(&self) -> u64 {
        (self.path.len() - self.start_len) as u64
    }
}

/// Runs the search against a shared lazy path.
///
/// Every value held at level `n` equals `2^(n/2) (B(t) - B(U_(n-1)))` for the
/// global time `t` of its grid point, computed exactly that way. Uniforms
/// for certificate 2 come from the path's noise field keyed by `(n, k)`.
pub fn run_coupled<K: KeyedNoise>(
    params: &RunParams,
    path: &mut LazyBridgePath<K>,
) -> Result<RunResult> {
    params.validate()?;
    if params.convention != path.convention() {
        return Err(Error::ConventionMismatch);
    }
    let finest = params.depth + params.levels;
    if finest > path.max_level() {
        return Err(Error::LevelOverflow {
            level: finest,
            max: path.max_level(),
        });
    }
    let start_len = path.len();
    drive(params, &mut Coupled { path, start_len })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::CounterStream;

    fn zeros() -> impl FnMut() -> f64 {
        || 0.0
    }

    #[test]
    fn estimate_examples() {
        assert_eq!(accumulate_estimate(&[0.5, 0.5, 0.5], 2), Ok(0.5));
        assert_eq!(accumulate_estimate(&[0.25], 0), Ok(0.25));
        assert_eq!(accumulate_estimate(&[0.5, 0.625, 0.375], 2), Ok(0.53125));
        assert!(accumulate_estimate(&[0.5], 1).is_err());
    }

    #[test]
    fn window_at_depth_three() {
        assert_eq!(RunParams::new(3, 1).window(), (3, 5));
        assert_eq!(RunParams::new(14, 1).window(), (6144, 10240));
    }

    #[test]
    fn symmetric_v_is_a_fixed_point() {
        for d in [3u32, 6] {
            let n = 5;
            // First Gaussian drops x(1/2) to -1; everything else is zero, so
            // every grid is a V with its unique minimum at the centre.
            let mut first = true;
            let mut g = move || {
                if core::mem::take(&mut first) {
                    -2.0
                } else {
                    0.0
                }
            };
            let mut u = CounterStream::new(0);
            let p = RunParams::new(d, n);
            let r = run_standalone(&p, &mut g, &mut u).unwrap();
            assert_eq!(r.cert1, Verdict::Green);
            assert!(r.is_green());
            assert_eq!(r.t_stars, alloc::vec![0.5; n as usize + 1]);
            assert_eq!(r.estimate_f64(), 0.5);
            assert_eq!(r.level_arrays.len(), n as usize);
        }
    }

    #[test]
    fn flat_path_aborts_at_level_one() {
        let mut u = CounterStream::new(0);
        let r = run_standalone(&RunParams::new(5, 3), &mut zeros(), &mut u).unwrap();
        assert_eq!(r.t_stars, alloc::vec![0.0]);
        assert_eq!(r.cert1, Verdict::RedX);
        assert_eq!(
            r.abort,
            Some(Abort {
                level: 1,
                certificate: Certificate::Window
            })
        );
        assert_eq!(r.final_state.argmin, 0);
        assert_eq!(r.level_arrays.len(), 1);
    }

    #[test]
    fn rejects_shallow_depth() {
        let mut u = CounterStream::new(0);
        assert_eq!(
            run_standalone(&RunParams::new(2, 1), &mut zeros(), &mut u),
            Err(Error::DepthTooSmall(2))
        );
        assert_eq!(
            run_standalone(&RunParams::new(4, 0), &mut zeros(), &mut u),
            Err(Error::NoLevels)
        );
    }

    #[test]
    fn zoom_map_examples() {
        let mut s = ZoomState {
            level: 0,
            depth: 4,
            values: alloc::vec![0.0; 17],
            argmin: 0,
            t_star: 0.0,
            scale: 1.0,
            origin: DyadicTime::ZERO,
            anchor_value: 0.0,
        };
        assert_eq!(s.zoom_to_global(5).unwrap(), DyadicTime::new(5, 4));
        assert_eq!(s.zoom_to_global(16).unwrap(), DyadicTime::ZERO);
        assert!(s.zoom_to_global(17).is_err());

        // n = 1 with t*_0 = 1/2: origin = 1/2 - 1/4.
        s.level = 1;
        s.origin = DyadicTime::new(1, 2);
        assert_eq!(s.zoom_to_global(8).unwrap(), DyadicTime::new(1, 1));

        // n = 2, t*_0 = 1/2, t*_1 = 5/8: U_1 = 9/16, origin = U_1 - 1/8.
        s.level = 2;
        s.origin = DyadicTime::new(9, 4).sub(DyadicTime::new(1, 3));
        let t = s.zoom_to_global(8).unwrap();
        assert_eq!(t.to_f64(), 0.5625);
        assert_eq!(t.to_f64(), accumulate_estimate(&[0.5, 0.625], 1).unwrap());
    }

    #[test]
    fn scale_values() {
        assert_eq!(zoom_scale(0), 1.0);
        assert_eq!(zoom_scale(2), 2.0);
        assert_eq!(zoom_scale(1), core::f64::consts::SQRT_2);
        assert_eq!(zoom_scale(5), 4.0 * core::f64::consts::SQRT_2);
    }
}
