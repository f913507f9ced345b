//! Monte Carlo checks of the probabilistic facts the search relies on:
//! the bridge covariance, the sub-interval minimum law, the Vervaat and
//! Williams transforms, the Bessel(3) tail-minimum law, the running-maximum
//! bound, the corollary bound, and Pitman's duality.
//!
//! Each check yields a [`CheckReport`]; suites bundle the checks and are
//! what `bbargmin validate` runs. Every trial draws from its own generator
//! seeded by `(suite seed, check tag, trial index)`, so reports do not depend
//! on the thread count.

use std::f64::consts::PI;

use bbargmin_core::noise::{derive_seed, mix64, unit_open};
use bbargmin_core::{
    grid_argmin, init, interval_min_cdf, run_certificate2, sample_interval_min, CounterStream,
    LazyBridgePath, NoiseConvention, SeededNoise,
};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::brownian::{
    add, bessel3_running_max, bessel3_tail_min, bm_running_max, gaussian_vector, grid_norm_max,
    grid_norm_min, grid_steps, simulate_bessel3,
};
use crate::error::{Error, Result};
use crate::stats::{
    binomial_sigma, chi3_cdf, chi3_mean, covariance, half_normal_cdf, ks_one_sample, ks_two_sample,
    mean_var, normal_cdf, quantile, KsResult,
};

/// Significance level of every Kolmogorov-Smirnov check.
pub const KS_ALPHA: f64 = 0.01;

/// `Q_KS(lambda) = 0.01`.
const KS_LAMBDA_AT_ALPHA: f64 = 1.627_61;

/// One line of a validation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    /// Check identifier.
    pub name: String,
    /// Measured quantity (a KS statistic for distribution checks).
    pub empirical: f64,
    /// Reference value or bound.
    pub analytic_or_bound: f64,
    /// Allowed deviation (the critical statistic for KS checks).
    pub tolerance: f64,
    /// Verdict.
    pub pass: bool,
}

impl CheckReport {
    fn within(name: impl Into<String>, empirical: f64, analytic: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            analytic_or_bound: analytic,
            tolerance,
            pass: (empirical - analytic).abs() <= tolerance,
        }
    }

    fn at_most(name: impl Into<String>, empirical: f64, bound: f64, margin: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            analytic_or_bound: bound,
            tolerance: margin,
            pass: empirical <= bound + margin,
        }
    }

    fn ks(name: impl Into<String>, ks: KsResult, effective_n: f64) -> Self {
        let root = effective_n.sqrt();
        Self {
            name: name.into(),
            empirical: ks.statistic,
            analytic_or_bound: 0.0,
            tolerance: KS_LAMBDA_AT_ALPHA / (root + 0.12 + 0.11 / root),
            pass: ks.passes(KS_ALPHA),
        }
    }
}

/// Validation suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Bridge covariance and convention checks.
    Bridge,
    /// Bessel(3) moments, scaling, tail minimum, running maximum, corollary.
    Bessel,
    /// Vervaat transform and the Williams marginal.
    Vervaat,
    /// Pitman duality and the long-horizon tail minimum.
    Pitman,
    /// Sub-interval minimum sampling and certificate-2 properties.
    Certificate2,
    /// Everything above.
    All,
}

impl Suite {
    /// Individual suites in report order.
    pub const EACH: [Suite; 5] = [
        Suite::Bridge,
        Suite::Bessel,
        Suite::Vervaat,
        Suite::Pitman,
        Suite::Certificate2,
    ];

    /// Parses a suite name.
    pub fn parse(name: &str) -> Option<Suite> {
        Some(match name {
            "bridge" => Suite::Bridge,
            "bessel" => Suite::Bessel,
            "vervaat" => Suite::Vervaat,
            "pitman" => Suite::Pitman,
            "certificate2" => Suite::Certificate2,
            "all" => Suite::All,
            _ => return None,
        })
    }
}

/// Sample sizes and simulation grids.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    /// Suite seed.
    pub seed: u64,
    /// Bridge paths for covariance checks.
    pub bridge_paths: usize,
    /// Grid level of the covariance checks.
    pub bridge_level: u32,
    /// Bessel paths for moments, tail minima, maxima and the corollary.
    pub bessel_paths: usize,
    /// Grid spacing for the tail-minimum, running-maximum and corollary checks.
    pub dt: f64,
    /// Horizon for the tail-minimum and corollary checks.
    pub horizon: f64,
    /// Tail-minimum tolerance.
    pub tail_min_tolerance: f64,
    /// Bridges for the Vervaat checks.
    pub vervaat_bridges: usize,
    /// Grid level of the Vervaat bridges.
    pub vervaat_level: u32,
    /// Samples per law in the Pitman checks.
    pub pitman_samples: usize,
    /// Samples per law at `t0 = 4` for the scaling check.
    pub pitman_scaling_samples: usize,
    /// Grid spacing of the Pitman checks.
    pub pitman_dt: f64,
    /// Horizon of the Bessel tail minimum in the Pitman checks.
    pub pitman_horizon: f64,
    /// Random draws for the inversion round trip.
    pub reflection_draws: usize,
    /// Samples for the sub-interval minimum law.
    pub interval_min_samples: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            bridge_paths: 20_000,
            bridge_level: 10,
            bessel_paths: 100_000,
            dt: 1e-4,
            horizon: 50.0,
            tail_min_tolerance: 0.015,
            vervaat_bridges: 10_000,
            vervaat_level: 12,
            pitman_samples: 100_000,
            pitman_scaling_samples: 20_000,
            pitman_dt: 1e-6,
            pitman_horizon: 1e6,
            reflection_draws: 100_000,
            interval_min_samples: 100_000,
        }
    }
}

fn trial_rng(seed: u64, tag: u64, trial: usize) -> SmallRng {
    SmallRng::seed_from_u64(derive_seed(&[seed, tag, trial as u64]))
}

/// Draws `n` samples in parallel; sample `i` uses its own generator.
fn par_samples<T, F>(n: usize, seed: u64, tag: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SmallRng) -> Result<T> + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| f(&mut trial_rng(seed, tag, i)))
        .collect()
}

fn fraction<F: Fn(f64) -> bool>(xs: &[f64], pred: F) -> f64 {
    xs.iter().filter(|&&x| pred(x)).count() as f64 / xs.len() as f64
}

fn require_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be positive".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------- bridge

/// Bridge values at `k / 2^level` for `paths` independent seeded paths, with
/// the periodic endpoint appended.
pub fn bridge_grids(
    paths: usize,
    level: u32,
    convention: NoiseConvention,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    (0..paths)
        .into_par_iter()
        .map(|i| {
            let noise = SeededNoise::new(derive_seed(&[seed, 0xb1, i as u64]));
            let path = LazyBridgePath::with_config(noise, convention, level.max(1));
            let mut grid = path.refine_full(level)?;
            grid.push(grid[0]);
            Ok(grid)
        })
        .collect()
}

fn column(grids: &[Vec<f64>], k: usize) -> Vec<f64> {
    grids.iter().map(|g| g[k]).collect()
}

/// `Var B(1/2)` and the covariances at `{1/4, 1/2, 3/4}^2`.
pub fn bridge_covariance_checks(cfg: &ValidationConfig) -> Result<Vec<CheckReport>> {
    let level = cfg.bridge_level;
    let grids = bridge_grids(
        cfg.bridge_paths,
        level,
        NoiseConvention::default(),
        cfg.seed,
    )?;
    let at = |q: u64| (q << level) as usize / 4;
    let mut out = Vec::new();
    let half = column(&grids, at(2));
    out.push(CheckReport::within(
        "bridge_var_half",
        mean_var(&half).1,
        0.25,
        0.01,
    ));
    for qs in 1..=3u64 {
        for qt in 1..=3u64 {
            let (s, t) = (qs as f64 / 4.0, qt as f64 / 4.0);
            let cov = covariance(&column(&grids, at(qs)), &column(&grids, at(qt)));
            out.push(CheckReport::within(
                format!("bridge_cov_{s}_{t}"),
                cov,
                s.min(t) - s * t,
                0.01,
            ));
        }
    }
    Ok(out)
}

/// Largest deviation of `Var(xs[k])` from `t_k (1 - t_k)` over the grid of
/// [`init`], across `paths` standalone initializations.
pub fn init_marginal_check(cfg: &ValidationConfig) -> Result<CheckReport> {
    let d = cfg.bridge_level;
    let paths: Vec<Vec<f64>> = (0..cfg.bridge_paths)
        .into_par_iter()
        .map(|i| {
            let mut s = CounterStream::new(derive_seed(&[cfg.seed, 0xb2, i as u64]));
            Ok(init(d, &mut s, NoiseConvention::default())?.0)
        })
        .collect::<Result<_>>()?;
    let cells = 1usize << d;
    let worst = (0..=cells)
        .map(|k| {
            let t = k as f64 / cells as f64;
            (mean_var(&column(&paths, k)).1 - t * (1.0 - t)).abs()
        })
        .fold(0.0, f64::max);
    Ok(CheckReport::within(
        "init_marginal_variance",
        worst,
        0.0,
        0.01,
    ))
}

/// `Var B(1/2)` under the literal coefficient; expected near 0.5.
pub fn paper_literal_variance_check(cfg: &ValidationConfig) -> Result<CheckReport> {
    let level = cfg.bridge_level;
    let grids = bridge_grids(
        cfg.bridge_paths,
        level,
        NoiseConvention::PaperLiteral,
        cfg.seed ^ 0x5a5a,
    )?;
    let half = column(&grids, 1 << (level - 1));
    Ok(CheckReport::within(
        "paper_literal_var_half",
        mean_var(&half).1,
        0.5,
        0.02,
    ))
}

// ---------------------------------------------------------------- bessel

/// `E[Y(1)]` against `2 sqrt(2/pi)`.
pub fn bessel_mean_check(cfg: &ValidationConfig) -> Result<CheckReport> {
    let ys = par_samples(cfg.bessel_paths, cfg.seed, 0xc1, |rng| {
        Ok(*simulate_bessel3(1.0, 1.0, rng)?.values.last().unwrap())
    })?;
    Ok(CheckReport::within(
        "bessel_mean_y1",
        mean_var(&ys).0,
        chi3_mean(),
        0.02,
    ))
}

/// `Y(4) / 2` against `Y(1)`, two-sample KS.
pub fn bessel_scaling_check(cfg: &ValidationConfig) -> Result<CheckReport> {
    let n = cfg.bessel_paths;
    let y1 = par_samples(n, cfg.seed, 0xc2, |rng| {
        Ok(*simulate_bessel3(1.0, 1.0, rng)?.values.last().unwrap())
    })?;
    let y4 = par_samples(n, cfg.seed, 0xc3, |rng| {
        Ok(0.5 * simulate_bessel3(1.0, 4.0, rng)?.values.last().unwrap())
    })?;
    Ok(CheckReport::ks(
        "bessel_scaling_c4",
        ks_two_sample(&y1, &y4),
        n as f64 / 2.0,
    ))
}

/// `2 Phi(z) - 1`: the probability that a Bessel(3) path from 0 ever
/// returns below `z` after time 1.
pub fn tail_min_law(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        2.0 * normal_cdf(z) - 1.0
    }
}

/// `2 z / sqrt(2 pi)`, the linear bound on [`tail_min_law`].
pub fn tail_min_linear_bound(z: f64) -> f64 {
    2.0 * z / (2.0 * PI).sqrt()
}

/// Grid minima of `|W|` over `[1, horizon]` for `trials` paths.
pub fn tail_min_samples(
    trials: usize,
    dt: f64,
    horizon: f64,
    seed: u64,
    tag: u64,
) -> Result<Vec<f64>> {
    require_trials(trials)?;
    grid_steps(horizon - 1.0, dt)?;
    par_samples(trials, seed, tag, |rng| {
        bessel3_tail_min(1.0, horizon, dt, rng)
    })
}

/// Tail-minimum comparison on precomputed minima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailMinCheck {
    /// Fraction of minima at or below `z`.
    pub empirical: f64,
    /// `2 Phi(z) - 1`.
    pub analytic: f64,
    /// `|empirical - analytic| <= tolerance`.
    pub pass: bool,
}

/// Compares the empirical law of `minima` with [`tail_min_law`] at `z`.
pub fn tail_min_check_from(minima: &[f64], z: f64, tolerance: f64) -> TailMinCheck {
    let empirical = fraction(minima, |m| m <= z);
    let analytic = tail_min_law(z);
    TailMinCheck {
        empirical,
        analytic,
        pass: (empirical - analytic).abs() <= tolerance,
    }
}

/// Simulates `trials` Bessel(3) paths on the `dt` grid up to `horizon` and
/// compares `P(min_{[1, horizon]} Y <= z)` with `2 Phi(z) - 1`.
pub fn lemma_tail_min_check(
    z: f64,
    trials: usize,
    dt: f64,
    horizon: f64,
    tolerance: f64,
    seed: u64,
) -> Result<TailMinCheck> {
    if !(z > 0.0) {
        return Err(Error::Invalid(format!("z must be positive (got {z})")));
    }
    let minima = tail_min_samples(trials, dt, horizon, seed, 0xd1)?;
    Ok(tail_min_check_from(&minima, z, tolerance))
}

/// `18 exp(-z^2/18) / (z sqrt(2 pi))`.
pub fn running_max_bound(z: f64) -> f64 {
    18.0 * (-z * z / 18.0).exp() / (z * (2.0 * PI).sqrt())
}

/// `6 P(Z > z/3)`, the intermediate bound.
pub fn running_max_intermediate_bound(z: f64) -> f64 {
    6.0 * (1.0 - normal_cdf(z / 3.0))
}

/// Running-maximum comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxBoundCheck {
    /// Fraction of paths with `max_{[0,1]} Y >= z`.
    pub empirical: f64,
    /// [`running_max_bound`].
    pub bound: f64,
    /// [`running_max_intermediate_bound`].
    pub intermediate: f64,
    /// `empirical` below both bounds.
    pub pass: bool,
}

/// Grid maxima of `|W|` over `[0, 1]`.
pub fn running_max_samples(trials: usize, dt: f64, seed: u64) -> Result<Vec<f64>> {
    require_trials(trials)?;
    grid_steps(1.0, dt)?;
    par_samples(trials, seed, 0xd2, |rng| bessel3_running_max(1.0, dt, rng))
}

/// Checks the one-sided running-maximum bound on precomputed maxima.
pub fn max_bound_check_from(maxima: &[f64], z: f64) -> MaxBoundCheck {
    let empirical = fraction(maxima, |m| m >= z);
    let bound = running_max_bound(z);
    let intermediate = running_max_intermediate_bound(z);
    MaxBoundCheck {
        empirical,
        bound,
        intermediate,
        pass: empirical <= bound && empirical <= intermediate,
    }
}

/// Simulates `trials` paths and checks `P(max_{[0,1]} Y >= z)` against the
/// displayed bounds.
pub fn max_bound_check(z: f64, trials: usize, dt: f64, seed: u64) -> Result<MaxBoundCheck> {
    if !(z > 0.0) {
        return Err(Error::Invalid(format!("z must be positive (got {z})")));
    }
    Ok(max_bound_check_from(
        &running_max_samples(trials, dt, seed)?,
        z,
    ))
}

/// Parameters of the corollary bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorollaryParams {
    /// Length of the initial window.
    pub eps: f64,
    /// Start of the tail window.
    pub a: f64,
    /// Squared multiplier on the initial maximum.
    pub lambda: f64,
}

impl CorollaryParams {
    /// Validated parameters: `eps > 0`, `a > eps`, `lambda > 0` and
    /// `a / (eps lambda) > 1`.
    pub fn new(eps: f64, a: f64, lambda: f64) -> Result<Self> {
        if !(eps > 0.0 && a > eps && lambda > 0.0 && a / (eps * lambda) > 1.0) {
            return Err(Error::Invalid(format!(
                "corollary needs eps > 0, a > eps, lambda > 0, a > eps lambda \
                 (eps = {eps}, a = {a}, lambda = {lambda})"
            )));
        }
        Ok(Self { eps, a, lambda })
    }

    /// `(1/3) sqrt( (2 eps lambda / (pi a)) ln(a / (eps lambda)) )`.
    pub fn bound(&self) -> f64 {
        let r = self.eps * self.lambda / self.a;
        (2.0 * r / PI * (1.0 / r).ln()).sqrt() / 3.0
    }

    /// Subset bound from [`tail_min_linear_bound`] and [`running_max_bound`]
    /// with the split point `z^2 = 9 eps lambda ln(a / (eps lambda))`:
    /// `3 sqrt(2 r L / pi) + 6 sqrt(r) / sqrt(2 pi L)`, `r = eps lambda / a`,
    /// `L = ln(1 / r)`.
    pub fn subset_bound(&self) -> f64 {
        let r = self.eps * self.lambda / self.a;
        let l = (1.0 / r).ln();
        3.0 * (2.0 * r * l / PI).sqrt() + 6.0 * r.sqrt() / (2.0 * PI * l).sqrt()
    }
}

/// Corollary comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryCheck {
    /// Fraction of paths with `min_{[a,T]} Y <= sqrt(lambda) max_{[0,eps]} Y`.
    pub empirical: f64,
    /// [`CorollaryParams::bound`].
    pub bound: f64,
    /// Three binomial standard deviations at `bound`.
    pub margin: f64,
    /// `empirical <= bound + margin`.
    pub pass: bool,
}

/// Simulates the event of the corollary on one path per trial.
pub fn corollary_bound_check(
    p: CorollaryParams,
    trials: usize,
    dt: f64,
    horizon: f64,
    seed: u64,
) -> Result<CorollaryCheck> {
    require_trials(trials)?;
    let head = grid_steps(p.eps, dt)?;
    let tail = grid_steps(horizon - p.a, dt)?;
    let hits = par_samples(trials, seed, 0xd3, |rng| {
        let w_eps: [f64; 3] = gaussian_vector(p.eps.sqrt(), rng);
        let w_a = add(&w_eps, &gaussian_vector((p.a - p.eps).sqrt(), rng));
        let w_t = add(&w_a, &gaussian_vector((horizon - p.a).sqrt(), rng));
        let head_max = grid_norm_max([0.0; 3], w_eps, head, dt, rng);
        let tail_min = grid_norm_min(w_a, w_t, tail, dt, rng);
        Ok(if tail_min <= p.lambda.sqrt() * head_max {
            1.0
        } else {
            0.0
        })
    })?;
    let empirical = hits.iter().sum::<f64>() / trials as f64;
    let bound = p.bound();
    let margin = 3.0 * binomial_sigma(bound, trials);
    Ok(CorollaryCheck {
        empirical,
        bound,
        margin,
        pass: empirical <= bound + margin,
    })
}

// --------------------------------------------------------------- vervaat

/// Rotates a circular bridge so that its grid minimum sits at time 0 and
/// subtracts the minimum.
///
/// `xs` holds `2^L + 1` values with `xs[0] == xs[2^L]`.
pub fn vervaat_transform(xs: &[f64]) -> Result<Vec<f64>> {
    let cells = xs.len().saturating_sub(1);
    if cells == 0 || !cells.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "need 2^L + 1 values, got {}",
            xs.len()
        )));
    }
    if xs[0] != xs[cells] {
        return Err(Error::Invalid(format!(
            "endpoints differ: {} vs {}",
            xs[0], xs[cells]
        )));
    }
    let k = grid_argmin(xs)?;
    let base = xs[k];
    Ok((0..=cells).map(|j| xs[(k + j) % cells] - base).collect())
}

/// Nonnegativity of every Vervaat transform, and the Williams marginal
/// `2 e(1/2) ~ chi_3` by one-sample KS.
pub fn vervaat_checks(cfg: &ValidationConfig) -> Result<Vec<CheckReport>> {
    let level = cfg.vervaat_level;
    let cells = 1usize << level;
    let grids = bridge_grids(
        cfg.vervaat_bridges,
        level,
        NoiseConvention::default(),
        cfg.seed ^ 0x7e7e,
    )?;
    let transformed: Vec<Vec<f64>> = grids
        .par_iter()
        .map(|g| vervaat_transform(g))
        .collect::<Result<_>>()?;
    let violations = transformed
        .iter()
        .filter(|e| e[0] != 0.0 || e[cells] != 0.0 || e.iter().any(|&v| v < 0.0))
        .count();
    let mids: Vec<f64> = transformed.iter().map(|e| 2.0 * e[cells / 2]).collect();
    Ok(vec![
        CheckReport::at_most("vervaat_nonnegative", violations as f64, 0.0, 0.0),
        CheckReport::ks(
            "williams_chi3_ks",
            ks_one_sample(&mids, chi3_cdf),
            mids.len() as f64,
        ),
    ])
}

// ---------------------------------------------------------------- pitman

/// Pitman samples and the derived checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PitmanReport {
    /// Grid maxima of Brownian motion over `[0, t0]`.
    pub bm_max: Vec<f64>,
    /// Grid minima of Bessel(3) over `[t0, horizon]`.
    pub bessel_min: Vec<f64>,
    /// Two-sample KS between the two laws.
    pub two_sample: KsResult,
    /// One-sample KS of `bm_max` against `|N(0, t0)|`.
    pub bm_vs_half_normal: KsResult,
    /// One-sample KS of `bessel_min` against `|N(0, t0)|`.
    pub bessel_vs_half_normal: KsResult,
    /// All three tests kept at [`KS_ALPHA`].
    pub pass: bool,
}

/// Samples both sides of the duality at time `t0` and tests them against
/// each other and against the half-normal law.
pub fn pitman_duality_check(
    trials: usize,
    dt: f64,
    t0: f64,
    horizon: f64,
    seed: u64,
) -> Result<PitmanReport> {
    require_trials(trials)?;
    if !(t0 > 0.0 && horizon > t0) {
        return Err(Error::Invalid(format!(
            "need 0 < t0 < horizon (t0 = {t0}, horizon = {horizon})"
        )));
    }
    grid_steps(t0, dt)?;
    grid_steps(horizon - t0, dt)?;
    let tag = t0.to_bits();
    let bm_max = par_samples(trials, seed, 0xe1 ^ tag, |rng| bm_running_max(t0, dt, rng))?;
    let bessel_min = par_samples(trials, seed, 0xe2 ^ tag, |rng| {
        bessel3_tail_min(t0, horizon, dt, rng)
    })?;
    let sd = t0.sqrt();
    let two_sample = ks_two_sample(&bm_max, &bessel_min);
    let bm_vs_half_normal = ks_one_sample(&bm_max, |x| half_normal_cdf(x, sd));
    let bessel_vs_half_normal = ks_one_sample(&bessel_min, |x| half_normal_cdf(x, sd));
    let pass = two_sample.passes(KS_ALPHA)
        && bm_vs_half_normal.passes(KS_ALPHA)
        && bessel_vs_half_normal.passes(KS_ALPHA);
    Ok(PitmanReport {
        bm_max,
        bessel_min,
        two_sample,
        bm_vs_half_normal,
        bessel_vs_half_normal,
        pass,
    })
}

/// Median of `|N(0, 1)|`.
pub const HALF_NORMAL_MEDIAN: f64 = 0.674_489_750_196_081_7;

fn pitman_checks(cfg: &ValidationConfig) -> Result<Vec<CheckReport>> {
    let n = cfg.pitman_samples;
    let one = pitman_duality_check(n, cfg.pitman_dt, 1.0, cfg.pitman_horizon, cfg.seed)?;
    let four = pitman_duality_check(
        cfg.pitman_scaling_samples,
        cfg.pitman_dt,
        4.0,
        4.0 * cfg.pitman_horizon,
        cfg.seed,
    )?;
    let mut out = vec![
        CheckReport::ks("pitman_two_sample_ks", one.two_sample, n as f64 / 2.0),
        CheckReport::ks(
            "pitman_bm_max_half_normal_ks",
            one.bm_vs_half_normal,
            n as f64,
        ),
        CheckReport::ks(
            "pitman_bessel_min_half_normal_ks",
            one.bessel_vs_half_normal,
            n as f64,
        ),
        CheckReport::within(
            "pitman_median_bm_max",
            quantile(&one.bm_max, 0.5),
            HALF_NORMAL_MEDIAN,
            0.01,
        ),
        CheckReport::within(
            "pitman_median_bessel_min",
            quantile(&one.bessel_min, 0.5),
            HALF_NORMAL_MEDIAN,
            0.01,
        ),
        CheckReport::within(
            "pitman_scaling_bm_max_t0_4",
            quantile(&four.bm_max, 0.5) / quantile(&one.bm_max, 0.5),
            2.0,
            0.05,
        ),
        CheckReport::within(
            "pitman_scaling_bessel_min_t0_4",
            quantile(&four.bessel_min, 0.5) / quantile(&one.bessel_min, 0.5),
            2.0,
            0.05,
        ),
    ];
    // The same minima, read as the tail minimum after time 1 with a horizon
    // long enough for truncation to be negligible.
    for z in [0.25, 0.5, 1.0] {
        let c = tail_min_check_from(&one.bessel_min, z, cfg.tail_min_tolerance);
        out.push(CheckReport::within(
            format!("lemma_tail_min_long_horizon_z{z}"),
            c.empirical,
            c.analytic,
            cfg.tail_min_tolerance,
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------- certificate 2

/// Largest `|cdf(sample(u)) - u|` over random `(x, y, h, u)`.
pub fn reflection_round_trip_error(draws: usize, seed: u64) -> Result<f64> {
    // Endpoints differ by a Brownian increment over h, as on a bridge grid.
    // Error scales like |x - y| ulp(x) / h, so gaps of many standard
    // deviations are not representative.
    let errors = par_samples(draws, seed, 0xf1, |rng| {
        let h = f64::from(rng.random_range(-20i32..=1)).exp2();
        let x = rng.random_range(-3.0..3.0);
        let g: f64 = rng.sample(rand_distr::StandardNormal);
        let y = x + h.sqrt() * g;
        let u = unit_open(rng.random());
        let m = sample_interval_min(x, y, h, u)?;
        Ok((interval_min_cdf(x, y, m, h)? - u).abs())
    })?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

/// Sub-interval minimum checks.
pub fn certificate2_checks(cfg: &ValidationConfig) -> Result<Vec<CheckReport>> {
    let seed = cfg.seed;
    let mut out = vec![CheckReport::at_most(
        "reflection_round_trip",
        reflection_round_trip_error(cfg.reflection_draws, seed)?,
        1e-9,
        0.0,
    )];

    // x = y = 0, h = 1: P(M <= z) = exp(-2 z^2) for z <= 0.
    let minima = par_samples(cfg.interval_min_samples, seed, 0xf2, |rng| {
        Ok(sample_interval_min(0.0, 0.0, 1.0, unit_open(rng.random()))?)
    })?;
    let law = |z: f64| if z >= 0.0 { 1.0 } else { (-2.0 * z * z).exp() };
    out.push(CheckReport::ks(
        "interval_min_law_ks",
        ks_one_sample(&minima, law),
        minima.len() as f64,
    ));

    let monotone_violations = par_samples(10_000, seed, 0xf3, |rng| {
        let x = rng.random_range(-3.0..3.0);
        let y = rng.random_range(-3.0..3.0);
        let h = rng.random_range(1e-6..2.0);
        let (a, b) = (unit_open(rng.random()), unit_open(rng.random()));
        let (u1, u2) = if a < b { (a, b) } else { (b, a) };
        Ok(sample_interval_min(x, y, h, u1)? > sample_interval_min(x, y, h, u2)?)
    })?
    .into_iter()
    .filter(|&v| v)
    .count();
    out.push(CheckReport::at_most(
        "interval_min_monotone",
        monotone_violations as f64,
        0.0,
        0.0,
    ));

    let shift_violations = par_samples(2_000, seed, 0xf4, |rng| {
        let d = 6;
        let mut s = CounterStream::new(rng.random());
        let (xs, _) = init(d, &mut s, NoiseConvention::default())?;
        let k = grid_argmin(&xs)?;
        let shift = f64::from(rng.random_range(-64i32..64));
        let shifted: Vec<f64> = xs.iter().map(|v| v + shift).collect();
        let key: u64 = rng.random();
        let u = |i: usize| unit_open(mix64(key ^ i as u64));
        let a = run_certificate2(&xs, k, d, u)?;
        let b = run_certificate2(&shifted, k, d, u)?;
        Ok(a.verdict != b.verdict)
    })?
    .into_iter()
    .filter(|&v| v)
    .count();
    out.push(CheckReport::at_most(
        "certificate2_shift_invariance",
        shift_violations as f64,
        0.0,
        0.0,
    ));
    Ok(out)
}

// ----------------------------------------------------------------- suites

fn bessel_checks(cfg: &ValidationConfig) -> Result<Vec<CheckReport>> {
    let mut out = vec![bessel_mean_check(cfg)?, bessel_scaling_check(cfg)?];

    let minima = tail_min_samples(cfg.bessel_paths, cfg.dt, cfg.horizon, cfg.seed, 0xd1)?;
    for z in [0.25, 0.5, 1.0] {
        let c = tail_min_check_from(&minima, z, cfg.tail_min_tolerance);
        out.push(CheckReport::within(
            format!("lemma_tail_min_z{z}"),
            c.empirical,
            c.analytic,
            cfg.tail_min_tolerance,
        ));
        out.push(CheckReport::at_most(
            format!("lemma_linear_bound_z{z}"),
            c.analytic,
            tail_min_linear_bound(z),
            0.0,
        ));
    }

    let maxima = running_max_samples(cfg.bessel_paths, cfg.dt, cfg.seed)?;
    for z in [4.0, 6.0] {
        let c = max_bound_check_from(&maxima, z);
        out.push(CheckReport::at_most(
            format!("running_max_bound_z{z}"),
            c.empirical,
            c.bound,
            0.0,
        ));
        out.push(CheckReport::at_most(
            format!("running_max_intermediate_bound_z{z}"),
            c.empirical,
            c.intermediate,
            0.0,
        ));
    }

    let c = corollary_bound_check(
        CorollaryParams::new(0.01, 1.0, 1.0)?,
        cfg.bessel_paths,
        cfg.dt,
        cfg.horizon,
        cfg.seed,
    )?;
    out.push(CheckReport::at_most(
        "corollary_eps0.01_a1_lambda1",
        c.empirical,
        c.bound,
        c.margin,
    ));
    out.push(CheckReport::at_most(
        "corollary_subset_bound_eps0.01_a1_lambda1",
        c.empirical,
        CorollaryParams::new(0.01, 1.0, 1.0)?.subset_bound(),
        c.margin,
    ));
    Ok(out)
}

/// Runs one suite (or all of them) and returns the report lines.
pub fn run_suite(suite: Suite, cfg: &ValidationConfig) -> Result<Vec<CheckReport>> {
    match suite {
        Suite::Bridge => {
            let mut out = bridge_covariance_checks(cfg)?;
            out.push(init_marginal_check(cfg)?);
            out.push(paper_literal_variance_check(cfg)?);
            Ok(out)
        }
        Suite::Bessel => bessel_checks(cfg),
        Suite::Vervaat => vervaat_checks(cfg),
        Suite::Pitman => pitman_checks(cfg),
        Suite::Certificate2 => certificate2_checks(cfg),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, cfg)?);
            }
            Ok(out)
        }
    }
}

/// Writes a report as a JSON array.
pub fn write_report<W: std::io::Write>(report: &[CheckReport], sink: W) -> Result<()> {
    serde_json::to_writer_pretty(sink, report)?;
    Ok(())
}
