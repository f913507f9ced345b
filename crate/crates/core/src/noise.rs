//! Counter-based randomness.
//!
//! Every variate is a pure function of a 64-bit seed and a key, so two
//! consumers that ask for the same key see the same number regardless of
//! request order. The mixing function is the SplitMix64 finalizer.

use crate::dyadic::DyadicTime;
use crate::math;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
const TAG_GAUSSIAN: u64 = 0x6761_7573_7369_616e;
const TAG_UNIFORM: u64 = 0x756e_6966_6f72_6d00;

/// SplitMix64 finalizer.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one well-mixed seed.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(GOLDEN_GAMMA), |acc, &p| {
        mix64(acc.wrapping_add(GOLDEN_GAMMA) ^ mix64(p.wrapping_add(GOLDEN_GAMMA)))
    })
}

/// Maps 64 random bits to the open interval `(0, 1)`.
#[inline]
pub fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// One standard normal from two uniforms (Box-Muller, cosine branch).
#[inline]
pub fn box_muller(u1: f64, u2: f64) -> f64 {
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

#[inline]
fn gaussian_from_key(key: u64) -> f64 {
    let a = mix64(key);
    let b = mix64(a ^ GOLDEN_GAMMA);
    box_muller(unit_open(a), unit_open(b))
}

/// A key-addressed noise field.
///
/// Implementations must be pure: the same key always yields the same value.
pub trait KeyedNoise {
    /// Standard normal attached to the canonical time `t`.
    fn gaussian(&self, t: DyadicTime) -> f64;

    /// Uniform on `(0, 1)` attached to zoom level `level`, interval `k`.
    fn uniform(&self, level: u32, k: u64) -> f64;

    /// A bound on `|gaussian(t)|` over all keys, if the field has one.
    fn gaussian_bound(&self) -> Option<f64> {
        None
    }
}

/// Largest magnitude [`box_muller`] can return on outputs of [`unit_open`],
/// rounded up.
pub fn box_muller_bound() -> f64 {
    math::sqrt(-2.0 * math::ln(unit_open(0))) * (1.0 + 1e-9)
}

/// The default keyed noise: SplitMix64 hashes of `(seed, key)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededNoise {
    seed: u64,
}

impl SeededNoise {
    /// Noise field for `seed`.
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// The seed.
    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl KeyedNoise for SeededNoise {
    #[inline]
    fn gaussian(&self, t: DyadicTime) -> f64 {
        let key = mix64(mix64(self.seed ^ TAG_GAUSSIAN) ^ u64::from(t.level())) ^ t.num();
        gaussian_from_key(key)
    }

    #[inline]
    fn uniform(&self, level: u32, k: u64) -> f64 {
        let key = mix64(mix64(self.seed ^ TAG_UNIFORM) ^ u64::from(level)) ^ k;
        unit_open(mix64(key))
    }

    fn gaussian_bound(&self) -> Option<f64> {
        Some(box_muller_bound())
    }
}

/// A sequential source of standard normals.
pub trait GaussianSource {
    /// Next standard normal.
    fn next_gaussian(&mut self) -> f64;
}

/// A sequential source of uniforms on `(0, 1)`.
pub trait UniformSource {
    /// Next uniform variate.
    fn next_uniform(&mut self) -> f64;
}

impl<F: FnMut() -> f64> GaussianSource for F {
    fn next_gaussian(&mut self) -> f64 {
        self()
    }
}

/// A counter-based stream: the `i`-th draw is a hash of `(seed, i)`.
#[derive(Debug, Clone)]
pub struct CounterStream {
    seed: u64,
    counter: u64,
}

impl CounterStream {
    /// Stream starting at counter zero.
    pub fn new(seed: u64) -> Self {
        Self {
            seed: mix64(seed ^ GOLDEN_GAMMA),
            counter: 0,
        }
    }

    /// Number of draws taken so far (Gaussian and uniform alike).
    pub fn draws(&self) -> u64 {
        self.counter
    }

    #[inline]
    fn next_key(&mut self) -> u64 {
        self.counter += 1;
        self.seed
            .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA))
    }
}

impl GaussianSource for CounterStream {
    #[inline]
    fn next_gaussian(&mut self) -> f64 {
        let key = self.next_key();
        gaussian_from_key(key)
    }
}

impl UniformSource for CounterStream {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        let key = self.next_key();
        unit_open(mix64(key))
    }
}
