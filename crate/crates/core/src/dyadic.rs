//! Exact dyadic rationals on the circle `R/Z`.

use core::fmt;

/// Largest level representable with a 64-bit numerator.
pub const MAX_REPRESENTABLE_LEVEL: u32 = 62;

/// A time `num / 2^level` taken mod 1, always stored in canonical form.
///
/// Canonical means `num` is odd, or the time is zero and stored as `(0, 0)`.
/// Two times are equal exactly when their canonical forms are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicTime {
    num: u64,
    level: u32,
}

#[allow(clippy::should_implement_trait)]
impl DyadicTime {
    /// Time zero (which is also time one).
    pub const ZERO: DyadicTime = DyadicTime { num: 0, level: 0 };

    /// Builds `num / 2^level mod 1` in canonical form.
    ///
    /// # Panics
    ///
    /// If `level` exceeds [`MAX_REPRESENTABLE_LEVEL`].
    pub fn new(num: u64, level: u32) -> Self {
        assert!(
            level <= MAX_REPRESENTABLE_LEVEL,
            "dyadic level {level} not representable"
        );
        canonicalize_raw(num & mask(level), level)
    }

    /// Builds `num / 2^level mod 1` from a signed numerator.
    pub fn from_signed(num: i64, level: u32) -> Self {
        assert!(
            level <= MAX_REPRESENTABLE_LEVEL,
            "dyadic level {level} not representable"
        );
        let modulus = 1i64 << level;
        DyadicTime::new(num.rem_euclid(modulus) as u64, level)
    }

    /// Numerator of the canonical form.
    pub fn num(self) -> u64 {
        self.num
    }

    /// Denominator exponent of the canonical form.
    pub fn level(self) -> u32 {
        self.level
    }

    /// Re-expresses the time as a numerator over `2^level`.
    ///
    /// Returns `None` when `level` is coarser than the canonical level.
    pub fn numerator_at(self, level: u32) -> Option<u64> {
        (level >= self.level && level <= MAX_REPRESENTABLE_LEVEL)
            .then(|| self.num << (level - self.level))
    }

    /// Sum mod 1.
    pub fn add(self, other: DyadicTime) -> DyadicTime {
        let level = self.level.max(other.level);
        let a = self.num << (level - self.level);
        let b = other.num << (level - other.level);
        DyadicTime::new(a.wrapping_add(b), level)
    }

    /// Difference mod 1.
    pub fn sub(self, other: DyadicTime) -> DyadicTime {
        let level = self.level.max(other.level);
        let a = self.num << (level - self.level);
        let b = other.num << (level - other.level);
        DyadicTime::new(a.wrapping_sub(b), level)
    }

    /// The nearest coarser grid points `(left, right)` bracketing an odd
    /// numerator: `(num - 1) / 2^level` and `(num + 1) / 2^level`.
    ///
    /// Returns `None` for time zero, which has no parents.
    pub fn parents(self) -> Option<(DyadicTime, DyadicTime)> {
        (self.level > 0).then(|| {
            (
                DyadicTime::new(self.num - 1, self.level),
                DyadicTime::new(self.num + 1, self.level),
            )
        })
    }

    /// The time as a float in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.level) as f64
    }
}

impl fmt::Display for DyadicTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.level)
    }
}

#[inline]
fn mask(level: u32) -> u64 {
    (1u64 << level) - 1
}

fn canonicalize_raw(num: u64, level: u32) -> DyadicTime {
    if num == 0 {
        return DyadicTime::ZERO;
    }
    let shift = num.trailing_zeros().min(level);
    DyadicTime {
        num: num >> shift,
        level: level - shift,
    }
}

/// Returns the canonical form of `num / 2^level` (taken mod 1).
pub fn canonicalize(num: u64, level: u32) -> DyadicTime {
    DyadicTime::new(num, level)
}

/// Distance on the circle: `min_z |a - b + z|`, always in `[0, 1/2]`.
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let mut diff = (a - b) % 1.0;
    if diff < 0.0 {
        diff += 1.0;
    }
    diff.min(1.0 - diff)
}
