//! Distribution functions and Kolmogorov-Smirnov tests.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erf;

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// `P(|Z| <= x)` for `Z ~ N(0, sd^2)`.
pub fn half_normal_cdf(x: f64, sd: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        erf(x / (sd * std::f64::consts::SQRT_2))
    }
}

/// Distribution function of the chi law with 3 degrees of freedom (the norm
/// of a standard normal vector in three dimensions).
pub fn chi3_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    erf(x / std::f64::consts::SQRT_2)
        - (2.0 / std::f64::consts::PI).sqrt() * x * (-0.5 * x * x).exp()
}

/// Mean of the chi law with 3 degrees of freedom, `2 sqrt(2/pi)`.
pub fn chi3_mean() -> f64 {
    2.0 * (2.0 / std::f64::consts::PI).sqrt()
}

/// Standard deviation of a binomial proportion estimate.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Outcome of a Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// Supremum distance between the distribution functions.
    pub statistic: f64,
    /// Asymptotic p-value.
    pub p_value: f64,
}

impl KsResult {
    /// Whether the null is kept at level `alpha`.
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value >= alpha
    }
}

/// Survival function of the Kolmogorov distribution,
/// `Q(l) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 l^2)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// p-value with the small-sample correction
/// `lambda = (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D`.
fn ks_p_value(statistic: f64, effective_n: f64) -> f64 {
    let root = effective_n.sqrt();
    kolmogorov_survival((root + 0.12 + 0.11 / root) * statistic)
}

fn sorted(data: &[f64]) -> Vec<f64> {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sample test of `data` against the distribution function `cdf`.
pub fn ks_one_sample<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> KsResult {
    let xs = sorted(data);
    let n = xs.len() as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    KsResult {
        statistic,
        p_value: ks_p_value(statistic, n),
    }
}

/// Two-sample test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let (xs, ys) = (sorted(a), sorted(b));
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut statistic: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        statistic = statistic.max((i as f64 / n - j as f64 / m).abs());
    }
    KsResult {
        statistic,
        p_value: ks_p_value(statistic, n * m / (n + m)),
    }
}

/// Empirical quantile by linear interpolation of the order statistics.
pub fn quantile(data: &[f64], q: f64) -> f64 {
    let xs = sorted(data);
    let pos = q.clamp(0.0, 1.0) * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    xs[lo] + (pos - lo as f64) * (xs[hi] - xs[lo])
}

/// Sample mean and (unbiased) variance.
pub fn mean_var(data: &[f64]) -> (f64, f64) {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Sample covariance of paired data.
pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0)
}
