use bbargmin_core::{
    accumulate_estimate, grid_argmin, init, run_coupled, run_standalone, CounterStream, DyadicTime,
    GaussianSource, KeyedNoise, LazyBridgePath, NoiseConvention, RunParams, SeededNoise, Verdict,
};
use proptest::prelude::*;

/// Replays the keyed Gaussians of a path in the order `init` consumes them:
/// round `r`, midpoints `(2k - 1) / 2^r` for `k = 1..=2^(r-1)`.
struct KeyedInOrder {
    noise: SeededNoise,
    round: u32,
    k: u64,
}

impl GaussianSource for KeyedInOrder {
    fn next_gaussian(&mut self) -> f64 {
        if self.k == 1u64 << (self.round - 1) {
            self.round += 1;
            self.k = 0;
        }
        self.k += 1;
        self.noise
            .gaussian(DyadicTime::new(2 * self.k - 1, self.round))
    }
}

#[test]
fn init_matches_store_under_matched_noise() {
    for seed in [1u64, 2, 99] {
        let mut src = KeyedInOrder {
            noise: SeededNoise::new(seed),
            round: 1,
            k: 0,
        };
        let (xs, _) = init(10, &mut src, NoiseConvention::default()).unwrap();
        let grid = LazyBridgePath::seeded(seed).refine_full(10).unwrap();
        for (k, v) in grid.iter().enumerate() {
            assert_eq!(v.to_bits(), xs[k].to_bits(), "seed {seed} index {k}");
        }
        assert_eq!(xs[1024], 0.0);
    }
}

#[test]
fn standalone_gaussian_budget() {
    let mut green = 0;
    for seed in 0..200 {
        let (d, n) = (8, 4);
        let mut g = CounterStream::new(seed);
        let mut u = CounterStream::new(seed + 10_000);
        let r = run_standalone(&RunParams::new(d, n), &mut g, &mut u).unwrap();
        assert_eq!(r.gaussians_consumed, g.draws());
        if r.is_green() {
            green += 1;
            assert_eq!(
                r.gaussians_consumed,
                (1 << d) - 1 + u64::from(n) * (1 << (d - 1))
            );
        }
    }
    assert!(green > 100);
}

#[test]
fn coupled_budget_matches_standalone() {
    let mut green = 0;
    for seed in 0..200 {
        let (d, n) = (8, 4);
        let mut path = LazyBridgePath::seeded(seed);
        let r = run_coupled(&RunParams::new(d, n), &mut path).unwrap();
        if r.is_green() {
            green += 1;
            assert_eq!(
                r.gaussians_consumed,
                (1 << d) - 1 + u64::from(n) * (1 << (d - 1))
            );
        }
    }
    assert!(green > 100);
}

/// Recomputes every value a coupled run holds at its last level.
fn assert_coupled_consistent<K: KeyedNoise>(path: &mut LazyBridgePath<K>, params: &RunParams) {
    let r = run_coupled(params, path).unwrap();
    let s = &r.final_state;
    let anchor = if s.level == 0 {
        0.0
    } else {
        path.get(s.origin.add(DyadicTime::new(1, s.level + 1)))
            .unwrap()
    };
    assert_eq!(anchor.to_bits(), s.anchor_value.to_bits());
    for (k, v) in s.values.iter().enumerate() {
        let t = s.zoom_to_global(k).unwrap();
        let expected = s.scale * (path.get(t).unwrap() - anchor);
        assert_eq!(v.to_bits(), expected.to_bits(), "level {} k {k}", s.level);
    }
}

#[test]
fn coupled_values_are_scaled_store_values() {
    for seed in 0..50 {
        let mut path = LazyBridgePath::seeded(seed);
        assert_coupled_consistent(&mut path, &RunParams::new(7, 5));
    }
}

#[test]
fn green_path_identity() {
    let mut checked = 0;
    for seed in 0..100 {
        let d = 7;
        let mut params = RunParams::new(d, 1);
        let mut path = LazyBridgePath::seeded(seed);
        for n in 1..=6 {
            params.levels = n;
            let r = run_coupled(&params, &mut path).unwrap();
            if !r.is_green() {
                break;
            }
            let s = &r.final_state;
            let global = s.zoom_to_global(s.argmin).unwrap();
            assert_eq!(global, r.estimate);
            assert!(global.level() <= d + n);
            let u = accumulate_estimate(&r.t_stars, n as usize).unwrap();
            assert_eq!(global.to_f64(), u);
            checked += 1;
        }
    }
    assert!(checked > 300);
}

#[test]
fn windows_are_anchored_at_previous_minimum() {
    for seed in 0..100 {
        let d = 6;
        let mut g = CounterStream::new(seed);
        let mut u = CounterStream::new(!seed);
        let r = run_standalone(&RunParams::new(d, 4), &mut g, &mut u).unwrap();
        let centre = 1 << (d - 2);
        for w in &r.level_arrays {
            assert_eq!(w.len(), (1 << (d - 1)) + 1);
            assert_eq!(w[centre], 0.0);
            assert!(w.iter().all(|&v| v >= 0.0));
        }
    }
}

#[test]
fn coupled_runs_are_reproducible() {
    let mut params = RunParams::new(9, 4);
    params.certificate2 = true;
    let a = run_coupled(&params, &mut LazyBridgePath::seeded(77)).unwrap();
    let b = run_coupled(&params, &mut LazyBridgePath::seeded(77)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn convention_must_match_path() {
    let mut params = RunParams::new(5, 2);
    params.convention = NoiseConvention::PaperLiteral;
    assert!(run_coupled(&params, &mut LazyBridgePath::seeded(1)).is_err());
}

#[test]
fn level_ceiling_applies_to_coupled_runs() {
    let mut path = LazyBridgePath::with_config(SeededNoise::new(3), NoiseConvention::default(), 10);
    assert!(run_coupled(&RunParams::new(8, 3), &mut path).is_err());
    assert!(run_coupled(&RunParams::new(8, 2), &mut path).is_ok());
}

#[test]
fn certificate2_quarters_at_depth_seven() {
    let mut params = RunParams::new(7, 4);
    params.certificate2 = true;
    let mut found = false;
    for seed in 0..20 {
        let r = run_coupled(&params, &mut LazyBridgePath::seeded(seed)).unwrap();
        if r.is_green() {
            assert_eq!(r.cert2, Some(Verdict::Green));
            assert_eq!(r.cert2_samples.len(), 4);
            for level in &r.cert2_samples {
                assert_eq!(level.len(), 64);
                assert!(level.iter().all(|s| s.k <= 32 || s.k > 96));
            }
            found = true;
        }
    }
    assert!(found);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn request_order_does_not_matter(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let level = 6;
        let n = 1u64 << level;
        let mut forward = LazyBridgePath::seeded(seed);
        let mut scrambled = LazyBridgePath::seeded(seed);
        for k in 0..n {
            forward.value_at(DyadicTime::new(k, level)).unwrap();
        }
        // Odd multiplier permutes 0..n.
        let mult = (perm_seed | 1) % n;
        for k in (0..n).rev() {
            scrambled.value_at(DyadicTime::new((k * mult).wrapping_add(perm_seed) % n, level)).unwrap();
        }
        for k in 0..n {
            let t = DyadicTime::new(k, level);
            prop_assert_eq!(forward.get(t).unwrap().to_bits(), scrambled.get(t).unwrap().to_bits());
        }
    }

    #[test]
    fn estimate_equals_accumulated_t_stars(seed in any::<u64>()) {
        let mut g = CounterStream::new(seed);
        let mut u = CounterStream::new(seed ^ 1);
        let r = run_standalone(&RunParams::new(6, 5), &mut g, &mut u).unwrap();
        let upto = r.t_stars.len() - 1;
        prop_assert_eq!(r.estimate_f64(), accumulate_estimate(&r.t_stars, upto).unwrap());
        prop_assert_eq!(r.abort.is_some(), r.t_stars.len() < 6);
        prop_assert_eq!(r.final_state.values[r.final_state.argmin], r.final_state.values.iter().cloned().fold(f64::INFINITY, f64::min));
        prop_assert_eq!(grid_argmin(&r.final_state.values).unwrap(), r.final_state.argmin);
    }
}
