use bbargmin::experiments::{aggregate, run_trial, trial_seed, ExperimentConfig, TrialRecord};
use bbargmin::stats::ks_two_sample;
use bbargmin_core::{
    grid_argmin, run_coupled, run_standalone, CounterStream, LazyBridgePath, RunParams,
};
use proptest::prelude::*;

#[test]
fn standalone_and_coupled_agree_in_law() {
    let params = RunParams::new(8, 3);
    let n = 4000;
    let mut standalone = Vec::new();
    let mut coupled = Vec::new();
    let mut min_a = Vec::new();
    let mut min_b = Vec::new();
    for seed in 0..n {
        let mut g = CounterStream::new(seed);
        let mut u = CounterStream::new(seed ^ 0xffff);
        let a = run_standalone(&params, &mut g, &mut u).unwrap();
        let b = run_coupled(&params, &mut LazyBridgePath::seeded(seed + 1_000_000)).unwrap();
        standalone.push(a.estimate_f64());
        coupled.push(b.estimate_f64());
        min_a.push(a.final_state.values[a.final_state.argmin]);
        min_b.push(b.final_state.values[b.final_state.argmin]);
    }
    assert!(ks_two_sample(&standalone, &coupled).passes(0.01));
    assert!(ks_two_sample(&min_a, &min_b).passes(0.01));
}

#[test]
fn oracle_attains_grid_minimum_and_coupling_is_sound() {
    let cfg = ExperimentConfig::new(vec![6], vec![3], 1, 0);
    for trial in 0..200 {
        let seed = trial_seed(9, 6, 3, trial);
        let t = run_trial(6, 3, seed, &cfg).unwrap();
        let path = LazyBridgePath::seeded(seed);
        let level = 6 + 3 + 2;
        let grid = path.refine_full(level).unwrap();
        let k = grid_argmin(&grid).unwrap();
        assert_eq!(t.u_oracle, k as f64 / (1 << level) as f64);
        assert!(grid.iter().all(|&v| v >= grid[k]));

        if t.result.is_green() {
            let mut path = LazyBridgePath::seeded(seed);
            let r = run_coupled(&RunParams::new(6, 3), &mut path).unwrap();
            let s = &r.final_state;
            let stored = path.get(r.estimate).unwrap();
            assert_eq!(
                s.values[s.argmin].to_bits(),
                (s.scale * (stored - s.anchor_value)).to_bits()
            );
        }
    }
}

#[test]
fn doubling_trials_halves_variance_of_rates() {
    // Spread of the window-abort rate over independent meta-runs.
    let spread = |trials: u64| {
        let rates: Vec<f64> = (0..24)
            .map(|meta| {
                let mut cfg = ExperimentConfig::new(vec![5], vec![3], trials, 1000 + meta);
                cfg.certificate2 = false;
                let rows = bbargmin::experiments::run_experiment(&cfg).unwrap();
                rows[0].row.cert1_redx_rate
            })
            .collect();
        bbargmin::stats::mean_var(&rates).1
    };
    let ratio = spread(200) / spread(400);
    assert!((1.0..4.0).contains(&ratio), "variance ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn aggregation_ignores_order(
        flags in proptest::collection::vec((any::<bool>(), any::<bool>(), 0.0f64..0.5), 1..60),
        rot in any::<usize>(),
    ) {
        let records: Vec<TrialRecord> = flags
            .iter()
            .map(|&(c1, c2, d)| TrialRecord {
                cert1_redx: c1 && !c2,
                cert2_redx: c2,
                dist: (!c1 && !c2).then_some(d),
            })
            .collect();
        let mut shuffled = records.clone();
        shuffled.reverse();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        prop_assert_eq!(aggregate(8, 4, &records, 0.0), aggregate(8, 4, &shuffled, 0.0));
    }
}
