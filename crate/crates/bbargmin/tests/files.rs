use bbargmin::experiments::{
    emit_stats, read_stats_csv, run_experiment, ExperimentConfig, Format, StatsRecord,
};
use bbargmin::figures::{read_figure_csv, write_figure_csv};
use bbargmin_core::{run_coupled, LazyBridgePath, RunParams};

#[test]
fn stats_round_trip_preserves_digits() {
    let mut cfg = ExperimentConfig::new(vec![6, 7], vec![2, 3], 150, 4);
    cfg.record_wall_time = true;
    let stats = run_experiment(&cfg).unwrap();

    let mut csv = Vec::new();
    assert_eq!(emit_stats(&stats, Format::Csv, &mut csv).unwrap(), 4);
    let rows = read_stats_csv(csv.as_slice()).unwrap();
    let expected: Vec<_> = stats.iter().map(|s| s.row.clone()).collect();
    assert_eq!(rows, expected);

    let mut json = Vec::new();
    emit_stats(&stats, Format::Json, &mut json).unwrap();
    let back: Vec<StatsRecord> = serde_json::from_slice(&json).unwrap();
    assert_eq!(back, stats);
    for s in &stats {
        for rate in [
            s.row.cert1_redx_rate,
            s.row.cert2_redx_rate,
            s.row.dist_exceed_rate,
            s.combined_failure_rate,
        ] {
            assert!((0.0..=1.0).contains(&rate));
        }
    }
}

#[test]
fn one_row_one_record() {
    let stats = run_experiment(&ExperimentConfig::new(vec![5], vec![2], 1, 0)).unwrap();
    let mut buf = Vec::new();
    assert_eq!(emit_stats(&stats, Format::Csv, &mut buf).unwrap(), 1);
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
}

#[test]
fn figure_file_has_one_block_per_level() {
    let r = run_coupled(&RunParams::new(14, 4), &mut LazyBridgePath::seeded(7)).unwrap();
    assert!(r.is_green());
    let mut buf = Vec::new();
    let rows = write_figure_csv(&r, &mut buf).unwrap();
    assert_eq!(rows, 4 * ((1 << 13) + 1));
    let fig = read_figure_csv(buf.as_slice()).unwrap();
    let mut levels: Vec<u32> = fig.windows.iter().map(|r| r.0).collect();
    levels.dedup();
    assert_eq!(levels, vec![1, 2, 3, 4]);
}
