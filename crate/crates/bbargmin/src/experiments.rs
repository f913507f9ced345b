//! Monte Carlo harness: runs the coupled search against a full-grid oracle
//! on the same realized path and tabulates failure rates per `(d, N)`.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use bbargmin_core::noise::derive_seed;
use bbargmin_core::{
    circle_dist, run_coupled, Certificate, LazyBridgePath, NoiseConvention, RunParams, RunResult,
    SeededNoise, DEFAULT_MAX_LEVEL,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Midpoint-noise convention as named on the command line and in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Conditional standard deviation of a Brownian midpoint.
    #[default]
    VarianceConsistent,
    /// The literal published coefficient.
    PaperLiteral,
}

impl From<Convention> for NoiseConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::VarianceConsistent => NoiseConvention::VarianceConsistent,
            Convention::PaperLiteral => NoiseConvention::PaperLiteral,
        }
    }
}

fn default_extra() -> u32 {
    2
}

fn default_true() -> bool {
    true
}

/// Experiment grid and settings; read from TOML or JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Grid depths `d`.
    pub d_list: Vec<u32>,
    /// Zoom level counts `N`.
    #[serde(rename = "N_list")]
    pub n_list: Vec<u32>,
    /// Trials per `(d, N)`.
    pub trials: u64,
    /// Root of every per-trial seed.
    #[serde(default)]
    pub master_seed: u64,
    /// The oracle grid has `d + N + oracle_extra_levels` levels.
    #[serde(default = "default_extra")]
    pub oracle_extra_levels: u32,
    /// Midpoint-noise convention.
    #[serde(default)]
    pub convention: Convention,
    /// Run the sub-interval minimum certificate at every level.
    #[serde(default = "default_true")]
    pub certificate2: bool,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    /// Record wall time per row. Off by default so output is reproducible.
    #[serde(default)]
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    /// Config with the given grid and defaults elsewhere.
    pub fn new(d_list: Vec<u32>, n_list: Vec<u32>, trials: u64, master_seed: u64) -> Self {
        Self {
            d_list,
            n_list,
            trials,
            master_seed,
            oracle_extra_levels: default_extra(),
            convention: Convention::default(),
            certificate2: true,
            workers: 0,
            record_wall_time: false,
        }
    }

    /// Loads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks ranges and the level ceiling.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.d_list.is_empty() || self.n_list.is_empty() {
            return fail("d_list and N_list must be non-empty".into());
        }
        if let Some(d) = self.d_list.iter().find(|&&d| d < 3) {
            return fail(format!("d must be ≥ 3 (got {d})"));
        }
        if self.n_list.contains(&0) {
            return fail("N must be ≥ 1".into());
        }
        if self.trials == 0 {
            return fail("trials must be ≥ 1".into());
        }
        let deepest = self.d_list.iter().max().unwrap()
            + self.n_list.iter().max().unwrap()
            + self.oracle_extra_levels;
        if deepest > DEFAULT_MAX_LEVEL {
            return fail(format!(
                "d + N + oracle_extra_levels = {deepest} exceeds the level ceiling {DEFAULT_MAX_LEVEL}"
            ));
        }
        Ok(())
    }

    fn params(&self, d: u32, n: u32) -> RunParams {
        let mut p = RunParams::new(d, n);
        p.convention = self.convention.into();
        p.certificate2 = self.certificate2;
        p.record_levels = false;
        p
    }
}

/// Seed of trial `trial` at `(d, N)`.
pub fn trial_seed(master_seed: u64, d: u32, n: u32, trial: u64) -> u64 {
    derive_seed(&[master_seed, u64::from(d), u64::from(n), trial])
}

/// One coupled run and its oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    /// The run.
    pub result: RunResult,
    /// Grid argmin of the oracle level, as a time in `[0, 1)`.
    pub u_oracle: f64,
    /// `circle_dist(u_oracle, U_N)` on green runs.
    pub dist: Option<f64>,
}

/// Runs the search on the path keyed by `seed` and locates the oracle
/// minimum of the same path at level `d + N + oracle_extra_levels`.
pub fn run_trial(d: u32, n: u32, seed: u64, cfg: &ExperimentConfig) -> Result<TrialOutcome> {
    let mut path = LazyBridgePath::with_config(
        SeededNoise::new(seed),
        cfg.convention.into(),
        DEFAULT_MAX_LEVEL,
    );
    run_trial_on(&mut path, d, n, cfg)
}

/// [`run_trial`] on a caller-supplied path.
pub fn run_trial_on<K: bbargmin_core::KeyedNoise>(
    path: &mut LazyBridgePath<K>,
    d: u32,
    n: u32,
    cfg: &ExperimentConfig,
) -> Result<TrialOutcome> {
    let result = run_coupled(&cfg.params(d, n), path)?;
    let level = d + n + cfg.oracle_extra_levels;
    let (k, _) = path.argmin_at(level)?;
    let u_oracle = k as f64 / (1u64 << level) as f64;
    let dist = result
        .is_green()
        .then(|| circle_dist(u_oracle, result.estimate_f64()));
    Ok(TrialOutcome {
        result,
        u_oracle,
        dist,
    })
}

/// Per-trial indicators kept for aggregation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    /// Aborted by the window certificate.
    pub cert1_redx: bool,
    /// Aborted by the sub-interval minimum certificate.
    pub cert2_redx: bool,
    /// Distance to the oracle on green runs.
    pub dist: Option<f64>,
}

impl From<&TrialOutcome> for TrialRecord {
    fn from(t: &TrialOutcome) -> Self {
        let cert = t.result.abort.map(|a| a.certificate);
        Self {
            cert1_redx: cert == Some(Certificate::Window),
            cert2_redx: cert == Some(Certificate::IntervalMinimum),
            dist: t.dist,
        }
    }
}

/// One row of the statistics table. Serialized field names are the CSV
/// column names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    /// Grid depth.
    pub d: u32,
    /// Zoom levels.
    #[serde(rename = "N")]
    pub n: u32,
    /// Trials run.
    pub trials: u64,
    /// Fraction of trials aborted by the window certificate.
    pub cert1_redx_rate: f64,
    /// Fraction of trials aborted by the sub-interval minimum certificate.
    pub cert2_redx_rate: f64,
    /// Fraction of green trials with `dist > 2^-N`.
    pub dist_exceed_rate: f64,
    /// Mean distance over green trials (0 when none).
    pub mean_dist: f64,
    /// Largest distance over green trials (0 when none).
    pub max_dist: f64,
    /// Seconds spent on the row; 0 unless timing is recorded.
    pub wall_time_s: f64,
}

/// A [`StatsRow`] with the derived rates carried in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRecord {
    /// CSV columns.
    #[serde(flatten)]
    pub row: StatsRow,
    /// Trials with neither certificate failing.
    pub green_trials: u64,
    /// Fraction of all trials with `dist > 2^-N`.
    pub dist_exceed_rate_unconditional: f64,
    /// Fraction of trials failing either certificate or exceeding `2^-N`.
    pub combined_failure_rate: f64,
}

/// Aggregates trial records. The result does not depend on record order.
pub fn aggregate(d: u32, n: u32, records: &[TrialRecord], wall_time_s: f64) -> StatsRecord {
    let trials = records.len() as u64;
    let count = |f: &dyn Fn(&TrialRecord) -> bool| records.iter().filter(|r| f(r)).count() as u64;
    let cert1 = count(&|r| r.cert1_redx);
    let cert2 = count(&|r| r.cert2_redx);
    let threshold = (-f64::from(n)).exp2();
    let mut dists: Vec<f64> = records.iter().filter_map(|r| r.dist).collect();
    dists.sort_by(f64::total_cmp);
    let green = dists.len() as u64;
    let exceed = dists.iter().filter(|&&x| x > threshold).count() as u64;
    let rate = |k: u64, of: u64| if of == 0 { 0.0 } else { k as f64 / of as f64 };
    let mean_dist = if green == 0 {
        0.0
    } else {
        dists.iter().sum::<f64>() / green as f64
    };
    StatsRecord {
        row: StatsRow {
            d,
            n,
            trials,
            cert1_redx_rate: rate(cert1, trials),
            cert2_redx_rate: rate(cert2, trials),
            dist_exceed_rate: rate(exceed, green),
            mean_dist,
            max_dist: dists.last().copied().unwrap_or(0.0),
            wall_time_s,
        },
        green_trials: green,
        dist_exceed_rate_unconditional: rate(exceed, trials),
        combined_failure_rate: rate(cert1 + cert2 + exceed, trials),
    }
}

/// Runs every `(d, N)` pair of `cfg` on a pool of `cfg.workers` threads.
///
/// Rows follow `d_list` then `N_list` order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<StatsRecord>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut rows = Vec::new();
    for &d in &cfg.d_list {
        for &n in &cfg.n_list {
            let start = Instant::now();
            let records: Vec<TrialRecord> = pool.install(|| {
                (0..cfg.trials)
                    .into_par_iter()
                    .map(|trial| {
                        run_trial(d, n, trial_seed(cfg.master_seed, d, n, trial), cfg)
                            .map(|t| TrialRecord::from(&t))
                            .map_err(|e| match e {
                                Error::Core(source) => Error::Trial {
                                    d,
                                    n,
                                    trial,
                                    source,
                                },
                                other => other,
                            })
                    })
                    .collect::<Result<_>>()
            })?;
            let wall = if cfg.record_wall_time {
                start.elapsed().as_secs_f64()
            } else {
                0.0
            };
            rows.push(aggregate(d, n, &records, wall));
        }
    }
    Ok(rows)
}

/// Output format of [`emit_stats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    /// Comma-separated, one row per `(d, N)`.
    #[default]
    Csv,
    /// A JSON array of records.
    Json,
}

/// Writes the table and returns the number of records.
pub fn emit_stats<W: Write>(stats: &[StatsRecord], format: Format, sink: W) -> Result<usize> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .has_headers(false)
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(sink);
            w.write_record(CSV_COLUMNS)?;
            for s in stats {
                w.serialize(&s.row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, stats)?;
            sink.write_all(b"\n")?;
        }
    }
    Ok(stats.len())
}

/// CSV header.
pub const CSV_COLUMNS: [&str; 9] = [
    "d",
    "N",
    "trials",
    "cert1_redx_rate",
    "cert2_redx_rate",
    "dist_exceed_rate",
    "mean_dist",
    "max_dist",
    "wall_time_s",
];

/// Reads a table written by [`emit_stats`] in CSV form.
pub fn read_stats_csv<R: std::io::Read>(source: R) -> Result<Vec<StatsRow>> {
    let mut r = csv::Reader::from_reader(source);
    if r.headers()?.iter().ne(CSV_COLUMNS) {
        return Err(Error::Invalid(format!(
            "unexpected header {:?}",
            r.headers()?
        )));
    }
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bbargmin_core::{DyadicTime, KeyedNoise};

    struct Silent;

    impl KeyedNoise for Silent {
        fn gaussian(&self, _: DyadicTime) -> f64 {
            0.0
        }
        fn uniform(&self, _: u32, _: u64) -> f64 {
            0.5
        }
    }

    #[test]
    fn zero_path_oracle_sits_at_origin() {
        let cfg = ExperimentConfig::new(vec![5], vec![2], 1, 0);
        let mut path = LazyBridgePath::with_config(Silent, NoiseConvention::default(), 20);
        let t = run_trial_on(&mut path, 5, 2, &cfg).unwrap();
        assert_eq!(t.u_oracle, 0.0);
        assert_eq!(t.result.t_stars[0], 0.0);
    }

    #[test]
    fn trials_are_reproducible() {
        let cfg = ExperimentConfig::new(vec![8], vec![3], 1, 5);
        let a = run_trial(8, 3, 42, &cfg).unwrap();
        let b = run_trial(8, 3, 42, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.u_oracle.to_bits(), b.u_oracle.to_bits());
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::new(vec![8, 10], vec![4], 10, 1);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.d_list = vec![2];
        assert!(bad
            .validate()
            .unwrap_err()
            .to_string()
            .contains("d must be ≥ 3"));
        let mut bad = ok.clone();
        bad.trials = 0;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.d_list = vec![36];
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.n_list.clear();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn config_files_parse() {
        let t: ExperimentConfig = toml::from_str(
            "d_list = [8, 10]\nN_list = [4]\ntrials = 100\nmaster_seed = 9\nconvention = \"paper-literal\"\n",
        )
        .unwrap();
        assert_eq!(t.oracle_extra_levels, 2);
        assert!(t.certificate2);
        assert_eq!(t.convention, Convention::PaperLiteral);
        let j: ExperimentConfig = serde_json::from_str(
            r#"{"d_list":[8,10],"N_list":[4],"trials":100,"master_seed":9,"convention":"paper-literal"}"#,
        )
        .unwrap();
        assert_eq!(t, j);
        assert!(
            toml::from_str::<ExperimentConfig>("d_list=[8]\nN_list=[4]\ntrials=1\nbogus=1\n")
                .is_err()
        );
    }

    #[test]
    fn single_trial_row_equals_indicators() {
        let r = TrialRecord {
            cert1_redx: false,
            cert2_redx: false,
            dist: Some(0.1),
        };
        let s = aggregate(8, 4, &[r], 0.0);
        assert_eq!(s.row.trials, 1);
        assert_eq!(s.row.dist_exceed_rate, 1.0);
        assert_eq!(s.row.mean_dist, 0.1);
        assert_eq!(s.combined_failure_rate, 1.0);
        let r = TrialRecord {
            cert1_redx: true,
            cert2_redx: false,
            dist: None,
        };
        let s = aggregate(8, 4, &[r], 0.0);
        assert_eq!(s.row.cert1_redx_rate, 1.0);
        assert_eq!(s.row.dist_exceed_rate, 0.0);
        assert_eq!(s.green_trials, 0);
    }

    #[test]
    fn empty_stats_is_header_only() {
        let mut buf = Vec::new();
        assert_eq!(emit_stats(&[], Format::Csv, &mut buf).unwrap(), 0);
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            format!("{}\n", CSV_COLUMNS.join(","))
        );
    }
}
