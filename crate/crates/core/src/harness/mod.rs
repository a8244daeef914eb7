//! Seeded Monte Carlo trials and parameter sweeps.
//!
//! Trial `t` of a scenario draws everything from the stream
//! `RngStream::new(seed).substream(t)`, so a trial's outcome is fixed by
//! `(scenario, t)` alone. Trials run on a rayon pool and are reduced in
//! trial order, which makes every aggregate independent of the worker
//! count. Different points of a sweep reuse the same trial streams (common
//! random numbers), so differences between points reflect the swept
//! parameter rather than fresh sampling noise.

mod output;
mod presets;
mod table1;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{theorem2_bounds, DistanceEstimate, SortedSnrSamples};
use crate::rng::RngStream;
use crate::scenario::{Measurement, Scenario, SnrAveraging};
use crate::signal::{db_to_linear, generate_snr_matrix, linear_to_db, SnrMatrix};

pub use output::{emit_csv, write_csv, CSV_HEADER};
pub use presets::{figure_preset, run_figure, FigureId, FigurePreset, SweepSpec};
pub use table1::{calibrate_d0_for_snr, nominal_d0_for_snr, Table1Row, TABLE1_TARGETS_DB};

/// Result of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub estimate: DistanceEstimate,
    /// Relative error `|d_hat - d0| / d0`.
    pub epsilon: f64,
    /// Average measured SBS SNR of the trial, in dB.
    pub mean_snr_db: f64,
}

/// Average of the measured readings in the domain the scenario asks for.
pub fn average_snr_db(matrix: &SnrMatrix, averaging: SnrAveraging) -> f64 {
    let n = matrix.len() as f64;
    match averaging {
        SnrAveraging::Db => matrix.measured_db().sum::<f64>() / n,
        SnrAveraging::Linear => linear_to_db(matrix.measured_db().map(db_to_linear).sum::<f64>() / n),
    }
}

fn trial_stream(scenario: &Scenario, trial_index: usize) -> RngStream {
    RngStream::new(scenario.seed).substream(trial_index as u64)
}

/// Simulates trial `trial_index` of `scenario` and estimates `d0` from it.
pub fn run_trial(scenario: &Scenario, trial_index: usize) -> Result<TrialOutcome> {
    let matrix = generate_snr_matrix(scenario, &trial_stream(scenario, trial_index))?;
    let mean_snr_db = average_snr_db(&matrix, scenario.snr_average);
    let sorted = SortedSnrSamples::new(matrix.measured_db().collect())?;
    let estimate = theorem2_bounds(&sorted, scenario.d1_km, scenario.gamma_t_db)?;
    Ok(TrialOutcome {
        estimate,
        epsilon: ((estimate.d_hat_km - scenario.d0_km) / scenario.d0_km).abs(),
        mean_snr_db,
    })
}

/// Parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    Blocks,
    Subblocks,
    D0,
    D1,
    Pilots,
    SigmaS,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 6] = [
        Self::Blocks,
        Self::Subblocks,
        Self::D0,
        Self::D1,
        Self::Pilots,
        Self::SigmaS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Blocks => "I",
            Self::Subblocks => "J",
            Self::D0 => "d0",
            Self::D1 => "d1",
            Self::Pilots => "M",
            Self::SigmaS => "sigma_s",
        }
    }

    pub fn parse_value(self, text: &str) -> Result<SweepValue> {
        let bad = || Error::InvalidSweepValue {
            variable: self.name().into(),
            value: text.into(),
        };
        let text = text.trim();
        Ok(match self {
            Self::Blocks | Self::Subblocks => SweepValue::Count(text.parse().map_err(|_| bad())?),
            Self::D0 | Self::D1 | Self::SigmaS => {
                let v: f64 = text.parse().map_err(|_| bad())?;
                if !v.is_finite() {
                    return Err(bad());
                }
                SweepValue::Real(v)
            }
            Self::Pilots => SweepValue::Measurement(text.parse().map_err(|_| bad())?),
        })
    }

    /// Copy of `template` with this variable set to `value`, validated.
    pub fn apply(self, template: &Scenario, value: SweepValue) -> Result<Scenario> {
        let mut sc = template.clone();
        let mismatch = || Error::InvalidSweepValue {
            variable: self.name().into(),
            value: value.to_string(),
        };
        match (self, value) {
            (Self::Blocks, SweepValue::Count(n)) => sc.blocks = n,
            (Self::Subblocks, SweepValue::Count(n)) => sc.subblocks = n,
            (Self::D0, SweepValue::Real(v)) => sc.d0_km = v,
            (Self::D1, SweepValue::Real(v)) => sc.d1_km = v,
            (Self::SigmaS, SweepValue::Real(v)) => sc.sigma_s_db = v,
            (Self::Pilots, SweepValue::Measurement(m)) => sc.pilot_count = m,
            _ => return Err(mismatch()),
        }
        sc.validate()?;
        Ok(sc)
    }

    /// Current value of this variable in `scenario`.
    pub fn value_in(self, scenario: &Scenario) -> SweepValue {
        match self {
            Self::Blocks => SweepValue::Count(scenario.blocks),
            Self::Subblocks => SweepValue::Count(scenario.subblocks),
            Self::D0 => SweepValue::Real(scenario.d0_km),
            Self::D1 => SweepValue::Real(scenario.d1_km),
            Self::SigmaS => SweepValue::Real(scenario.sigma_s_db),
            Self::Pilots => SweepValue::Measurement(scenario.pilot_count),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidSweepVariable(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SweepValue {
    Count(usize),
    Real(f64),
    Measurement(Measurement),
}

impl fmt::Display for SweepValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Count(n) => write!(f, "{n}"),
            Self::Real(v) => write!(f, "{v:.16e}"),
            Self::Measurement(m) => write!(f, "{m}"),
        }
    }
}

/// Aggregate statistics of one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub value: SweepValue,
    pub trials: usize,
    pub mean_epsilon: f64,
    pub mean_measured_snr_db: f64,
    pub mean_d_hat_km: f64,
    /// Fraction of trials whose bounds contain the true `d0`.
    pub empirical_coverage: f64,
    pub median_d_hat_km: f64,
    pub median_lower_km: f64,
    pub median_upper_km: f64,
}

fn median_of(mut xs: Vec<f64>) -> f64 {
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Reduces trial outcomes, in order, into a [`SweepResult`].
pub fn summarize(
    variable: SweepVariable,
    value: SweepValue,
    d0_km: f64,
    outcomes: &[TrialOutcome],
) -> SweepResult {
    let n = outcomes.len() as f64;
    let mean = |f: &dyn Fn(&TrialOutcome) -> f64| outcomes.iter().map(f).sum::<f64>() / n;
    let covered = outcomes.iter().filter(|o| o.estimate.covers(d0_km)).count();
    SweepResult {
        variable,
        value,
        trials: outcomes.len(),
        mean_epsilon: mean(&|o| o.epsilon),
        mean_measured_snr_db: mean(&|o| o.mean_snr_db),
        mean_d_hat_km: mean(&|o| o.estimate.d_hat_km),
        empirical_coverage: covered as f64 / n,
        median_d_hat_km: median_of(outcomes.iter().map(|o| o.estimate.d_hat_km).collect()),
        median_lower_km: median_of(outcomes.iter().map(|o| o.estimate.lower_km).collect()),
        median_upper_km: median_of(outcomes.iter().map(|o| o.estimate.upper_km).collect()),
    }
}

/// Runs trials on a rayon pool of a chosen size.
pub struct Harness {
    pool: Option<rayon::ThreadPool>,
}

impl Default for Harness {
    fn default() -> Self {
        Self::new()
    }
}

impl Harness {
    /// Uses rayon's global pool.
    pub fn new() -> Self {
        Self { pool: None }
    }

    /// Uses a dedicated pool with `workers` threads.
    pub fn with_workers(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidScenario(format!("thread pool: {e}")))?;
        Ok(Self { pool: Some(pool) })
    }

    fn install<T: Send>(&self, job: impl FnOnce() -> T + Send) -> T {
        match &self.pool {
            Some(pool) => pool.install(job),
            None => job(),
        }
    }

    /// All `scenario.trials` outcomes, in trial order.
    pub fn run_trials(&self, scenario: &Scenario) -> Result<Vec<TrialOutcome>> {
        scenario.validate()?;
        self.install(|| {
            (0..scenario.trials)
                .into_par_iter()
                .map(|t| run_trial(scenario, t))
                .collect()
        })
    }

    /// Runs `scenario` and summarizes it as the point `variable = value`.
    pub fn run_point(&self, scenario: &Scenario, variable: SweepVariable) -> Result<SweepResult> {
        let outcomes = self.run_trials(scenario)?;
        Ok(summarize(variable, variable.value_in(scenario), scenario.d0_km, &outcomes))
    }

    pub fn sweep(&self, template: &Scenario, variable: SweepVariable, values: &[SweepValue]) -> Result<Vec<SweepResult>> {
        values
            .iter()
            .map(|&v| self.run_point(&variable.apply(template, v)?, variable))
            .collect()
    }

    pub fn table1_experiment(&self, template: &Scenario) -> Result<Vec<Table1Row>> {
        table1::run(self, template)
    }
}

/// Sweeps `variable` over `values` on the global pool.
pub fn sweep(template: &Scenario, variable: SweepVariable, values: &[SweepValue]) -> Result<Vec<SweepResult>> {
    Harness::new().sweep(template, variable, values)
}

/// Parses a sweep variable name and a comma-separated value list.
pub fn parse_sweep(variable: &str, values: &str) -> Result<(SweepVariable, Vec<SweepValue>)> {
    let var: SweepVariable = variable.parse()?;
    let vals = values
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| var.parse_value(s))
        .collect::<Result<Vec<_>>>()?;
    Ok((var, vals))
}

/// Error versus average measured SNR, on the global pool.
pub fn table1_experiment(template: &Scenario) -> Result<Vec<Table1Row>> {
    Harness::new().table1_experiment(template)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(measurement: Measurement) -> Scenario {
        Scenario {
            blocks: 40,
            subblocks: 5,
            trials: 200,
            pilot_count: measurement,
            ..Scenario::default()
        }
    }

    #[test]
    fn trial_is_deterministic() {
        let sc = small(Measurement::default());
        let a = run_trial(&sc, 17).unwrap();
        let b = run_trial(&sc, 17).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, run_trial(&sc, 18).unwrap());
    }

    #[test]
    fn equal_distances_give_small_error() {
        let sc = Scenario {
            d0_km: 0.2,
            d1_km: 0.2,
            blocks: 5000,
            subblocks: 1,
            pilot_count: Measurement::Ideal,
            ..Scenario::default()
        };
        let o = run_trial(&sc, 0).unwrap();
        assert!(o.epsilon < 0.03, "{}", o.epsilon);
    }

    #[test]
    fn too_few_samples_propagates() {
        let sc = Scenario { blocks: 2, subblocks: 1, ..Scenario::default() };
        assert!(matches!(run_trial(&sc, 0), Err(Error::InsufficientSamples { count: 2 })));
    }

    #[test]
    fn sweep_variable_names() {
        for v in SweepVariable::ALL {
            assert_eq!(v.name().parse::<SweepVariable>().unwrap(), v);
        }
        assert!(matches!("K".parse::<SweepVariable>(), Err(Error::InvalidSweepVariable(_))));
    }

    #[test]
    fn parse_sweep_lists() {
        let (v, vals) = parse_sweep("I", "10, 20,50").unwrap();
        assert_eq!(v, SweepVariable::Blocks);
        assert_eq!(vals, vec![SweepValue::Count(10), SweepValue::Count(20), SweepValue::Count(50)]);
        let (_, vals) = parse_sweep("M", "ideal,100").unwrap();
        assert_eq!(vals[0], SweepValue::Measurement(Measurement::Ideal));
        assert!(parse_sweep("d0", "0.2,abc").is_err());
        assert!(parse_sweep("I", "1.5").is_err());
        assert!(parse_sweep("d0", "0.01").is_ok());
    }

    #[test]
    fn apply_validates() {
        let sc = Scenario::default();
        assert!(SweepVariable::D0.apply(&sc, SweepValue::Real(0.01)).is_err());
        assert!(SweepVariable::Blocks.apply(&sc, SweepValue::Count(0)).is_err());
        assert!(SweepVariable::Blocks.apply(&sc, SweepValue::Real(3.0)).is_err());
        assert_eq!(SweepVariable::SigmaS.apply(&sc, SweepValue::Real(6.0)).unwrap().sigma_s_db, 6.0);
    }

    #[test]
    fn aggregates_do_not_depend_on_worker_count() {
        let sc = small(Measurement::default());
        let vals = [SweepValue::Count(10), SweepValue::Count(40)];
        let one = Harness::with_workers(1).unwrap().sweep(&sc, SweepVariable::Blocks, &vals).unwrap();
        let four = Harness::with_workers(4).unwrap().sweep(&sc, SweepVariable::Blocks, &vals).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn summary_fields_are_in_range() {
        let sc = small(Measurement::Ideal);
        let r = Harness::new().run_point(&sc, SweepVariable::D0).unwrap();
        assert_eq!(r.trials, 200);
        assert_eq!(r.value, SweepValue::Real(0.25));
        assert!(r.mean_epsilon >= 0.0);
        assert!((0.0..=1.0).contains(&r.empirical_coverage));
        assert!(r.median_lower_km <= r.median_d_hat_km && r.median_d_hat_km <= r.median_upper_km);
    }

    #[test]
    fn linear_averaging_exceeds_db_averaging() {
        let sc = small(Measurement::Ideal);
        let m = generate_snr_matrix(&sc, &RngStream::new(1)).unwrap();
        assert!(average_snr_db(&m, SnrAveraging::Linear) > average_snr_db(&m, SnrAveraging::Db));
    }

    #[test]
    fn ideal_mean_snr_tracks_geometry() {
        let sc = Scenario { trials: 300, ..small(Measurement::Ideal) };
        let d0s = [0.1, 0.2, 0.4].map(SweepValue::Real);
        let rs = sweep(&sc, SweepVariable::D0, &d0s).unwrap();
        for w in rs.windows(2) {
            assert!(w[1].mean_measured_snr_db > w[0].mean_measured_snr_db);
        }
        let d1s = [0.05, 0.1, 0.3].map(SweepValue::Real);
        let rs = sweep(&sc, SweepVariable::D1, &d1s).unwrap();
        for w in rs.windows(2) {
            assert!(w[1].mean_measured_snr_db < w[0].mean_measured_snr_db);
        }
    }
}
