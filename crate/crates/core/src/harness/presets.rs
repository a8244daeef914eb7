//! Preset experiment configurations.

use std::fmt;
use std::str::FromStr;

use super::{Harness, SweepResult, SweepValue, SweepVariable};
use crate::error::{Error, Result};
use crate::scenario::{Measurement, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    /// Estimate and bounds versus `I` at `J = 1`, ideal measurement.
    Fig3,
    /// Error versus `I` and versus `J`.
    Fig4,
    /// Average measured SNR versus `d0` and `d1`.
    Fig5,
    /// Error versus `d0` and `d1`.
    Fig6,
    /// Error versus average measured SNR.
    Table1,
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3" => Ok(Self::Fig3),
            "4" => Ok(Self::Fig4),
            "5" => Ok(Self::Fig5),
            "6" => Ok(Self::Fig6),
            "table1" => Ok(Self::Table1),
            other => Err(Error::InvalidScenario(format!(
                "unknown figure `{other}` (expected 3, 4, 5, 6 or table1)"
            ))),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fig3 => "3",
            Self::Fig4 => "4",
            Self::Fig5 => "5",
            Self::Fig6 => "6",
            Self::Table1 => "table1",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Scenario the sweep starts from.
    pub template: Scenario,
    pub variable: SweepVariable,
    pub values: Vec<SweepValue>,
}

/// Base scenario plus the sweeps (empty for the table experiment).
#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub base: Scenario,
    pub sweeps: Vec<SweepSpec>,
}

fn counts(xs: &[usize]) -> Vec<SweepValue> {
    xs.iter().map(|&n| SweepValue::Count(n)).collect()
}

fn reals(xs: &[f64]) -> Vec<SweepValue> {
    xs.iter().map(|&v| SweepValue::Real(v)).collect()
}

/// The preset for `id`. `seed`, `trials` and `ideal` override the defaults
/// when given.
pub fn figure_preset(id: FigureId, seed: Option<u64>, trials: Option<usize>, ideal: bool) -> FigurePreset {
    let mut base = Scenario {
        d0_km: 0.25,
        d1_km: 0.1,
        ..Scenario::default()
    };
    if id == FigureId::Fig3 || ideal {
        base.pilot_count = Measurement::Ideal;
    }
    if let Some(seed) = seed {
        base.seed = seed;
    }
    if let Some(trials) = trials {
        base.trials = trials;
    }

    let sweeps = match id {
        FigureId::Fig3 => {
            let template = Scenario { subblocks: 1, ..base.clone() };
            vec![SweepSpec {
                template,
                variable: SweepVariable::Blocks,
                values: counts(&[10, 20, 50, 100, 200, 500, 1000]),
            }]
        }
        FigureId::Fig4 => vec![
            SweepSpec {
                template: Scenario { subblocks: 1, ..base.clone() },
                variable: SweepVariable::Blocks,
                values: counts(&[10, 20, 50, 100, 200]),
            },
            SweepSpec {
                template: Scenario { blocks: 200, ..base.clone() },
                variable: SweepVariable::Subblocks,
                values: counts(&[1, 2, 5, 10, 20]),
            },
        ],
        FigureId::Fig5 | FigureId::Fig6 => {
            let template = Scenario { blocks: 200, subblocks: 20, ..base.clone() };
            vec![
                SweepSpec {
                    template: template.clone(),
                    variable: SweepVariable::D0,
                    values: reals(&[0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]),
                },
                SweepSpec {
                    template,
                    variable: SweepVariable::D1,
                    values: reals(&[0.05, 0.1, 0.15, 0.2, 0.3, 0.4]),
                },
            ]
        }
        FigureId::Table1 => Vec::new(),
    };
    if id == FigureId::Table1 {
        base.blocks = 200;
        base.subblocks = 20;
    }
    FigurePreset { base, sweeps }
}

/// Runs a preset and returns its rows in CSV order. Table rows are reported
/// as `d0` points at the calibrated distances.
pub fn run_figure(harness: &Harness, preset: &FigurePreset, table: bool) -> Result<Vec<SweepResult>> {
    if table {
        return Ok(harness
            .table1_experiment(&preset.base)?
            .into_iter()
            .map(|row| row.result)
            .collect());
    }
    let mut rows = Vec::new();
    for spec in &preset.sweeps {
        rows.extend(harness.sweep(&spec.template, spec.variable, &spec.values)?);
    }
    Ok(rows)
}
