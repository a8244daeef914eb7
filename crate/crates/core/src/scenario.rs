//! Scenario configuration shared by every stage of the simulator.

use std::fmt;
use std::num::NonZeroU32;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the SBS turns an observed subblock into an SNR reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementRepr", into = "MeasurementRepr")]
pub enum Measurement {
    /// The SBS knows each subblock SNR exactly.
    Ideal,
    /// Energy detection over this many unit-power pilot symbols.
    Pilots(NonZeroU32),
}

impl Measurement {
    pub const DEFAULT_PILOTS: u32 = 100;

    pub fn pilots(m: u32) -> Result<Self> {
        NonZeroU32::new(m)
            .map(Self::Pilots)
            .ok_or_else(|| Error::InvalidScenario("pilot_count must be at least 1".into()))
    }
}

impl Default for Measurement {
    fn default() -> Self {
        Self::Pilots(NonZeroU32::new(Self::DEFAULT_PILOTS).unwrap())
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ideal => f.write_str("ideal"),
            Self::Pilots(m) => write!(f, "{m}"),
        }
    }
}

impl std::str::FromStr for Measurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("ideal") || s.eq_ignore_ascii_case("inf") {
            return Ok(Self::Ideal);
        }
        let m: u32 = s
            .parse()
            .map_err(|_| Error::InvalidScenario(format!("bad pilot count `{s}`")))?;
        Self::pilots(m)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MeasurementRepr {
    Count(u32),
    Name(String),
}

impl TryFrom<MeasurementRepr> for Measurement {
    type Error = Error;

    fn try_from(r: MeasurementRepr) -> Result<Self> {
        match r {
            MeasurementRepr::Count(m) => Self::pilots(m),
            MeasurementRepr::Name(s) => s.parse(),
        }
    }
}

impl From<Measurement> for MeasurementRepr {
    fn from(m: Measurement) -> Self {
        match m {
            Measurement::Ideal => Self::Name("ideal".into()),
            Measurement::Pilots(m) => Self::Count(m.get()),
        }
    }
}

/// Domain in which per-trial average SNR is computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrAveraging {
    /// Arithmetic mean of the dB readings.
    #[default]
    Db,
    /// Mean of the linear readings, reported in dB.
    Linear,
}

/// Physical and experiment parameters of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    /// MBS to MU distance (the estimation target).
    pub d0_km: f64,
    /// MBS to SBS distance, known to the SBS.
    pub d1_km: f64,
    pub cell_radius_km: f64,
    pub sigma_s_db: f64,
    pub noise_dbm: f64,
    /// Target SNR the power control loop holds at the MU.
    pub gamma_t_db: f64,
    /// Number of observed blocks `I`.
    pub blocks: usize,
    /// Subblocks per block `J`.
    pub subblocks: usize,
    pub pilot_count: Measurement,
    pub trials: usize,
    pub seed: u64,
    pub snr_average: SnrAveraging,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            d0_km: 0.25,
            d1_km: 0.1,
            cell_radius_km: 0.5,
            sigma_s_db: 4.0,
            noise_dbm: -114.0,
            gamma_t_db: 10.0,
            blocks: 200,
            subblocks: 20,
            pilot_count: Measurement::default(),
            trials: 10_000,
            seed: 1,
            snr_average: SnrAveraging::Db,
        }
    }
}

impl Scenario {
    pub const MIN_DISTANCE_KM: f64 = 0.035;

    /// Total number of SNR samples `K = I * J`.
    pub fn samples(&self) -> usize {
        self.blocks * self.subblocks
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidScenario(msg));
        for (name, d) in [("d0_km", self.d0_km), ("d1_km", self.d1_km)] {
            if !(d.is_finite() && d >= Self::MIN_DISTANCE_KM) {
                return bad(format!("{name} = {d} must be at least {} km", Self::MIN_DISTANCE_KM));
            }
        }
        if !(self.cell_radius_km.is_finite() && self.cell_radius_km > 0.0) {
            return bad(format!("cell_radius_km = {} must be positive", self.cell_radius_km));
        }
        if !(self.sigma_s_db.is_finite() && self.sigma_s_db >= 0.0) {
            return bad(format!("sigma_s_db = {} must be non-negative", self.sigma_s_db));
        }
        if !self.noise_dbm.is_finite() || !self.gamma_t_db.is_finite() {
            return bad("noise_dbm and gamma_t_db must be finite".into());
        }
        if self.blocks == 0 || self.subblocks == 0 || self.trials == 0 {
            return bad("blocks, subblocks and trials must all be at least 1".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Self = serde_json::from_str(text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}
