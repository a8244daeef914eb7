//! Path loss, Rayleigh fading and log-normal shadowing.
//!
//! Time is split into blocks of `J` subblocks. Path loss depends only on
//! distance, shadowing is redrawn once per block and fading once per
//! subblock. All gains are linear power gains.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::scenario::Scenario;

/// Log-distance path-loss model `L(d) = reference + coefficient * log10(d)`
/// with `d` in kilometres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub reference_loss_db: f64,
    pub exponent_coefficient: f64,
    pub min_distance_km: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            reference_loss_db: 128.0,
            exponent_coefficient: 37.6,
            min_distance_km: 0.035,
        }
    }
}

impl PathLossModel {
    fn check(&self, d_km: f64) -> Result<()> {
        // also rejects NaN
        if !(d_km >= self.min_distance_km) {
            return Err(Error::DistanceBelowModelFloor {
                distance_km: d_km,
                floor_km: self.min_distance_km,
            });
        }
        Ok(())
    }

    pub fn path_loss_db(&self, d_km: f64) -> Result<f64> {
        self.check(d_km)?;
        Ok(self.reference_loss_db + self.exponent_coefficient * d_km.log10())
    }

    /// Linear power gain, computed in product form
    /// `10^(-reference/10) * d^(-coefficient/10)`.
    pub fn linear_gain(&self, d_km: f64) -> Result<f64> {
        self.check(d_km)?;
        Ok(10f64.powf(-self.reference_loss_db / 10.0)
            * d_km.powf(-self.exponent_coefficient / 10.0))
    }
}

/// Path loss in dB under the default urban macro model.
pub fn path_loss_db(d_km: f64) -> Result<f64> {
    PathLossModel::default().path_loss_db(d_km)
}

/// Linear power gain under the default urban macro model.
pub fn linear_gain(d_km: f64) -> Result<f64> {
    PathLossModel::default().linear_gain(d_km)
}

/// Rayleigh fading power `|h|^2`, exponential with unit mean.
pub fn draw_fading_power<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample::<f64, _>(Exp1)
}

/// Log-normal shadowing gain whose dB value is `Normal(0, sigma_s_db^2)`.
pub fn draw_shadowing<R: Rng + ?Sized>(rng: &mut R, sigma_s_db: f64) -> f64 {
    if sigma_s_db == 0.0 {
        return 1.0;
    }
    let z: f64 = rng.sample(StandardNormal);
    10f64.powf(sigma_s_db * z / 10.0)
}

/// Link identifiers used to address random substreams.
pub(crate) mod tag {
    pub const MU: u64 = 0;
    pub const SBS: u64 = 1;
    pub const MEASUREMENT: u64 = 2;
    pub const SHADOWING: u64 = 0;

    /// Substream tag of subblock `j` within a block stream.
    pub const fn subblock(j: usize) -> u64 {
        1 + j as u64
    }
}

/// Channel realisation for one block: a shadowing pair and `J` fading pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDraw {
    pub block_index: usize,
    /// Shadowing on the MBS to MU link.
    pub shadow_mu: f64,
    /// Shadowing on the MBS to SBS link.
    pub shadow_sbs: f64,
    pub fading_mu: Vec<f64>,
    pub fading_sbs: Vec<f64>,
}

impl ChannelDraw {
    pub fn subblocks(&self) -> usize {
        self.fading_mu.len()
    }
}

/// Draws block `block_index` from the trial stream `trial`.
///
/// The draw for `(trial, block, subblock, link)` is fixed by its address, so
/// blocks may be generated in any order or on any thread.
pub fn draw_block(scenario: &Scenario, block_index: usize, trial: &RngStream) -> ChannelDraw {
    let block = trial.substream(block_index as u64);
    let shadow = block.substream(tag::SHADOWING);
    let shadow_mu = draw_shadowing(&mut shadow.substream(tag::MU), scenario.sigma_s_db);
    let shadow_sbs = draw_shadowing(&mut shadow.substream(tag::SBS), scenario.sigma_s_db);

    let j_count = scenario.subblocks;
    let mut fading_mu = Vec::with_capacity(j_count);
    let mut fading_sbs = Vec::with_capacity(j_count);
    for j in 0..j_count {
        let sub = block.substream(tag::subblock(j));
        fading_mu.push(draw_fading_power(&mut sub.substream(tag::MU)));
        fading_sbs.push(draw_fading_power(&mut sub.substream(tag::SBS)));
    }

    ChannelDraw {
        block_index,
        shadow_mu,
        shadow_sbs,
        fading_mu,
        fading_sbs,
    }
}
