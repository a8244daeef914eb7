//! Median-based distance estimation and order-statistic bounds.
//!
//! The median of the SBS SNR in dB sits exactly `37.6 log10(d0/d1)` above the
//! MU target SNR, whatever the fading and shadowing statistics, so inverting
//! the sample median recovers `d0`.

use serde::{Deserialize, Serialize};

use crate::channel::PathLossModel;
use crate::error::{Error, Result};

/// SNR readings (dB) in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSnrSamples {
    values_db: Vec<f64>,
}

impl SortedSnrSamples {
    /// Sorts `values_db`. NaN readings sort last under IEEE total order.
    pub fn new(mut values_db: Vec<f64>) -> Result<Self> {
        if values_db.is_empty() {
            return Err(Error::EmptySample);
        }
        values_db.sort_unstable_by(f64::total_cmp);
        Ok(Self { values_db })
    }

    pub fn len(&self) -> usize {
        self.values_db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_db.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values_db
    }

    /// The `k`-th smallest reading, 1-indexed.
    pub fn order_statistic(&self, k: usize) -> f64 {
        self.values_db[k - 1]
    }
}

/// Point estimate of `d0` with its order-statistic interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub d_hat_km: f64,
    pub lower_km: f64,
    pub upper_km: f64,
    /// Probability with which the interval is stated to hold.
    pub coverage_probability: f64,
    /// Number of samples `K` the estimate used.
    pub k_used: usize,
}

impl DistanceEstimate {
    pub fn covers(&self, d0_km: f64) -> bool {
        self.lower_km <= d0_km && d0_km <= self.upper_km
    }
}

/// Middle order statistic for odd `K`, mean of the two middle ones for even.
pub fn sample_median_db(sorted: &SortedSnrSamples) -> f64 {
    let k = sorted.len();
    if k % 2 == 1 {
        sorted.order_statistic(k.div_ceil(2))
    } else {
        0.5 * (sorted.order_statistic(k / 2) + sorted.order_statistic(k / 2 + 1))
    }
}

/// Maps an SBS SNR level back to an MBS to MU distance.
fn invert_median(snr_db: f64, d1_km: f64, gamma_t_db: f64) -> f64 {
    let slope = PathLossModel::default().exponent_coefficient;
    d1_km * 10f64.powf((snr_db - gamma_t_db) / slope)
}

fn check_d1(d1_km: f64) -> Result<()> {
    let floor = PathLossModel::default().min_distance_km;
    if !(d1_km >= floor) {
        return Err(Error::DistanceBelowModelFloor { distance_km: d1_km, floor_km: floor });
    }
    Ok(())
}

/// The MB estimate `d1 * 10^((median - gamma_T) / 37.6)`.
pub fn mb_estimate(sorted: &SortedSnrSamples, d1_km: f64, gamma_t_db: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptySample);
    }
    check_d1(d1_km)?;
    Ok(invert_median(sample_median_db(sorted), d1_km, gamma_t_db))
}

/// Rounds to the nearest integer, ties to even.
fn round_half_even(x: f64) -> f64 {
    x.round_ties_even()
}

/// `(1 - (1/2)^[K/2 + 1])^2`, the probability attached to the bounds.
pub fn stated_coverage(k: usize) -> f64 {
    let exponent = round_half_even(k as f64 / 2.0 + 1.0);
    let miss = 0.5f64.powf(exponent);
    (1.0 - miss) * (1.0 - miss)
}

/// 1-indexed order statistics used as lower and upper bounds:
/// `ceil((K+1)/2) - 1` and `floor((K+1)/2) + 1`.
pub fn bound_indices(k: usize) -> (usize, usize) {
    let lower = (k + 1).div_ceil(2) - 1;
    let upper = k.div_ceil(2) + 1;
    (lower, upper)
}

/// MB estimate together with the flanking order-statistic bounds on `d0`.
pub fn theorem2_bounds(sorted: &SortedSnrSamples, d1_km: f64, gamma_t_db: f64) -> Result<DistanceEstimate> {
    let k = sorted.len();
    if k < 3 {
        return Err(Error::InsufficientSamples { count: k });
    }
    let d_hat_km = mb_estimate(sorted, d1_km, gamma_t_db)?;
    let (lo, hi) = bound_indices(k);
    Ok(DistanceEstimate {
        d_hat_km,
        lower_km: invert_median(sorted.order_statistic(lo), d1_km, gamma_t_db),
        upper_km: invert_median(sorted.order_statistic(hi), d1_km, gamma_t_db),
        coverage_probability: stated_coverage(k),
        k_used: k,
    })
}
